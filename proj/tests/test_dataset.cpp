#include "tvglasso/dataset.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace tvglasso;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/tvglasso_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("load_csv basic parsing and canonical ordering") {
    const auto path = write_temp("basic.csv",
                                 "a@1,b@1,a@2,b@2\n"
                                 "1,2,3,4\n"
                                 "5,6,7,8\n");
    const TimeCourseDataset data = load_csv(path, 2, 2);
    CHECK(data.n() == 2);
    CHECK(data.g() == 2);
    CHECK(data.t() == 2);
    CHECK(data.gene_names == std::vector<std::string>{"a", "b"});
    CHECK(data.time_labels == std::vector<std::string>{"1", "2"});
    CHECK(data.values(0, 0) == 1.0);
    CHECK(data.values(0, 3) == 4.0);
    CHECK(data.column_label(2) == "a@2");
}

TEST_CASE("load_csv is invariant to column shuffling") {
    const auto ordered = write_temp("ordered.csv",
                                    "a@1,b@1,a@2,b@2\n"
                                    "1,2,3,4\n"
                                    "5,6,7,8\n");
    const auto shuffled = write_temp("shuffled.csv",
                                     "b@2,a@1,b@1,a@2\n"
                                     "4,1,2,3\n"
                                     "8,5,6,7\n");
    const TimeCourseDataset a = load_csv(ordered, 2, 2);
    const TimeCourseDataset b = load_csv(shuffled, 2, 2);
    CHECK(a.gene_names == b.gene_names);
    CHECK(a.time_labels == b.time_labels);
    CHECK(a.values == b.values);
}

TEST_CASE("load_csv sorts numeric time labels numerically") {
    const auto path = write_temp("numeric.csv",
                                 "g@10,g@2\n"
                                 "7,3\n");
    const TimeCourseDataset data = load_csv(path, 1, 2);
    CHECK(data.time_labels == std::vector<std::string>{"2", "10"});
    CHECK(data.values(0, 0) == 3.0);
    CHECK(data.values(0, 1) == 7.0);
}

TEST_CASE("load_csv minimal one-cell file") {
    const auto path = write_temp("mini.csv", "g@1\n0\n");
    const TimeCourseDataset data = load_csv(path, 1, 1);
    CHECK(data.n() == 1);
    CHECK(data.values(0, 0) == 0.0);
}

TEST_CASE("load_csv at the 58-gene 10-time scale") {
    std::ostringstream content;
    for (int k = 1; k <= 10; ++k)
        for (int i = 1; i <= 58; ++i) {
            if (k > 1 || i > 1) content << ',';
            content << "gene" << i << "@" << k;
        }
    content << '\n';
    Rng rng(59);
    for (int r = 0; r < 44; ++r) {
        for (int c = 0; c < 580; ++c) {
            if (c) content << ',';
            content << normal_sample(rng);
        }
        content << '\n';
    }
    const auto path = write_temp("tcell_scale.csv", content.str());
    const TimeCourseDataset data = load_csv(path, 58, 10);
    CHECK(data.n() == 44);
    CHECK(data.g() == 58);
    CHECK(data.t() == 10);
    CHECK(data.dim() == 580);
}

TEST_CASE("load_csv error paths") {
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", 1, 1), io_error);
    const auto wrong_dims = write_temp("wrongdims.csv", "a@1,b@1\n1,2\n");
    CHECK_THROWS_AS(load_csv(wrong_dims, 2, 2), validation_error);
    const auto dup = write_temp("dup.csv", "a@1,a@1\n1,2\n");
    CHECK_THROWS_AS(load_csv(dup, 2, 1), validation_error);
    const auto bad_cell = write_temp("badcell.csv", "a@1,b@1\n1,zzz\n");
    CHECK_THROWS_AS(load_csv(bad_cell, 2, 1), validation_error);
    const auto bad_label = write_temp("badlabel.csv", "a_1,b@1\n1,2\n");
    CHECK_THROWS_AS(load_csv(bad_label, 2, 1), validation_error);
}

TEST_CASE("rows with missing cells are rejected, not imputed") {
    const auto path = write_temp("missing.csv",
                                 "a@1,b@1\n"
                                 "1,2\n"
                                 "3,NA\n"
                                 "5,\n"
                                 "7,8\n");
    const TimeCourseDataset data = load_csv(path, 2, 1);
    CHECK(data.n() == 2);
    CHECK(data.values(1, 0) == 7.0);
}

TEST_CASE("csv round trip is bit exact") {
    Rng rng(3);
    TimeCourseDataset data;
    data.gene_names = {"a", "b", "c"};
    data.time_labels = {"1", "2"};
    data.values = gaussian_matrix(5, 6, rng) * 1.0e3;
    data.values(0, 0) = 1.0 / 3.0;  // a value without a short decimal form
    const std::string path = "/tmp/tvglasso_test_roundtrip.csv";
    write_csv(data, path);
    const TimeCourseDataset back = load_csv(path, 3, 2);
    CHECK(back.gene_names == data.gene_names);
    CHECK(back.time_labels == data.time_labels);
    REQUIRE(back.values.rows() == data.values.rows());
    for (Index r = 0; r < data.values.rows(); ++r)
        for (Index c = 0; c < data.values.cols(); ++c)
            CHECK(back.values(r, c) == data.values(r, c));
}

TEST_CASE("standardize uses the unbiased variance convention") {
    TimeCourseDataset data;
    data.gene_names = {"a"};
    data.time_labels = {"1"};
    data.values.resize(2, 1);
    data.values << 5.0, -5.0;
    const TimeCourseDataset out = standardize(data);
    // mean 0, unbiased variance 1: (5,-5) has sd 5*sqrt(2)
    const double expected = 5.0 / (5.0 * std::sqrt(2.0));
    CHECK(out.values(0, 0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(out.values(1, 0) == doctest::Approx(-expected).epsilon(1e-14));
}

TEST_CASE("standardize is idempotent and normalizes moments") {
    Rng rng(17);
    TimeCourseDataset data;
    data.gene_names = {"a", "b", "c"};
    data.time_labels = {"1", "2"};
    data.values = gaussian_matrix(10, 6, rng) * 3.0;
    data.values.array() += 2.0;

    const TimeCourseDataset once = standardize(data);
    for (Index c = 0; c < once.values.cols(); ++c) {
        CHECK(std::abs(once.values.col(c).mean()) < 1e-12);
        const double var = once.values.col(c).squaredNorm() / 9.0;
        CHECK(std::abs(var - 1.0) < 1e-12);
    }
    const TimeCourseDataset twice = standardize(once);
    CHECK((twice.values - once.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardize error paths") {
    TimeCourseDataset one_row;
    one_row.gene_names = {"a"};
    one_row.time_labels = {"1"};
    one_row.values = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(standardize(one_row), validation_error);

    TimeCourseDataset constant;
    constant.gene_names = {"a", "b"};
    constant.time_labels = {"1"};
    constant.values.resize(3, 2);
    constant.values << 1.0, 7.0, 2.0, 7.0, 3.0, 7.0;
    CHECK_THROWS_WITH_AS(standardize(constant),
                         doctest::Contains("b@1"), validation_error);
}

TEST_CASE("empirical covariance rank-1 example") {
    TimeCourseDataset data;
    data.gene_names = {"a", "b"};
    data.time_labels = {"1"};
    data.values.resize(2, 2);
    data.values << 1.0, 1.0, -1.0, -1.0;
    const EmpiricalCovariance cov = empirical_covariance(data);
    CHECK(cov.n_source == 2);
    CHECK(cov.s(0, 0) == doctest::Approx(1.0));
    CHECK(cov.s(0, 1) == doctest::Approx(1.0));
    CHECK(cov.s(1, 0) == doctest::Approx(1.0));
    CHECK(cov.s(1, 1) == doctest::Approx(1.0));
    TimeCourseDataset single;
    single.values = Matrix::Zero(1, 2);
    single.gene_names = {"a", "b"};
    single.time_labels = {"1"};
    CHECK_THROWS_AS(empirical_covariance(single), validation_error);
}

TEST_CASE("standardized data has diagonal (n-1)/n") {
    Rng rng(23);
    TimeCourseDataset data;
    data.gene_names = {"a", "b"};
    data.time_labels = {"1", "2"};
    data.values = gaussian_matrix(12, 4, rng);
    const EmpiricalCovariance cov = empirical_covariance(standardize(data));
    for (Index c = 0; c < 4; ++c)
        CHECK(cov.s(c, c) == doctest::Approx(11.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("large-sample covariance of white noise approaches identity") {
    Rng rng(29);
    TimeCourseDataset data;
    data.gene_names = {"a", "b", "c"};
    data.time_labels = {"1"};
    data.values = gaussian_matrix(5000, 3, rng);
    const EmpiricalCovariance cov = empirical_covariance(data);
    CHECK((cov.s - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("empirical covariance is positive semidefinite") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        TimeCourseDataset data;
        const Index cols = 2 + static_cast<Index>(rng() % 6);
        const Index rows = 2 + static_cast<Index>(rng() % 10);
        for (Index i = 0; i < cols; ++i) data.gene_names.push_back("g" + std::to_string(i));
        data.time_labels = {"1"};
        data.values = gaussian_matrix(rows, cols, rng);
        const EmpiricalCovariance cov = empirical_covariance(data);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(cov.s, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        CHECK(lo >= -1e-10 * std::max(hi, 1.0));
        CHECK((cov.s - cov.s.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("subset_rows picks the requested replicates") {
    TimeCourseDataset data;
    data.gene_names = {"a"};
    data.time_labels = {"1"};
    data.values.resize(4, 1);
    data.values << 1.0, 2.0, 3.0, 4.0;
    const TimeCourseDataset sub = data.subset_rows({3, 1});
    CHECK(sub.n() == 2);
    CHECK(sub.values(0, 0) == 4.0);
    CHECK(sub.values(1, 0) == 2.0);
}
