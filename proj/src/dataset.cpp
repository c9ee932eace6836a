#include "tvglasso/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tvglasso {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool is_missing_token(const std::string& s) {
    if (s.empty()) return true;
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower == "na" || lower == "nan" || lower == "null";
}

// numeric-aware label comparison so that time labels like "2" < "10"
bool natural_less(const std::string& a, const std::string& b) {
    double da = 0, db = 0;
    const auto ra = std::from_chars(a.data(), a.data() + a.size(), da);
    const auto rb = std::from_chars(b.data(), b.data() + b.size(), db);
    const bool na = ra.ec == std::errc{} && ra.ptr == a.data() + a.size();
    const bool nb = rb.ec == std::errc{} && rb.ptr == b.data() + b.size();
    if (na && nb) return da < db;
    if (na != nb) return na;  // numeric labels sort before non-numeric
    return a < b;
}

}  // namespace

TimeCourseDataset TimeCourseDataset::subset_rows(const std::vector<Index>& rows) const {
    TimeCourseDataset out;
    out.gene_names = gene_names;
    out.time_labels = time_labels;
    out.values.resize(static_cast<Index>(rows.size()), values.cols());
    for (Index r = 0; r < static_cast<Index>(rows.size()); ++r)
        out.values.row(r) = values.row(rows[static_cast<std::size_t>(r)]);
    return out;
}

TimeCourseDataset load_csv(const std::string& path, Index genes, Index times) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw io_error("empty file: " + path);
    const auto header = split_csv_line(line);
    const Index ncols = static_cast<Index>(header.size());
    if (ncols != genes * times)
        throw validation_error("column count " + std::to_string(ncols) + " does not equal g*t = " +
                               std::to_string(genes * times));

    struct ColumnLabel {
        std::string gene;
        std::string time;
    };
    std::vector<ColumnLabel> labels(static_cast<std::size_t>(ncols));
    std::vector<std::string> gene_set, time_set;
    for (Index c = 0; c < ncols; ++c) {
        const std::string label = trim(header[static_cast<std::size_t>(c)]);
        const auto at = label.find('@');
        if (at == std::string::npos || label.find('@', at + 1) != std::string::npos)
            throw validation_error("column label '" + label + "' is not of the form GENE@TIME");
        labels[static_cast<std::size_t>(c)] = {label.substr(0, at), label.substr(at + 1)};
        if (std::find(gene_set.begin(), gene_set.end(), labels[static_cast<std::size_t>(c)].gene) ==
            gene_set.end())
            gene_set.push_back(labels[static_cast<std::size_t>(c)].gene);
        if (std::find(time_set.begin(), time_set.end(), labels[static_cast<std::size_t>(c)].time) ==
            time_set.end())
            time_set.push_back(labels[static_cast<std::size_t>(c)].time);
    }
    if (static_cast<Index>(gene_set.size()) != genes)
        throw validation_error("found " + std::to_string(gene_set.size()) + " distinct genes, expected " +
                               std::to_string(genes));
    if (static_cast<Index>(time_set.size()) != times)
        throw validation_error("found " + std::to_string(time_set.size()) +
                               " distinct time labels, expected " + std::to_string(times));

    std::sort(gene_set.begin(), gene_set.end(), natural_less);
    std::sort(time_set.begin(), time_set.end(), natural_less);

    std::map<std::string, Index> gene_index, time_index;
    for (Index i = 0; i < genes; ++i) gene_index[gene_set[static_cast<std::size_t>(i)]] = i;
    for (Index k = 0; k < times; ++k) time_index[time_set[static_cast<std::size_t>(k)]] = k;

    // file column -> canonical time-major column
    std::vector<Index> dest(static_cast<std::size_t>(ncols));
    std::vector<bool> seen(static_cast<std::size_t>(ncols), false);
    for (Index c = 0; c < ncols; ++c) {
        const auto& lab = labels[static_cast<std::size_t>(c)];
        const Index d = time_index[lab.time] * genes + gene_index[lab.gene];
        if (seen[static_cast<std::size_t>(d)])
            throw validation_error("duplicate column label '" + lab.gene + "@" + lab.time + "'");
        seen[static_cast<std::size_t>(d)] = true;
        dest[static_cast<std::size_t>(c)] = d;
    }

    std::vector<std::vector<double>> kept_rows;
    Index line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<Index>(cells.size()) != ncols)
            throw validation_error("row " + std::to_string(line_no) + " has " +
                                   std::to_string(cells.size()) + " cells, expected " +
                                   std::to_string(ncols));
        std::vector<double> row(static_cast<std::size_t>(ncols));
        bool missing = false;
        for (Index c = 0; c < ncols && !missing; ++c) {
            const std::string cell = trim(cells[static_cast<std::size_t>(c)]);
            if (is_missing_token(cell)) {
                missing = true;
                break;
            }
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                row[static_cast<std::size_t>(dest[static_cast<std::size_t>(c)])] = v;
            } catch (const std::exception&) {
                throw validation_error("non-numeric cell '" + cell + "' at row " +
                                       std::to_string(line_no));
            }
        }
        if (!missing) kept_rows.push_back(std::move(row));
    }

    TimeCourseDataset data;
    data.gene_names = gene_set;
    data.time_labels = time_set;
    data.values.resize(static_cast<Index>(kept_rows.size()), ncols);
    for (Index r = 0; r < data.values.rows(); ++r)
        for (Index c = 0; c < ncols; ++c)
            data.values(r, c) = kept_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    return data;
}

void write_csv(const TimeCourseDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    for (Index c = 0; c < data.values.cols(); ++c) {
        if (c) out << ',';
        out << data.column_label(c);
    }
    out << '\n';
    char buf[64];
    for (Index r = 0; r < data.values.rows(); ++r) {
        for (Index c = 0; c < data.values.cols(); ++c) {
            if (c) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", data.values(r, c));
            out << buf;
        }
        out << '\n';
    }
}

TimeCourseDataset standardize(const TimeCourseDataset& data) {
    const Index n = data.n();
    if (n < 2) throw validation_error("standardize requires n >= 2");
    TimeCourseDataset out = data;
    for (Index c = 0; c < out.values.cols(); ++c) {
        auto col = out.values.col(c);
        const double mean = col.mean();
        col.array() -= mean;
        const double var = col.squaredNorm() / static_cast<double>(n - 1);
        if (var <= 0.0)
            throw validation_error("constant column '" + data.column_label(c) +
                                   "' cannot be standardized");
        col /= std::sqrt(var);
    }
    return out;
}

EmpiricalCovariance empirical_covariance(const TimeCourseDataset& data) {
    const Index n = data.n();
    if (n < 2) throw validation_error("empirical covariance requires n >= 2");
    Matrix centered = data.values;
    const auto means = centered.colwise().mean().eval();
    centered.rowwise() -= means;
    Matrix s = (centered.transpose() * centered) / static_cast<double>(n);
    s = ((s + s.transpose()) / 2).eval();
    return {std::move(s), n};
}

}  // namespace tvglasso
