#pragma once

#include "tvglasso/types.hpp"

#include <string>
#include <vector>

namespace tvglasso {

// n replicates of g genes observed at t time points, flattened to an
// n x (g*t) matrix in time-major column order: column k*g + i holds gene i
// at time k. Immutable after construction; operations return new datasets.
struct TimeCourseDataset {
    Matrix values;  // n x (g*t)
    std::vector<std::string> gene_names;
    std::vector<std::string> time_labels;

    Index n() const { return values.rows(); }
    Index g() const { return static_cast<Index>(gene_names.size()); }
    Index t() const { return static_cast<Index>(time_labels.size()); }
    Index dim() const { return g() * t(); }

    const std::string& gene_of_column(Index col) const {
        return gene_names[static_cast<std::size_t>(col % g())];
    }
    const std::string& time_of_column(Index col) const {
        return time_labels[static_cast<std::size_t>(col / g())];
    }
    std::string column_label(Index col) const {
        return gene_of_column(col) + "@" + time_of_column(col);
    }

    // dataset restricted to the given replicate rows
    TimeCourseDataset subset_rows(const std::vector<Index>& rows) const;
};

// Reads a comma-separated file with a mandatory header of GENE@TIME labels.
// Genes and times are ordered canonically (numeric-aware label sort), so the
// result does not depend on the column order in the file. Rows containing
// missing cells (empty, NA, NaN) are rejected; any other non-numeric cell is
// an error.
TimeCourseDataset load_csv(const std::string& path, Index genes, Index times);

// Writes the dataset back out in its canonical column order, full precision.
void write_csv(const TimeCourseDataset& data, const std::string& path);

// Centers each column to mean 0 and scales it to unbiased sample variance 1.
// Requires n >= 2 and no constant column.
TimeCourseDataset standardize(const TimeCourseDataset& data);

struct EmpiricalCovariance {
    Matrix s;         // (g*t) x (g*t), symmetric
    Index n_source;   // replicate count it was computed from
};

// S = (1/n) X^T X for column-centered X (maximum-likelihood divisor n).
EmpiricalCovariance empirical_covariance(const TimeCourseDataset& data);

}  // namespace tvglasso
