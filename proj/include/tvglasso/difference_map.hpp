#pragma once

#include "tvglasso/block_layout.hpp"
#include "tvglasso/types.hpp"

#include <ostream>
#include <vector>

namespace tvglasso {

// Coordinates of one same-lag block entry followed across consecutive time
// points. Every upper-triangular coordinate with lag <= lag_cap belongs to
// exactly one chain; adjacent chain members are the penalized differences.
struct DifferenceChain {
    Index lag = 0;
    Index gene_i = 0;
    Index gene_j = 0;
    std::vector<std::pair<Index, Index>> coords;  // one (p, q) per time point
};

// One penalized difference theta(plus) - theta(minus): the same lag-s block
// entry at times k and k+1.
struct DifferenceRow {
    std::pair<Index, Index> plus;
    std::pair<Index, Index> minus;
    Index lag = 0;
    Index time = 0;  // k, 0-based
};

// Sparse +/-1 map D with one row per penalized difference; D * vec(Theta)
// evaluates all differences between same-lag blocks at consecutive times.
class DifferenceMap {
public:
    DifferenceMap() = default;
    DifferenceMap(std::vector<DifferenceChain> chains, Index dim) : dim_(dim) {
        chains_ = std::move(chains);
        for (const auto& chain : chains_) {
            for (std::size_t k = 0; k + 1 < chain.coords.size(); ++k) {
                DifferenceRow row;
                row.plus = chain.coords[k];
                row.minus = chain.coords[k + 1];
                row.lag = chain.lag;
                row.time = static_cast<Index>(k);
                rows_.push_back(row);
            }
        }
    }

    Index rows() const { return static_cast<Index>(rows_.size()); }
    Index dim() const { return dim_; }
    const std::vector<DifferenceRow>& row_list() const { return rows_; }
    const std::vector<DifferenceChain>& chains() const { return chains_; }

    // D * vec(theta) over the upper triangle
    Vector apply(const Matrix& theta) const {
        Vector out(rows());
        for (Index r = 0; r < rows(); ++r) {
            const auto& row = rows_[static_cast<std::size_t>(r)];
            out(r) = theta(row.plus.first, row.plus.second) -
                     theta(row.minus.first, row.minus.second);
        }
        return out;
    }

    double fused_l1(const Matrix& theta) const {
        double sum = 0.0;
        for (const auto& row : rows_)
            sum += std::abs(theta(row.plus.first, row.plus.second) -
                            theta(row.minus.first, row.minus.second));
        return sum;
    }

    // debugging export: one line per nonzero, "row col sign" with col the
    // column-major index into vec(Theta)
    void export_coordinate_list(std::ostream& os) const {
        for (Index r = 0; r < rows(); ++r) {
            const auto& row = rows_[static_cast<std::size_t>(r)];
            os << r << ' ' << row.plus.second * dim_ + row.plus.first << " 1\n";
            os << r << ' ' << row.minus.second * dim_ + row.minus.first << " -1\n";
        }
    }

private:
    std::vector<DifferenceChain> chains_;
    std::vector<DifferenceRow> rows_;
    Index dim_ = 0;
};

// Builds the fused-difference map. Lag-0 chains run over unordered gene
// pairs i < j (network entries only; the diagonal is never fused). Chains at
// lag s >= 1 run over all ordered gene pairs including i == j (self-self);
// set fuse_self_self = false to restrict those lags to network entries.
inline DifferenceMap build_difference_map(const BlockLayout& layout,
                                          bool fuse_self_self = true) {
    std::vector<DifferenceChain> chains;
    const Index g = layout.genes();
    const Index t = layout.times();
    for (Index s = 0; s <= layout.lag_cap(); ++s) {
        const Index chain_len = t - s;
        for (Index i = 0; i < g; ++i) {
            const Index j_begin = (s == 0) ? i + 1 : Index{0};
            for (Index j = j_begin; j < g; ++j) {
                if (s >= 1 && i == j && !fuse_self_self) continue;
                DifferenceChain chain;
                chain.lag = s;
                chain.gene_i = i;
                chain.gene_j = j;
                chain.coords.reserve(static_cast<std::size_t>(chain_len));
                for (Index k = 0; k + s < t; ++k)
                    chain.coords.emplace_back(layout.flat(i, k), layout.flat(j, k + s));
                chains.push_back(std::move(chain));
            }
        }
    }
    return {std::move(chains), layout.dim()};
}

}  // namespace tvglasso
