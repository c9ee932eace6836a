#pragma once

#include "tvglasso/types.hpp"

#include <string>

namespace tvglasso {

enum class BlockKind { SelfSelf, Network };

// Position of a precision-matrix entry in the lag/time block structure:
// flat coordinate (i + k*g, j + (k+s)*g) belongs to block S_s^{k+1} when
// i == j and to N_s^{k+1} otherwise (times reported 1-based).
struct BlockRef {
    BlockKind kind = BlockKind::Network;
    Index lag = 0;    // s >= 0
    Index time = 0;   // k, 0-based index of the earlier time point
    Index gene_i = 0; // gene at the earlier time point
    Index gene_j = 0; // gene at the later time point

    friend bool operator==(const BlockRef&, const BlockRef&) = default;
};

// Index algebra for the (g*t) x (g*t) precision matrix in time-major layout
// (all genes of time 1, then time 2, ...). Entries with lag > lag_cap are
// structurally zero.
class BlockLayout {
public:
    BlockLayout(Index g, Index t, Index lag_cap) : g_(g), t_(t), lag_cap_(lag_cap) {
        if (g < 1) throw validation_error("BlockLayout: g must be >= 1");
        if (t < 1) throw validation_error("BlockLayout: t must be >= 1");
        if (lag_cap < 0 || lag_cap > t - 1)
            throw validation_error("BlockLayout: lag_cap must be in [0, t-1]");
    }

    Index genes() const { return g_; }
    Index times() const { return t_; }
    Index lag_cap() const { return lag_cap_; }
    Index dim() const { return g_ * t_; }
    // number of upper-triangular off-diagonal entries
    Index pair_count() const { return dim() * (dim() - 1) / 2; }

    Index flat(Index gene, Index time) const { return time * g_ + gene; }
    Index time_of(Index p) const { return p / g_; }
    Index gene_of(Index p) const { return p % g_; }

    // block descriptor of coordinate (p, q), p <= q
    BlockRef classify(Index p, Index q) const {
        check_coord(p, q);
        BlockRef ref;
        ref.time = time_of(p);
        ref.lag = time_of(q) - ref.time;
        ref.gene_i = gene_of(p);
        ref.gene_j = gene_of(q);
        ref.kind = (ref.gene_i == ref.gene_j) ? BlockKind::SelfSelf : BlockKind::Network;
        return ref;
    }

    // inverse of classify; returns the upper-triangular coordinate
    std::pair<Index, Index> locate(const BlockRef& ref) const {
        const Index p = flat(ref.gene_i, ref.time);
        const Index q = flat(ref.gene_j, ref.time + ref.lag);
        return (p <= q) ? std::make_pair(p, q) : std::make_pair(q, p);
    }

    bool is_masked(Index p, Index q) const {
        return std::abs(time_of(q) - time_of(p)) > lag_cap_;
    }

    // true = forced structural zero (lag beyond lag_cap)
    MaskArray forced_zero_mask() const {
        const Index d = dim();
        MaskArray mask(d, d);
        for (Index q = 0; q < d; ++q)
            for (Index p = 0; p < d; ++p) mask(p, q) = is_masked(p, q);
        return mask;
    }

    Index masked_count_upper() const {
        Index count = 0;
        for (Index s = lag_cap_ + 1; s < t_; ++s) count += (t_ - s) * g_ * g_;
        return count;
    }

    std::string block_name(const BlockRef& ref) const {
        const char kind = (ref.kind == BlockKind::SelfSelf) ? 'S' : 'N';
        return std::string(1, kind) + "_" + std::to_string(ref.lag) + "^" +
               std::to_string(ref.time + 1);
    }

private:
    void check_coord(Index p, Index q) const {
        if (p < 0 || q < p || q >= dim())
            throw validation_error("BlockLayout: coordinate out of range");
    }

    Index g_;
    Index t_;
    Index lag_cap_;
};

inline BlockLayout make_layout(Index g, Index t, Index lag_cap) { return {g, t, lag_cap}; }

}  // namespace tvglasso
