#include "tvglasso/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tvglasso {

SupportSet lag0_network_support(const Matrix& theta, const BlockLayout& layout,
                                double threshold) {
    SupportSet support;
    const Index g = layout.genes();
    for (Index k = 0; k < layout.times(); ++k)
        for (Index j = 0; j < g; ++j)
            for (Index i = 0; i < j; ++i) {
                const Index p = layout.flat(i, k);
                const Index q = layout.flat(j, k);
                if (std::abs(theta(p, q)) > threshold) support.insert({p, q});
            }
    return support;
}

SupportSet lag0_network_support_at(const Matrix& theta, const BlockLayout& layout,
                                   double threshold, Index time) {
    SupportSet support;
    for (Index j = 0; j < layout.genes(); ++j)
        for (Index i = 0; i < j; ++i) {
            const Index p = layout.flat(i, time);
            const Index q = layout.flat(j, time);
            if (std::abs(theta(p, q)) > threshold) support.insert({p, q});
        }
    return support;
}

SupportSet full_support(const Matrix& theta, const BlockLayout& layout, double threshold,
                        const MaskArray& mask) {
    SupportSet support;
    for (Index q = 0; q < layout.dim(); ++q)
        for (Index p = 0; p < q; ++p) {
            if (mask.size() != 0 && mask(p, q)) continue;
            if (std::abs(theta(p, q)) > threshold) support.insert({p, q});
        }
    return support;
}

ConfusionMetrics confusion(const SupportSet& est_support, const SupportSet& true_support,
                           Index universe) {
    SupportSet all = est_support;
    all.insert(true_support.begin(), true_support.end());
    if (static_cast<Index>(all.size()) > universe)
        throw validation_error("confusion: supports exceed the comparable universe");

    ConfusionMetrics m;
    for (const auto& e : est_support)
        true_support.count(e) ? ++m.tp : ++m.fp;
    for (const auto& e : true_support)
        if (!est_support.count(e)) ++m.fn;
    m.tn = universe - m.tp - m.fp - m.fn;

    auto ratio = [](Index num, Index den) {
        return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };
    m.fp_rate = ratio(m.fp, m.fp + m.tn);
    m.fn_rate = ratio(m.fn, m.fn + m.tp);
    m.fd_rate = ratio(m.fp, m.fp + m.tp);
    m.fnd_rate = ratio(m.fn, m.fn + m.tn);
    return m;
}

GraphDiffReport graph_diff(const PrecisionEstimate& est, Index k_one_based) {
    const BlockLayout& layout = est.layout;
    if (k_one_based < 1 || k_one_based > layout.times() - 1)
        throw validation_error("graph_diff: time index out of range");
    const Index k = k_one_based - 1;
    const double threshold = est.settings.edge_threshold;

    GraphDiffReport report;
    report.time_k = k_one_based;
    const Index g = layout.genes();
    for (Index j = 0; j < g; ++j)
        for (Index i = 0; i < j; ++i) {
            const double wk = est.theta(layout.flat(i, k), layout.flat(j, k));
            const double wk1 = est.theta(layout.flat(i, k + 1), layout.flat(j, k + 1));
            const bool in_k = std::abs(wk) > threshold;
            const bool in_k1 = std::abs(wk1) > threshold;
            if (!in_k && !in_k1) continue;
            DiffEdge edge{i, j, in_k ? wk : 0.0, in_k1 ? wk1 : 0.0, 0.0};
            edge.delta = edge.weight_k1 - edge.weight_k;
            if (in_k) report.graph_k.push_back(edge);
            if (in_k1) report.graph_k1.push_back(edge);
            if (in_k && in_k1) report.intersection.push_back(edge);
            if (!in_k && in_k1) report.born.push_back(edge);
            if (in_k && !in_k1) report.died.push_back(edge);
        }
    return report;
}

namespace {

struct UnionFind {
    std::vector<Index> parent;
    explicit UnionFind(Index n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), Index{0});
    }
    Index find(Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(a)] = b;
    }
};

}  // namespace

std::vector<TimeGraphStats> evolution_diagnostics(const PrecisionEstimate& est) {
    const BlockLayout& layout = est.layout;
    const Index g = layout.genes();
    const double threshold = est.settings.edge_threshold;
    std::vector<TimeGraphStats> stats;
    for (Index k = 0; k < layout.times(); ++k) {
        TimeGraphStats s;
        s.time = k + 1;
        UnionFind uf(g);
        std::vector<bool> touched(static_cast<std::size_t>(g), false);
        for (Index j = 0; j < g; ++j)
            for (Index i = 0; i < j; ++i) {
                if (std::abs(est.theta(layout.flat(i, k), layout.flat(j, k))) <= threshold)
                    continue;
                ++s.edges;
                touched[static_cast<std::size_t>(i)] = true;
                touched[static_cast<std::size_t>(j)] = true;
                uf.unite(i, j);
            }
        s.non_isolated_nodes = static_cast<Index>(
            std::count(touched.begin(), touched.end(), true));
        std::vector<Index> component_size(static_cast<std::size_t>(g), 0);
        for (Index v = 0; v < g; ++v) ++component_size[static_cast<std::size_t>(uf.find(v))];
        for (Index v = 0; v < g; ++v) {
            const Index size = component_size[static_cast<std::size_t>(v)];
            if (size > 0) ++s.components;
            s.largest_component = std::max(s.largest_component, size);
        }
        stats.push_back(s);
    }
    return stats;
}

}  // namespace tvglasso
