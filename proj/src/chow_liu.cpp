#include "phasefield/chow_liu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "phasefield/kernels.hpp"

namespace phasefield {

namespace {

PairwiseTable table_from_sums(const kernels::PairSums& sums, std::size_t n)
{
    const int p = sums.p;
    const std::size_t pp = std::size_t(p) * p;
    PairwiseTable t{p, std::vector<double>(pp, 0.0), std::vector<double>(pp, 0.0), std::vector<double>(pp, 0.0),
                    std::vector<char>(pp, 0)};
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const std::size_t ij = std::size_t(i) * p + j;
            const std::size_t ji = std::size_t(j) * p + i;
            const auto fit = vm_mle_from_sums(sums.cos_sum[ij], sums.sin_sum[ij], n);
            t.kappa_values[ij] = t.kappa_values[ji] = fit.params.kappa;
            t.mu_values[ij] = fit.params.mu.radians();
            t.mu_values[ji] = wrap(-fit.params.mu.radians());
            t.mi_values[ij] = t.mi_values[ji] = mi_from_kappa(fit.params.kappa);
            t.degenerate_flags[ij] = t.degenerate_flags[ji] = fit.degenerate ? 1 : 0;
        }
    }
    return t;
}

struct DisjointSet {
    std::vector<int> parent;
    std::vector<int> rank;

    explicit DisjointSet(int n) : parent(std::size_t(n)), rank(std::size_t(n), 0)
    {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x)
    {
        while (parent[std::size_t(x)] != x) {
            parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
            x = parent[std::size_t(x)];
        }
        return x;
    }
    bool unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank[std::size_t(a)] < rank[std::size_t(b)]) std::swap(a, b);
        parent[std::size_t(b)] = a;
        if (rank[std::size_t(a)] == rank[std::size_t(b)]) ++rank[std::size_t(a)];
        return true;
    }
};

} // namespace

TreeModel::TreeModel(int root, std::vector<TreeEdge> edges) : root_(root)
{
    const int p = int(edges.size()) + 1;
    if (root < 0 || root >= p) throw std::invalid_argument("TreeModel: root out of range");
    std::vector<std::vector<std::size_t>> children(static_cast<std::size_t>(p));
    parent_.assign(std::size_t(p), -1);
    for (std::size_t q = 0; q < edges.size(); ++q) {
        const auto& e = edges[q];
        if (e.parent < 0 || e.parent >= p || e.child < 0 || e.child >= p || e.parent == e.child)
            throw std::invalid_argument("TreeModel: edge index out of range");
        if (e.child == root || parent_[std::size_t(e.child)] != -1)
            throw std::invalid_argument("TreeModel: node has more than one parent");
        if (!(e.kappa >= 0.0)) throw std::invalid_argument("TreeModel: kappa must be >= 0");
        parent_[std::size_t(e.child)] = e.parent;
        children[std::size_t(e.parent)].push_back(q);
    }
    // breadth-first from the root; visits every node iff the edges form a spanning tree
    std::vector<char> seen(std::size_t(p), 0);
    std::queue<int> frontier;
    frontier.push(root);
    seen[std::size_t(root)] = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        auto kids = children[std::size_t(u)];
        std::sort(kids.begin(), kids.end(), [&](std::size_t a, std::size_t b) { return edges[a].child < edges[b].child; });
        for (std::size_t q : kids) {
            const int c = edges[q].child;
            if (seen[std::size_t(c)]) throw std::invalid_argument("TreeModel: cycle");
            seen[std::size_t(c)] = 1;
            edges_.push_back(edges[q]);
            frontier.push(c);
        }
    }
    if (edges_.size() != edges.size()) throw std::invalid_argument("TreeModel: edges do not form a spanning tree");
    for (const auto& e : edges_) log_norm_.push_back(kLogTwoPi + log_bessel_i0(e.kappa));
}

GraphStructure TreeModel::structure() const
{
    std::vector<Edge> es;
    for (const auto& e : edges_) es.push_back({e.parent, e.child});
    return GraphStructure(p(), es);
}

GraphModel TreeModel::as_graph_model() const
{
    std::vector<std::pair<Edge, EdgeCoupling>> es;
    for (const auto& e : edges_) es.push_back({{e.parent, e.child}, {e.kappa, e.mu}});
    return GraphModel::from_oriented(p(), es);
}

TreeModel TreeModel::rerooted(int new_root) const
{
    const int n = p();
    if (new_root < 0 || new_root >= n) throw std::invalid_argument("TreeModel::rerooted: root out of range");
    std::vector<std::vector<std::pair<int, TreeEdge>>> adj(static_cast<std::size_t>(n));
    for (const auto& e : edges_) {
        adj[std::size_t(e.parent)].push_back({e.child, e});
        adj[std::size_t(e.child)].push_back({e.parent, TreeEdge{e.child, e.parent, e.kappa, Angle(-e.mu.radians())}});
    }
    std::vector<TreeEdge> out;
    std::vector<char> seen(std::size_t(n), 0);
    std::queue<int> frontier;
    frontier.push(new_root);
    seen[std::size_t(new_root)] = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (const auto& [v, e] : adj[std::size_t(u)]) {
            if (seen[std::size_t(v)]) continue;
            seen[std::size_t(v)] = 1;
            out.push_back(e);
            frontier.push(v);
        }
    }
    return TreeModel(new_root, std::move(out));
}

PairwiseTable fit_pairwise(const PhaseDataset& d)
{
    if (d.n() < 2) throw std::invalid_argument("fit_pairwise: at least two samples are required");
    return table_from_sums(kernels::omp::pair_sums(d), d.n());
}

PairwiseTable fit_pairwise_serial(const PhaseDataset& d)
{
    if (d.n() < 2) throw std::invalid_argument("fit_pairwise: at least two samples are required");
    return table_from_sums(kernels::serial::pair_sums(d), d.n());
}

std::vector<Edge> max_spanning_tree(std::span<const double> weights, int p)
{
    if (p < 2) throw std::invalid_argument("max_spanning_tree: p must be >= 2");
    if (weights.size() != std::size_t(p) * p) throw std::invalid_argument("max_spanning_tree: weights must be p x p");
    std::vector<Edge> candidates;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            if (!std::isfinite(weights[std::size_t(i) * p + j]))
                throw std::invalid_argument("max_spanning_tree: non-finite weight");
            candidates.push_back({i, j});
        }
    }
    // candidates are generated in lexicographic order; stable sort keeps it among ties
    std::stable_sort(candidates.begin(), candidates.end(), [&](const Edge& a, const Edge& b) {
        return weights[std::size_t(a.i) * p + a.j] > weights[std::size_t(b.i) * p + b.j];
    });
    DisjointSet dsu(p);
    std::vector<Edge> tree;
    for (const auto& e : candidates) {
        if (dsu.unite(e.i, e.j)) tree.push_back(e);
        if (int(tree.size()) == p - 1) break;
    }
    std::sort(tree.begin(), tree.end());
    return tree;
}

TreeModel orient_tree(const std::vector<Edge>& tree, const PairwiseTable& table, int root)
{
    const int p = table.p;
    if (int(tree.size()) != p - 1) throw std::invalid_argument("orient_tree: edge count != p - 1");
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(p));
    for (const auto& e : tree) {
        adj[std::size_t(e.i)].push_back(e.j);
        adj[std::size_t(e.j)].push_back(e.i);
    }
    std::vector<TreeEdge> edges;
    std::vector<char> seen(std::size_t(p), 0);
    std::queue<int> frontier;
    frontier.push(root);
    seen[std::size_t(root)] = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v : adj[std::size_t(u)]) {
            if (seen[std::size_t(v)]) continue;
            seen[std::size_t(v)] = 1;
            // table.mu(u, v) is the mean of y_v - y_u
            edges.push_back({u, v, table.kappa(u, v), Angle(table.mu(u, v))});
            frontier.push(v);
        }
    }
    return TreeModel(root, std::move(edges));
}

TreeModel fit_chow_liu(const PhaseDataset& d, int root)
{
    if (d.p() < 2) throw std::invalid_argument("fit_chow_liu: p must be >= 2");
    if (root < 0 || root >= d.p()) throw std::invalid_argument("fit_chow_liu: root out of range");
    const auto table = fit_pairwise(d);
    const auto tree = max_spanning_tree(table.mi_values, table.p);
    return orient_tree(tree, table, root);
}

double tree_log_likelihood(std::span<const double> y, const TreeModel& t)
{
    if (y.size() != std::size_t(t.p())) throw std::invalid_argument("tree_log_likelihood: sample length != p");
    double ll = -kLogTwoPi;
    for (std::size_t q = 0; q < t.edges_.size(); ++q) {
        const auto& e = t.edges_[q];
        const double d = y[std::size_t(e.child)] - y[std::size_t(e.parent)];
        ll += e.kappa * std::cos(d - e.mu.radians()) - t.log_norm_[q];
    }
    return ll;
}

double tree_log_likelihood(const PhaseDataset& d, const TreeModel& t)
{
    if (d.p() != t.p()) throw std::invalid_argument("tree_log_likelihood: node counts differ");
    return kernels::blocked_sum(d.n(), [&](std::size_t k) { return tree_log_likelihood(d.row(k), t); });
}

} // namespace phasefield
