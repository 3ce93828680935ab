#include "phasefield/graphs.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace phasefield {

GraphStructure tree_from_prufer(const std::vector<int>& seq)
{
    const int p = int(seq.size()) + 2;
    std::vector<int> degree(std::size_t(p), 1);
    for (int v : seq) {
        if (v < 0 || v >= p) throw std::invalid_argument("tree_from_prufer: entry out of range");
        ++degree[std::size_t(v)];
    }
    std::set<int> leaves;
    for (int v = 0; v < p; ++v)
        if (degree[std::size_t(v)] == 1) leaves.insert(v);

    std::vector<Edge> edges;
    for (int v : seq) {
        const int leaf = *leaves.begin();
        leaves.erase(leaves.begin());
        edges.push_back({leaf, v});
        if (--degree[std::size_t(v)] == 1) leaves.insert(v);
    }
    edges.push_back({*leaves.begin(), *leaves.rbegin()});
    return GraphStructure(p, edges);
}

GraphStructure random_tree(int p, Rng& rng)
{
    if (p < 2) throw std::invalid_argument("random_tree: p must be >= 2");
    std::vector<int> seq(std::size_t(p - 2));
    for (auto& v : seq) v = int(rng.below(std::uint64_t(p)));
    return tree_from_prufer(seq);
}

GraphStructure toroidal_grid(int rows, int cols)
{
    if (rows < 2 || cols < 2) throw std::invalid_argument("toroidal_grid: both sides must be >= 2");
    std::set<Edge> edges;
    auto add = [&](int a, int b) {
        if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
    };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int u = r * cols + c;
            add(u, r * cols + (c + 1) % cols);
            add(u, ((r + 1) % rows) * cols + c);
        }
    }
    return GraphStructure(rows * cols, {edges.begin(), edges.end()});
}

GraphModel uniform_coupling(const GraphStructure& g, double kappa, double mu)
{
    return GraphModel(g, std::vector<EdgeCoupling>(g.edge_count(), EdgeCoupling{kappa, Angle(mu)}));
}

} // namespace phasefield
