#pragma once

#include <span>
#include <vector>

#include "phasefield/model.hpp"

namespace phasefield {

/// Pairwise von Mises fits of y_j - y_i for every ordered pair, stored as
/// dense p x p tables (diagonal unused). kappa and mi are symmetric, mu is
/// antisymmetric: mu(j, i) == wrap(-mu(i, j)).
struct PairwiseTable {
    int p = 0;
    std::vector<double> kappa_values;
    std::vector<double> mu_values;
    std::vector<double> mi_values;
    std::vector<char> degenerate_flags;

    double kappa(int i, int j) const { return kappa_values[std::size_t(i) * p + j]; }
    double mu(int i, int j) const { return mu_values[std::size_t(i) * p + j]; }
    double mi(int i, int j) const { return mi_values[std::size_t(i) * p + j]; }
    bool degenerate(int i, int j) const { return degenerate_flags[std::size_t(i) * p + j] != 0; }
};

struct TreeEdge {
    int parent = 0;
    int child = 0;
    double kappa = 0.0;
    /// Mean of y_child - y_parent.
    Angle mu;
};

/// Rooted dependence tree: uniform root marginal and one von Mises
/// conditional per non-root node, y_child | y_parent ~ VM(y_parent + mu, kappa).
class TreeModel {
public:
    TreeModel() = default;
    /// Edges must form a spanning tree of p = edges.size() + 1 nodes oriented
    /// away from `root`; they are stored in breadth-first order.
    TreeModel(int root, std::vector<TreeEdge> edges);

    int p() const noexcept { return int(edges_.size()) + 1; }
    int root() const noexcept { return root_; }
    const std::vector<TreeEdge>& edges() const noexcept { return edges_; }
    /// parent[i], or -1 for the root.
    const std::vector<int>& parents() const noexcept { return parent_; }
    GraphStructure structure() const;
    /// Same distribution viewed as a pairwise model (energy of the conditionals).
    GraphModel as_graph_model() const;
    /// Re-rooted copy. Edge parameters flip orientation where needed.
    TreeModel rerooted(int new_root) const;

private:
    int root_ = 0;
    std::vector<TreeEdge> edges_;
    std::vector<int> parent_;
    std::vector<double> log_norm_;
    friend double tree_log_likelihood(std::span<const double>, const TreeModel&);
};

PairwiseTable fit_pairwise(const PhaseDataset& d);

/// Pairwise fits via the serial reference kernel.
PairwiseTable fit_pairwise_serial(const PhaseDataset& d);

/// Kruskal maximum spanning tree over a dense symmetric p x p weight matrix.
/// Equal weights are broken by lexicographic (i, j) order.
std::vector<Edge> max_spanning_tree(std::span<const double> weights, int p);

TreeModel fit_chow_liu(const PhaseDataset& d, int root = 0);

/// Roots an undirected spanning tree and attaches parent -> child parameters from `table`.
TreeModel orient_tree(const std::vector<Edge>& tree, const PairwiseTable& table, int root);

double tree_log_likelihood(std::span<const double> y, const TreeModel& t);

/// Sum of tree_log_likelihood over every row of d.
double tree_log_likelihood(const PhaseDataset& d, const TreeModel& t);

} // namespace phasefield
