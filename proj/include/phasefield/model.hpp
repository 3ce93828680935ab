#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phasefield/circular.hpp"
#include "phasefield/rng.hpp"

namespace phasefield {

/// Undirected edge in canonical orientation (i < j).
struct Edge {
    int i = 0;
    int j = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Node count plus a lexicographically sorted set of canonical edges.
class GraphStructure {
public:
    GraphStructure() = default;
    /// Edges may be given in either orientation; they are canonicalized and
    /// sorted. Self-loops, duplicates and out-of-range indices throw.
    GraphStructure(int p, std::vector<Edge> edges);

    int p() const noexcept { return p_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool has_edge(int a, int b) const;
    /// Index of the edge {a, b} in edges(), or -1.
    int edge_index(int a, int b) const;
    std::vector<int> neighbors(int u) const;

    friend bool operator==(const GraphStructure&, const GraphStructure&) = default;

private:
    int p_ = 0;
    std::vector<Edge> edges_;
};

struct EdgeCoupling {
    double kappa = 0.0;
    Angle mu;
};

struct NaturalEdgeParams {
    double theta_c = 0.0;
    double theta_s = 0.0;
};

NaturalEdgeParams to_natural(const EdgeCoupling& e);
/// (0, 0) maps to kappa = 0, mu = 0.
EdgeCoupling from_natural(const NaturalEdgeParams& t);

/// Pairwise phase-coupling model: energy sum_(i,j) kappa_ij cos(y_j - y_i - mu_ij)
/// with couplings stored per canonical edge.
class GraphModel {
public:
    GraphModel() = default;
    explicit GraphModel(int p) : structure_(p, {}) {}
    /// `couplings` are indexed like `structure.edges()` and oriented i -> j.
    GraphModel(GraphStructure structure, std::vector<EdgeCoupling> couplings);

    /// Coupling between a and b in orientation a -> b (mu is negated if a > b).
    static GraphModel from_oriented(int p, const std::vector<std::pair<Edge, EdgeCoupling>>& edges);

    int p() const noexcept { return structure_.p(); }
    const GraphStructure& structure() const noexcept { return structure_; }
    const std::vector<EdgeCoupling>& couplings() const noexcept { return couplings_; }
    std::vector<NaturalEdgeParams> natural() const;

private:
    GraphStructure structure_;
    std::vector<EdgeCoupling> couplings_;
};

/// n samples x p nodes of phases, row-major, every entry in [-pi, pi).
class PhaseDataset {
public:
    PhaseDataset() = default;
    PhaseDataset(std::size_t n, int p);
    /// Wraps every value into [-pi, pi).
    PhaseDataset(std::size_t n, int p, std::vector<double> values);

    std::size_t n() const noexcept { return n_; }
    int p() const noexcept { return p_; }
    std::span<const double> row(std::size_t k) const { return {values_.data() + k * p_, std::size_t(p_)}; }
    double at(std::size_t k, int node) const { return values_[k * p_ + node]; }
    void set(std::size_t k, int node, double radians) { values_[k * p_ + node] = wrap(radians); }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Rows of `parts` stacked in order. All parts must share p.
    static PhaseDataset concat(std::span<const PhaseDataset> parts);
    PhaseDataset slice(std::size_t first, std::size_t count) const;

private:
    std::size_t n_ = 0;
    int p_ = 0;
    std::vector<double> values_;
};

/// Per-edge (cos, sin) of y_j - y_i, indexed like g.edges().
struct SufficientStats {
    std::vector<double> c;
    std::vector<double> s;
};

SufficientStats suff_stats(std::span<const double> y, const GraphStructure& g);

double unnorm_log_density(std::span<const double> y, const GraphModel& m);

/// Energy through the natural parameterization, <theta, phi(y)>.
double natural_energy(std::span<const double> y, const GraphModel& m);

/// Conditional of node u given the remaining coordinates of `y` (y[u] is ignored).
VonMisesParams conditional_params(int u, std::span<const double> y, const GraphModel& m);

/// Oriented incidence list used by samplers: for node u, each neighbor k with
/// the offset oriented so that the local term is kappa cos(y_u - (y_k - offset)).
struct Neighbor {
    int node = 0;
    double kappa = 0.0;
    double offset = 0.0;
};
std::vector<std::vector<Neighbor>> incidence(const GraphModel& m);

struct LogPartitionEstimate {
    double log_z = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo log Z = log((2 pi)^p mean exp(energy)) under uniform draws,
/// with the jackknife standard error of the log estimate. Draws are sharded
/// into fixed blocks with derived streams, so the result does not depend on
/// the number of threads.
LogPartitionEstimate mc_log_partition(const GraphModel& m, std::size_t n_mc, Rng& rng);

} // namespace phasefield
