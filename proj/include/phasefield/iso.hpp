#pragma once

// Interaction screening: per-node convex surrogate objectives, a group-lasso
// proximal solver, structure recovery and the unregularized refit.
//
// Parameters of node u are laid out as (theta_c, theta_s) pairs, one pair per
// candidate neighbor in ascending index order. Each pair belongs to the edge
// in canonical orientation (min(u,k), max(u,k)), matching GraphModel, so the
// feature of edge (i, j) is (cos(y_j - y_i), sin(y_j - y_i)).

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "phasefield/kernels.hpp"
#include "phasefield/model.hpp"

namespace phasefield {

struct NodeProblem {
    int u = 0;
    int p = 0;
    /// Candidate neighbors, strictly ascending, never containing u.
    std::vector<int> neighbors;

    /// All p - 1 candidate edges.
    static NodeProblem full(int u, int p);
    static NodeProblem restricted(int u, int p, std::vector<int> neighbors);

    std::size_t dim() const noexcept { return 2 * neighbors.size(); }
};

/// Precomputed n x dim feature matrix of a node problem.
class IsoDesign {
public:
    IsoDesign(const NodeProblem& problem, const PhaseDataset& d);

    const NodeProblem& problem() const noexcept { return problem_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t dim() const noexcept { return problem_.dim(); }
    kernels::FeatureView view() const { return {features_, n_, problem_.dim()}; }

private:
    NodeProblem problem_;
    std::size_t n_ = 0;
    std::vector<double> features_;
};

double iso_objective(const NodeProblem& problem, std::span<const double> theta, const PhaseDataset& d);
std::vector<double> iso_gradient(const NodeProblem& problem, std::span<const double> theta, const PhaseDataset& d);

enum class LambdaMode { parameter, structure };

/// parameter: 4 sqrt(ln(8p/eps)/n); structure: 4 sqrt(ln(8p^2/eps)/n).
double lambda_default(int p, std::size_t n, double eps, LambdaMode mode);

/// Proximal map of step * sum_g ||theta_g||_2 over consecutive 2-vectors:
/// each group keeps its direction and has magnitude max(|g| - step, 0).
void group_soft_threshold(std::span<double> theta, double step);

/// Sum of the Euclidean norms of consecutive 2-vectors.
double group_norm(std::span<const double> theta);

struct SolverOptions {
    double tol = 1e-9;
    std::size_t max_iter = 20000;
};

struct NodeSolution {
    int u = 0;
    std::vector<int> neighbors;
    std::vector<double> theta;
    /// Penalized objective after every accepted step, starting at the initial point.
    std::vector<double> objective_trace;
    double lambda = 0.0;
    std::size_t iterations = 0;
    bool converged = false;

    /// Estimated coupling to neighbor k (0 if k is not a candidate).
    double kappa_for(int k) const;
    NaturalEdgeParams natural_for(int k) const;
};

/// Minimizes S_n(theta) + lambda * sum_k ||(theta_c, theta_s)_k||_2 by
/// accelerated proximal gradient with backtracking and restart on
/// objective increase. On max_iter the best iterate is returned unconverged.
NodeSolution solve_node(const IsoDesign& design, double lambda, const SolverOptions& opts = {},
                        std::span<const double> start = {});
NodeSolution solve_node(const NodeProblem& problem, const PhaseDataset& d, double lambda,
                        const SolverOptions& opts = {});

struct IsoSolution {
    std::vector<NodeSolution> nodes;
    double lambda = 0.0;
    bool all_converged = true;
};

struct StructureOptions {
    /// Penalty; defaults to lambda_default(p, n, eps, structure).
    std::optional<double> lambda;
    double eps = 0.05;
    /// Edge declared when max of the two endpoint estimates >= threshold.
    double threshold = 0.5;
    SolverOptions solver;
};

struct StructureEstimate {
    GraphStructure structure;
    /// kappa_hat[u * p + k]: coupling to k estimated from node u's problem.
    std::vector<double> kappa_hat;
    IsoSolution solution;
    /// False when any node problem did not converge.
    bool reliable = true;

    double kappa_from(int u, int k) const { return kappa_hat[std::size_t(u) * structure.p() + k]; }
};

StructureEstimate recover_structure(const PhaseDataset& d, const StructureOptions& opts = {});

struct RefitResult {
    GraphModel model;
    std::vector<NodeSolution> nodes;
    bool converged = true;
};

/// lambda = 0 solves restricted to the declared edges; the two endpoint
/// estimates of each edge are averaged in natural coordinates.
RefitResult refit_unregularized(const PhaseDataset& d, const GraphStructure& g, const SolverOptions& opts = {});

struct IsoFit {
    StructureEstimate structure;
    RefitResult refit;
};

/// Two-step fit: regularized structure recovery, then the unregularized refit.
IsoFit fit_iso(const PhaseDataset& d, const StructureOptions& opts = {});

struct IsoDiagnostics {
    std::size_t dim = 0;
    /// Row-major dim x dim.
    std::vector<double> h;
    double min_eigenvalue = 0.0;
};

/// (1/n) sum_k t_k t_k^T over the node's features, with its smallest eigenvalue.
IsoDiagnostics empirical_correlation(const NodeProblem& problem, const PhaseDataset& d);

} // namespace phasefield
