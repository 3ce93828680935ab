#include "phasefield/iso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace phasefield {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace

NodeProblem NodeProblem::full(int u, int p)
{
    if (u < 0 || u >= p) throw std::invalid_argument("NodeProblem: node out of range");
    NodeProblem np{u, p, {}};
    for (int k = 0; k < p; ++k)
        if (k != u) np.neighbors.push_back(k);
    return np;
}

NodeProblem NodeProblem::restricted(int u, int p, std::vector<int> neighbors)
{
    if (u < 0 || u >= p) throw std::invalid_argument("NodeProblem: node out of range");
    std::sort(neighbors.begin(), neighbors.end());
    for (std::size_t q = 0; q < neighbors.size(); ++q) {
        if (neighbors[q] == u || neighbors[q] < 0 || neighbors[q] >= p || (q > 0 && neighbors[q] == neighbors[q - 1]))
            throw std::invalid_argument("NodeProblem: invalid neighbor list");
    }
    return NodeProblem{u, p, std::move(neighbors)};
}

IsoDesign::IsoDesign(const NodeProblem& problem, const PhaseDataset& d) : problem_(problem), n_(d.n())
{
    if (d.p() != problem.p) throw std::invalid_argument("IsoDesign: dataset node count != problem p");
    const std::size_t dim = problem.dim();
    features_.resize(n_ * dim);
    const int u = problem.u;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < std::ptrdiff_t(n_); ++k) {
        double* row = features_.data() + std::size_t(k) * dim;
        const double yu = d.at(std::size_t(k), u);
        for (std::size_t q = 0; q < problem.neighbors.size(); ++q) {
            const int nb = problem.neighbors[q];
            const double yk = d.at(std::size_t(k), nb);
            const double diff = u < nb ? yk - yu : yu - yk;
            row[2 * q] = std::cos(diff);
            row[2 * q + 1] = std::sin(diff);
        }
    }
}

double iso_objective(const NodeProblem& problem, std::span<const double> theta, const PhaseDataset& d)
{
    if (theta.size() != problem.dim()) throw std::invalid_argument("iso_objective: parameter length != 2(p-1)");
    const IsoDesign design(problem, d);
    return kernels::omp::iso_objective(design.view(), theta);
}

std::vector<double> iso_gradient(const NodeProblem& problem, std::span<const double> theta, const PhaseDataset& d)
{
    if (theta.size() != problem.dim()) throw std::invalid_argument("iso_gradient: parameter length != 2(p-1)");
    const IsoDesign design(problem, d);
    return kernels::omp::iso_eval(design.view(), theta).gradient;
}

double lambda_default(int p, std::size_t n, double eps, LambdaMode mode)
{
    if (p < 1 || n < 1) throw std::invalid_argument("lambda_default: p and n must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("lambda_default: eps must lie in (0, 1)");
    const double pp = double(p);
    const double arg = mode == LambdaMode::parameter ? 8.0 * pp / eps : 8.0 * pp * pp / eps;
    return 4.0 * std::sqrt(std::log(arg) / double(n));
}

void group_soft_threshold(std::span<double> theta, double step)
{
    for (std::size_t g = 0; g + 1 < theta.size(); g += 2) {
        const double m = std::hypot(theta[g], theta[g + 1]);
        const double scale = m > step ? (m - step) / m : 0.0;
        theta[g] *= scale;
        theta[g + 1] *= scale;
    }
}

double group_norm(std::span<const double> theta)
{
    double acc = 0.0;
    for (std::size_t g = 0; g + 1 < theta.size(); g += 2) acc += std::hypot(theta[g], theta[g + 1]);
    return acc;
}

double NodeSolution::kappa_for(int k) const
{
    const auto t = natural_for(k);
    return std::hypot(t.theta_c, t.theta_s);
}

NaturalEdgeParams NodeSolution::natural_for(int k) const
{
    auto it = std::lower_bound(neighbors.begin(), neighbors.end(), k);
    if (it == neighbors.end() || *it != k) return {};
    const std::size_t q = std::size_t(it - neighbors.begin());
    return {theta[2 * q], theta[2 * q + 1]};
}

NodeSolution solve_node(const IsoDesign& design, double lambda, const SolverOptions& opts, std::span<const double> start)
{
    if (!(lambda >= 0.0)) throw std::invalid_argument("solve_node: lambda must be >= 0");
    const auto view = design.view();
    const std::size_t dim = design.dim();

    NodeSolution sol;
    sol.u = design.problem().u;
    sol.neighbors = design.problem().neighbors;
    sol.lambda = lambda;
    sol.theta.assign(dim, 0.0);
    if (!start.empty()) {
        if (start.size() != dim) throw std::invalid_argument("solve_node: start length != dim");
        sol.theta.assign(start.begin(), start.end());
    }
    if (dim == 0 || design.n() == 0) {
        sol.objective_trace.push_back(design.n() == 0 ? 0.0 : 1.0);
        sol.converged = true;
        return sol;
    }

    auto penalized = [&](double smooth, std::span<const double> th) { return smooth + lambda * group_norm(th); };

    std::vector<double> x = sol.theta;
    double fx = kernels::omp::iso_objective(view, x);
    double Fx = penalized(fx, x);
    sol.objective_trace.push_back(Fx);

    std::vector<double> y = x;
    std::vector<double> z(dim);
    std::vector<double> step(dim);
    bool y_is_x = true;
    double t = 1.0;
    double lip = 1.0;

    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        sol.iterations = it;
        const auto ey = kernels::omp::iso_eval(view, y);
        if (!std::isfinite(ey.objective)) {
            // extrapolated point overflowed; fall back to the current iterate
            y = x;
            y_is_x = true;
            t = 1.0;
            continue;
        }

        double fz = 0.0;
        for (;;) {
            for (std::size_t l = 0; l < dim; ++l) z[l] = y[l] - ey.gradient[l] / lip;
            group_soft_threshold(z, lambda / lip);
            for (std::size_t l = 0; l < dim; ++l) step[l] = z[l] - y[l];
            fz = kernels::omp::iso_objective(view, z);
            const double model = ey.objective + dot(ey.gradient, step) + 0.5 * lip * dot(step, step);
            if (std::isfinite(fz) && fz <= model + 1e-14 * std::abs(ey.objective)) break;
            lip *= 2.0;
            if (lip > 1e30) break;
        }

        const double Fz = penalized(fz, z);
        const double grad_map = lip * norm2(step);
        if (!(Fz <= Fx)) {
            if (!y_is_x) {
                // momentum overshot: restart from the last accepted iterate
                y = x;
                y_is_x = true;
                t = 1.0;
                continue;
            }
            // A plain proximal step no longer decreases the objective. Its
            // decrease is about grad_map^2 / (2 lip), so once that falls under
            // the rounding noise of the objective this is the best attainable
            // iterate and the precision floor replaces the tolerance.
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(Fx);
            const double floor = std::sqrt(2.0 * lip * noise);
            sol.converged = grad_map <= std::max(opts.tol * (1.0 + norm2(x)), floor);
            break;
        }

        const double rel = std::abs(Fx - Fz) / std::max(std::abs(Fx), 1e-300);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        for (std::size_t l = 0; l < dim; ++l) y[l] = z[l] + beta * (z[l] - x[l]);
        y_is_x = beta == 0.0;
        t = t_next;
        x = z;
        fx = fz;
        Fx = Fz;
        sol.objective_trace.push_back(Fx);

        if (rel < opts.tol && grad_map < opts.tol * (1.0 + norm2(x))) {
            sol.converged = true;
            break;
        }
        lip *= 0.8;
    }
    sol.theta = x;
    return sol;
}

NodeSolution solve_node(const NodeProblem& problem, const PhaseDataset& d, double lambda, const SolverOptions& opts)
{
    const IsoDesign design(problem, d);
    return solve_node(design, lambda, opts);
}

StructureEstimate recover_structure(const PhaseDataset& d, const StructureOptions& opts)
{
    const int p = d.p();
    if (p < 2) throw std::invalid_argument("recover_structure: p must be >= 2");
    const double lambda = opts.lambda ? *opts.lambda : lambda_default(p, d.n(), opts.eps, LambdaMode::structure);

    StructureEstimate est;
    est.solution.lambda = lambda;
    est.solution.nodes.resize(std::size_t(p));
#pragma omp parallel for schedule(dynamic)
    for (int u = 0; u < p; ++u) {
        const IsoDesign design(NodeProblem::full(u, p), d);
        est.solution.nodes[std::size_t(u)] = solve_node(design, lambda, opts.solver);
    }

    est.kappa_hat.assign(std::size_t(p) * p, 0.0);
    for (int u = 0; u < p; ++u) {
        const auto& node = est.solution.nodes[std::size_t(u)];
        est.solution.all_converged = est.solution.all_converged && node.converged;
        for (int k = 0; k < p; ++k)
            if (k != u) est.kappa_hat[std::size_t(u) * p + k] = node.kappa_for(k);
    }
    std::vector<Edge> edges;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const double k = std::max(est.kappa_hat[std::size_t(i) * p + j], est.kappa_hat[std::size_t(j) * p + i]);
            if (k >= opts.threshold) edges.push_back({i, j});
        }
    }
    est.structure = GraphStructure(p, std::move(edges));
    est.reliable = est.solution.all_converged;
    return est;
}

RefitResult refit_unregularized(const PhaseDataset& d, const GraphStructure& g, const SolverOptions& opts)
{
    const int p = g.p();
    if (d.p() != p) throw std::invalid_argument("refit_unregularized: node counts differ");
    RefitResult out;
    out.nodes.resize(std::size_t(p));
    if (g.edge_count() == 0) {
        out.model = GraphModel(p);
        return out;
    }
#pragma omp parallel for schedule(dynamic)
    for (int u = 0; u < p; ++u) {
        auto nbrs = g.neighbors(u);
        if (nbrs.empty()) {
            out.nodes[std::size_t(u)].u = u;
            out.nodes[std::size_t(u)].converged = true;
            continue;
        }
        const IsoDesign design(NodeProblem::restricted(u, p, std::move(nbrs)), d);
        out.nodes[std::size_t(u)] = solve_node(design, 0.0, opts);
    }
    std::vector<EdgeCoupling> couplings;
    for (const auto& e : g.edges()) {
        // both endpoint estimates are already in canonical (i -> j) orientation
        const auto a = out.nodes[std::size_t(e.i)].natural_for(e.j);
        const auto b = out.nodes[std::size_t(e.j)].natural_for(e.i);
        couplings.push_back(from_natural({0.5 * (a.theta_c + b.theta_c), 0.5 * (a.theta_s + b.theta_s)}));
    }
    for (const auto& node : out.nodes) out.converged = out.converged && node.converged;
    out.model = GraphModel(g, std::move(couplings));
    return out;
}

IsoFit fit_iso(const PhaseDataset& d, const StructureOptions& opts)
{
    IsoFit fit;
    fit.structure = recover_structure(d, opts);
    fit.refit = refit_unregularized(d, fit.structure.structure, opts.solver);
    return fit;
}

IsoDiagnostics empirical_correlation(const NodeProblem& problem, const PhaseDataset& d)
{
    if (d.n() < 1) throw std::invalid_argument("empirical_correlation: empty dataset");
    const IsoDesign design(problem, d);
    IsoDiagnostics diag;
    diag.dim = design.dim();
    diag.h = kernels::omp::correlation(design.view());
    if (diag.dim > 0) {
        const Eigen::Map<const Eigen::MatrixXd> h(diag.h.data(), Eigen::Index(diag.dim), Eigen::Index(diag.dim));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
        diag.min_eigenvalue = solver.eigenvalues().minCoeff();
    }
    return diag;
}

} // namespace phasefield
