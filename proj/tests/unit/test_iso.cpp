#include <doctest.h>

#include <cmath>
#include <vector>

#include "phasefield/graphs.hpp"
#include "phasefield/iso.hpp"
#include "phasefield/sampler.hpp"

using namespace phasefield;

namespace {

// Natural parameters of node u's local energy under m, in NodeProblem::full layout.
std::vector<double> true_theta(const GraphModel& m, int u)
{
    const auto prob = NodeProblem::full(u, m.p());
    std::vector<double> theta(prob.dim(), 0.0);
    const auto nat = m.natural();
    for (std::size_t g = 0; g < prob.neighbors.size(); ++g) {
        const int e = m.structure().edge_index(u, prob.neighbors[g]);
        if (e < 0) continue;
        theta[2 * g] = nat[std::size_t(e)].theta_c;
        theta[2 * g + 1] = nat[std::size_t(e)].theta_s;
    }
    return theta;
}

GraphModel random_model(int p, Rng& rng)
{
    const auto g = random_tree(p, rng);
    std::vector<EdgeCoupling> c;
    for (std::size_t e = 0; e < g.edge_count(); ++e) c.push_back({rng.uniform(0.3, 1.5), Angle(rng.uniform_angle())});
    return GraphModel(g, c);
}

} // namespace

TEST_CASE("lambda schedules")
{
    CHECK(lambda_default(8, 1000, 0.05, LambdaMode::structure) ==
          doctest::Approx(4.0 * std::sqrt(std::log(8.0 * 64.0 / 0.05) / 1000.0)));
    CHECK(lambda_default(8, 1000, 0.05, LambdaMode::parameter) ==
          doctest::Approx(4.0 * std::sqrt(std::log(8.0 * 8.0 / 0.05) / 1000.0)));
    CHECK_THROWS(lambda_default(8, 1000, 0.0, LambdaMode::structure));
    CHECK_THROWS(lambda_default(8, 0, 0.1, LambdaMode::structure));
}

TEST_CASE("group prox keeps direction and shrinks magnitude")
{
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> theta(6);
        for (auto& v : theta) v = rng.uniform(-2.0, 2.0);
        const auto before = theta;
        const double step = rng.uniform(0.0, 2.0);
        group_soft_threshold(theta, step);
        for (std::size_t g = 0; g < 6; g += 2) {
            const double r0 = std::hypot(before[g], before[g + 1]);
            const double r1 = std::hypot(theta[g], theta[g + 1]);
            CHECK(std::abs(r1 - std::max(r0 - step, 0.0)) < 1e-12);
            if (r1 > 0) {
                // same direction: cross product zero, dot product positive
                CHECK(std::abs(before[g] * theta[g + 1] - before[g + 1] * theta[g]) < 1e-12);
                CHECK(before[g] * theta[g] + before[g + 1] * theta[g + 1] > 0.0);
            }
        }
    }
    std::vector<double> z{0.0, 0.0};
    group_soft_threshold(z, 1.0);
    CHECK(z == std::vector<double>{0.0, 0.0});
    CHECK(group_norm(std::vector<double>{3.0, 4.0, 0.0, -1.0}) == doctest::Approx(6.0));
}

TEST_CASE("iso_gradient matches central differences")
{
    Rng rng(8);
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int p = 3 + int(rng.below(4));
        const auto m = random_model(p, rng);
        const auto d = gibbs_sample(m, 400, {500, 1, rng.next_u64()});
        const int u = int(rng.below(std::uint64_t(p)));
        const auto prob = NodeProblem::full(u, p);
        std::vector<double> theta(prob.dim());
        for (auto& v : theta) v = rng.uniform(-1.0, 1.0);
        const auto grad = iso_gradient(prob, theta, d);
        const double h = 1e-5;
        for (std::size_t g = 0; g < theta.size(); ++g) {
            auto up = theta, dn = theta;
            up[g] += h;
            dn[g] -= h;
            const double fd = (iso_objective(prob, up, d) - iso_objective(prob, dn, d)) / (2 * h);
            worst = std::max(worst, std::abs(fd - grad[g]));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("objective at the true parameters has zero mean gradient")
{
    // E[t exp(-<theta*, t>)] = 0 at the generating parameters
    const auto m = uniform_coupling(toroidal_grid(2, 3), 0.8, 0.3);
    const auto d = gibbs_sample(m, 60000, {5000, 2, 3});
    for (int u = 0; u < m.p(); ++u) {
        const auto prob = NodeProblem::full(u, m.p());
        const auto grad = iso_gradient(prob, true_theta(m, u), d);
        for (double g : grad) CHECK(std::abs(g) < 0.05);
    }
}

TEST_CASE("unpenalized solve is at least as good as the generating parameters")
{
    Rng rng(12);
    for (int inst = 0; inst < 10; ++inst) {
        const int p = 4 + int(rng.below(2));
        const auto m = random_model(p, rng);
        const auto d = gibbs_sample(m, 2000, {2000, 1, rng.next_u64()});
        const int u = int(rng.below(std::uint64_t(p)));
        const auto prob = NodeProblem::full(u, p);
        const auto sol = solve_node(prob, d, 0.0);
        CHECK(sol.converged);
        CHECK(iso_objective(prob, sol.theta, d) <= iso_objective(prob, true_theta(m, u), d) + 1e-8);
        for (std::size_t k = 1; k < sol.objective_trace.size(); ++k)
            CHECK(sol.objective_trace[k] <= sol.objective_trace[k - 1]);
    }
}

TEST_CASE("penalized optimum satisfies the group subgradient conditions")
{
    Rng rng(6);
    const auto m = random_model(5, rng);
    const auto d = gibbs_sample(m, 3000, {2000, 1, 44});
    const auto prob = NodeProblem::full(2, 5);
    const double lambda = 0.1;
    const auto sol = solve_node(prob, d, lambda, {1e-10, 50000});
    REQUIRE(sol.converged);
    const auto grad = iso_gradient(prob, sol.theta, d);
    for (std::size_t g = 0; g < sol.theta.size(); g += 2) {
        const double r = std::hypot(sol.theta[g], sol.theta[g + 1]);
        if (r > 0) {
            CHECK(std::abs(grad[g] + lambda * sol.theta[g] / r) < 1e-4);
            CHECK(std::abs(grad[g + 1] + lambda * sol.theta[g + 1] / r) < 1e-4);
        } else {
            CHECK(std::hypot(grad[g], grad[g + 1]) <= lambda + 1e-6);
        }
    }
}

TEST_CASE("empirical correlation has trace p - 1")
{
    Rng rng(1);
    const auto d = gibbs_sample(random_model(6, rng), 1000, {500, 1, 2});
    for (int u = 0; u < 6; ++u) {
        const auto diag = empirical_correlation(NodeProblem::full(u, 6), d);
        double tr = 0.0;
        for (std::size_t q = 0; q < diag.dim; ++q) tr += diag.h[q * diag.dim + q];
        CHECK(tr == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(diag.min_eigenvalue > 0.0);
        CHECK(diag.min_eigenvalue <= tr / double(diag.dim));
    }
}

TEST_CASE("structure recovery: tree at n = 16000, nothing on independent data")
{
    Rng rng(31);
    const auto g = random_tree(6, rng);
    const auto d = gibbs_sample(uniform_coupling(g, 1.0), 16000, {10000, 1, 5});
    const auto est = recover_structure(d);
    CHECK(est.reliable);
    CHECK(est.structure == g);
    CHECK(est.solution.lambda == doctest::Approx(lambda_default(6, 16000, 0.05, LambdaMode::structure)));

    const auto refit = refit_unregularized(d, est.structure);
    CHECK(refit.converged);
    for (const auto& c : refit.model.couplings()) {
        CHECK(c.kappa == doctest::Approx(1.0).epsilon(0.1));
        CHECK(std::abs(c.mu.radians()) < 0.1);
    }

    const auto indep = gibbs_sample(GraphModel(6), 4000, {10, 1, 6});
    CHECK(recover_structure(indep).structure.edge_count() == 0);
}

TEST_CASE("refit averages the two endpoint estimates")
{
    const auto m = GraphModel::from_oriented(3, {{{0, 1}, {1.2, Angle(0.5)}}, {{1, 2}, {0.9, Angle(-0.4)}}});
    const auto d = gibbs_sample(m, 8000, {2000, 1, 7});
    const auto r = refit_unregularized(d, m.structure());
    REQUIRE(r.nodes.size() == 3);
    const auto& g = m.structure();
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto [i, j] = g.edges()[e];
        const auto a = r.nodes[std::size_t(i)].natural_for(j);
        const auto b = r.nodes[std::size_t(j)].natural_for(i);
        const auto want = from_natural({0.5 * (a.theta_c + b.theta_c), 0.5 * (a.theta_s + b.theta_s)});
        CHECK(r.model.couplings()[e].kappa == doctest::Approx(want.kappa).epsilon(1e-12));
        CHECK(r.model.couplings()[e].mu.radians() == doctest::Approx(want.mu.radians()).epsilon(1e-12));
    }
}
