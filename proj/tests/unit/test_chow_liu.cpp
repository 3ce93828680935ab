#include <doctest.h>

#include <cmath>
#include <vector>

#include "phasefield/chow_liu.hpp"
#include "phasefield/graphs.hpp"
#include "phasefield/sampler.hpp"

using namespace phasefield;

TEST_CASE("max_spanning_tree beats every labelled tree (Cayley enumeration)")
{
    const int p = 5;
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> w(std::size_t(p * p), 0.0);
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) w[std::size_t(i * p + j)] = w[std::size_t(j * p + i)] = rng.uniform();
        auto weight = [&](const std::vector<Edge>& es) {
            double s = 0.0;
            for (const auto& e : es) s += w[std::size_t(e.i * p + e.j)];
            return s;
        };
        double best = -1.0;
        int count = 0;
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                for (int c = 0; c < p; ++c) {
                    best = std::max(best, weight(tree_from_prufer({a, b, c}).edges()));
                    ++count;
                }
        CHECK(count == 125);
        const auto mst = max_spanning_tree(w, p);
        CHECK(mst.size() == std::size_t(p - 1));
        CHECK(weight(mst) == doctest::Approx(best).epsilon(1e-14));
    }
}

TEST_CASE("pairwise table symmetries and agreement with vm_mle")
{
    const auto m = uniform_coupling(tree_from_prufer({1, 1}), 1.5, 0.4);
    const auto d = gibbs_sample(m, 3000, {2000, 1, 5});
    const auto t = fit_pairwise(d);
    const auto s = fit_pairwise_serial(d);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            CHECK(t.kappa(i, j) == doctest::Approx(t.kappa(j, i)));
            CHECK(t.mi(i, j) == doctest::Approx(t.mi(j, i)));
            CHECK(std::abs(std::remainder(t.mu(i, j) + t.mu(j, i), kTwoPi)) < 1e-12);
            CHECK(t.kappa(i, j) == doctest::Approx(s.kappa(i, j)).epsilon(1e-10));
            std::vector<double> diff(d.n());
            for (std::size_t k = 0; k < d.n(); ++k) diff[k] = d.at(k, j) - d.at(k, i);
            const auto fit = vm_mle(diff);
            CHECK(t.kappa(i, j) == doctest::Approx(fit.params.kappa).epsilon(1e-9));
            CHECK(t.mi(i, j) == doctest::Approx(mi_from_kappa(fit.params.kappa)).epsilon(1e-9));
        }
}

TEST_CASE("fit_chow_liu recovers a random tree")
{
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const auto g = random_tree(8, rng);
        const auto d = gibbs_sample(uniform_coupling(g, 1.0), 1000, {10000, 1, rng.next_u64()});
        const auto tree = fit_chow_liu(d, 0);
        CHECK(tree.structure() == g);
        CHECK(tree.root() == 0);
        CHECK(tree.parents()[0] == -1);
        for (const auto& e : tree.edges()) CHECK(e.kappa == doctest::Approx(1.0).epsilon(0.25));
    }
}

TEST_CASE("tree log-likelihood is a sum of von Mises conditionals")
{
    const TreeModel t(1, {{1, 0, 2.0, Angle(0.5)}, {1, 2, 0.7, Angle(-1.0)}, {2, 3, 1.2, Angle(2.0)}});
    const std::vector<double> y{0.3, -1.2, 2.0, -2.9};
    const double want = -std::log(kTwoPi) + vm_log_density(Angle(y[0]), {Angle(y[1] + 0.5), 2.0}) +
                        vm_log_density(Angle(y[2]), {Angle(y[1] - 1.0), 0.7}) +
                        vm_log_density(Angle(y[3]), {Angle(y[2] + 2.0), 1.2});
    CHECK(tree_log_likelihood(y, t) == doctest::Approx(want).epsilon(1e-13));

    // the density is the same from any root
    for (int r = 0; r < 4; ++r) CHECK(tree_log_likelihood(y, t.rerooted(r)) == doctest::Approx(want).epsilon(1e-12));

    // on a tree the partition function factorizes edge by edge
    const auto g = t.as_graph_model();
    const double log_z = 4.0 * std::log(kTwoPi) + log_bessel_i0(2.0) + log_bessel_i0(0.7) + log_bessel_i0(1.2);
    CHECK(unnorm_log_density(y, g) - log_z == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("TreeModel rejects malformed edge lists")
{
    CHECK_THROWS(TreeModel(0, {{0, 1, 1.0, Angle(0.0)}, {2, 1, 1.0, Angle(0.0)}}));
    CHECK_THROWS(TreeModel(0, {{0, 1, -1.0, Angle(0.0)}}));
    CHECK_THROWS(TreeModel(5, {{0, 1, 1.0, Angle(0.0)}}));
}
