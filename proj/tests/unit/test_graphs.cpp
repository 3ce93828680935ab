#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include "phasefield/graphs.hpp"

using namespace phasefield;

namespace {

bool is_spanning_tree(const GraphStructure& g)
{
    if (g.edge_count() != std::size_t(g.p() - 1)) return false;
    std::vector<int> parent(std::size_t(g.p()));
    for (int u = 0; u < g.p(); ++u) parent[std::size_t(u)] = u;
    auto find = [&](int x) {
        while (parent[std::size_t(x)] != x) x = parent[std::size_t(x)];
        return x;
    };
    for (const auto& e : g.edges()) {
        const int a = find(e.i), b = find(e.j);
        if (a == b) return false;
        parent[std::size_t(a)] = b;
    }
    return true;
}

} // namespace

TEST_CASE("Prufer decoding of a known sequence")
{
    // sequence (3, 3, 3, 4) on 6 nodes: star around 3 plus 4-5
    const auto g = tree_from_prufer({3, 3, 3, 4});
    CHECK(g.edges() == std::vector<Edge>{{0, 3}, {1, 3}, {2, 3}, {3, 4}, {4, 5}});
    CHECK_THROWS(tree_from_prufer({7, 0}));
}

TEST_CASE("random_tree is a spanning tree and uniform over labelled trees")
{
    Rng rng(1);
    // Cayley: 4^2 = 16 labelled trees on 4 nodes
    std::map<std::vector<Edge>, int> seen;
    const int draws = 16000;
    for (int t = 0; t < draws; ++t) {
        const auto g = random_tree(4, rng);
        REQUIRE(is_spanning_tree(g));
        ++seen[g.edges()];
    }
    CHECK(seen.size() == 16);
    for (const auto& [edges, count] : seen) CHECK(std::abs(count - draws / 16) < 5 * 31);
    for (int p : {2, 3, 9, 30}) CHECK(is_spanning_tree(random_tree(p, rng)));
}

TEST_CASE("toroidal grid is four-regular")
{
    for (auto [r, c] : {std::pair{3, 3}, std::pair{4, 5}, std::pair{6, 6}}) {
        const auto g = toroidal_grid(r, c);
        CHECK(g.p() == r * c);
        CHECK(g.edge_count() == std::size_t(2 * r * c));
        for (int u = 0; u < g.p(); ++u) CHECK(g.neighbors(u).size() == 4);
    }
    const auto g = toroidal_grid(3, 3);
    CHECK(g.has_edge(0, 2));
    CHECK(g.has_edge(0, 6));
    CHECK(g.has_edge(4, 5));
    CHECK_FALSE(g.has_edge(0, 4));
    // side 2: wrapped and direct neighbour coincide
    const auto small = toroidal_grid(2, 3);
    CHECK(small.has_edge(0, 3));
    CHECK(small.neighbors(0).size() == 3);
    CHECK_THROWS(toroidal_grid(1, 4));
}

TEST_CASE("uniform_coupling assigns every edge")
{
    const auto m = uniform_coupling(toroidal_grid(3, 3), 0.7, 0.2);
    for (const auto& c : m.couplings()) {
        CHECK(c.kappa == 0.7);
        CHECK(c.mu.radians() == doctest::Approx(0.2));
    }
}
