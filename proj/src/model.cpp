#include "phasefield/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "phasefield/kernels.hpp"

namespace phasefield {

GraphStructure::GraphStructure(int p, std::vector<Edge> edges) : p_(p), edges_(std::move(edges))
{
    if (p < 0) throw std::invalid_argument("GraphStructure: negative node count");
    for (auto& e : edges_) {
        if (e.i == e.j) throw std::invalid_argument("GraphStructure: self-loop at node " + std::to_string(e.i));
        if (e.i < 0 || e.j < 0 || e.i >= p || e.j >= p)
            throw std::invalid_argument("GraphStructure: edge index out of range");
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw std::invalid_argument("GraphStructure: duplicate edge");
}

int GraphStructure::edge_index(int a, int b) const
{
    const Edge key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key) return -1;
    return int(it - edges_.begin());
}

bool GraphStructure::has_edge(int a, int b) const { return edge_index(a, b) >= 0; }

std::vector<int> GraphStructure::neighbors(int u) const
{
    std::vector<int> out;
    for (const auto& e : edges_) {
        if (e.i == u) out.push_back(e.j);
        if (e.j == u) out.push_back(e.i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

NaturalEdgeParams to_natural(const EdgeCoupling& e)
{
    return {e.kappa * std::cos(e.mu.radians()), e.kappa * std::sin(e.mu.radians())};
}

EdgeCoupling from_natural(const NaturalEdgeParams& t)
{
    const double kappa = std::hypot(t.theta_c, t.theta_s);
    if (kappa == 0.0) return {0.0, Angle(0.0)};
    return {kappa, Angle(std::atan2(t.theta_s, t.theta_c))};
}

GraphModel::GraphModel(GraphStructure structure, std::vector<EdgeCoupling> couplings)
    : structure_(std::move(structure)), couplings_(std::move(couplings))
{
    if (couplings_.size() != structure_.edge_count())
        throw std::invalid_argument("GraphModel: one coupling per edge required");
    for (const auto& c : couplings_)
        if (!(c.kappa >= 0.0) || !std::isfinite(c.kappa))
            throw std::invalid_argument("GraphModel: kappa must be finite and >= 0");
}

GraphModel GraphModel::from_oriented(int p, const std::vector<std::pair<Edge, EdgeCoupling>>& edges)
{
    std::vector<Edge> es;
    for (const auto& [e, c] : edges) es.push_back(e);
    GraphStructure g(p, es);
    std::vector<EdgeCoupling> cs(g.edge_count());
    for (const auto& [e, c] : edges) {
        const int idx = g.edge_index(e.i, e.j);
        cs[std::size_t(idx)] = e.i < e.j ? c : EdgeCoupling{c.kappa, Angle(-c.mu.radians())};
    }
    return GraphModel(std::move(g), std::move(cs));
}

std::vector<NaturalEdgeParams> GraphModel::natural() const
{
    std::vector<NaturalEdgeParams> out;
    out.reserve(couplings_.size());
    for (const auto& c : couplings_) out.push_back(to_natural(c));
    return out;
}

PhaseDataset::PhaseDataset(std::size_t n, int p) : n_(n), p_(p), values_(n * std::size_t(p), 0.0) {}

PhaseDataset::PhaseDataset(std::size_t n, int p, std::vector<double> values)
    : n_(n), p_(p), values_(std::move(values))
{
    if (values_.size() != n * std::size_t(p)) throw std::invalid_argument("PhaseDataset: value count != n * p");
    for (double& v : values_) v = wrap(v);
}

PhaseDataset PhaseDataset::concat(std::span<const PhaseDataset> parts)
{
    if (parts.empty()) return {};
    const int p = parts.front().p();
    std::vector<double> values;
    std::size_t n = 0;
    for (const auto& d : parts) {
        if (d.p() != p) throw std::invalid_argument("PhaseDataset::concat: node counts differ");
        values.insert(values.end(), d.values_.begin(), d.values_.end());
        n += d.n();
    }
    PhaseDataset out;
    out.n_ = n;
    out.p_ = p;
    out.values_ = std::move(values);
    return out;
}

PhaseDataset PhaseDataset::slice(std::size_t first, std::size_t count) const
{
    if (first + count > n_) throw std::out_of_range("PhaseDataset::slice");
    PhaseDataset out;
    out.n_ = count;
    out.p_ = p_;
    out.values_.assign(values_.begin() + std::ptrdiff_t(first * p_), values_.begin() + std::ptrdiff_t((first + count) * p_));
    return out;
}

SufficientStats suff_stats(std::span<const double> y, const GraphStructure& g)
{
    if (y.size() != std::size_t(g.p())) throw std::invalid_argument("suff_stats: sample length != p");
    SufficientStats out;
    out.c.reserve(g.edge_count());
    out.s.reserve(g.edge_count());
    for (const auto& e : g.edges()) {
        const double d = y[std::size_t(e.j)] - y[std::size_t(e.i)];
        out.c.push_back(std::cos(d));
        out.s.push_back(std::sin(d));
    }
    return out;
}

double unnorm_log_density(std::span<const double> y, const GraphModel& m)
{
    const auto& edges = m.structure().edges();
    const auto& cs = m.couplings();
    double acc = 0.0;
    for (std::size_t q = 0; q < edges.size(); ++q) {
        const double d = y[std::size_t(edges[q].j)] - y[std::size_t(edges[q].i)];
        acc += cs[q].kappa * std::cos(d - cs[q].mu.radians());
    }
    return acc;
}

double natural_energy(std::span<const double> y, const GraphModel& m)
{
    const auto stats = suff_stats(y, m.structure());
    const auto theta = m.natural();
    double acc = 0.0;
    for (std::size_t q = 0; q < theta.size(); ++q) acc += theta[q].theta_c * stats.c[q] + theta[q].theta_s * stats.s[q];
    return acc;
}

std::vector<std::vector<Neighbor>> incidence(const GraphModel& m)
{
    std::vector<std::vector<Neighbor>> adj(std::size_t(m.p()));
    const auto& edges = m.structure().edges();
    for (std::size_t q = 0; q < edges.size(); ++q) {
        const auto& c = m.couplings()[q];
        // kappa cos(y_j - y_i - mu) = kappa cos(y_i - (y_j - mu)) = kappa cos(y_j - (y_i + mu))
        adj[std::size_t(edges[q].i)].push_back({edges[q].j, c.kappa, c.mu.radians()});
        adj[std::size_t(edges[q].j)].push_back({edges[q].i, c.kappa, -c.mu.radians()});
    }
    return adj;
}

VonMisesParams conditional_params(int u, std::span<const double> y, const GraphModel& m)
{
    if (u < 0 || u >= m.p()) throw std::invalid_argument("conditional_params: node out of range");
    std::complex<double> z{0.0, 0.0};
    const auto& edges = m.structure().edges();
    for (std::size_t q = 0; q < edges.size(); ++q) {
        const auto& c = m.couplings()[q];
        if (edges[q].i == u)
            z += std::polar(c.kappa, y[std::size_t(edges[q].j)] - c.mu.radians());
        else if (edges[q].j == u)
            z += std::polar(c.kappa, y[std::size_t(edges[q].i)] + c.mu.radians());
    }
    const double a = std::abs(z);
    if (a == 0.0) return {Angle(0.0), 0.0};
    return {Angle(std::arg(z)), a};
}

LogPartitionEstimate mc_log_partition(const GraphModel& m, std::size_t n_mc, Rng& rng)
{
    if (n_mc < 1000) throw std::invalid_argument("mc_log_partition: n_mc must be >= 1000");
    const double base = double(m.p()) * kLogTwoPi;
    if (m.structure().edge_count() == 0) return {base, 0.0};

    const auto energies = kernels::omp::mc_energies(m, n_mc, rng.next_u64());
    const double mx = *std::max_element(energies.begin(), energies.end());
    std::vector<double> w(n_mc);
    double total = 0.0;
    for (std::size_t k = 0; k < n_mc; ++k) {
        w[k] = std::exp(energies[k] - mx);
        total += w[k];
    }
    const double n = double(n_mc);
    const double log_mean = mx + std::log(total / n);

    // leave-one-out estimates of log mean exp(energy)
    double loo_mean = 0.0;
    std::vector<double> loo(n_mc);
    for (std::size_t k = 0; k < n_mc; ++k) {
        loo[k] = mx + std::log((total - w[k]) / (n - 1.0));
        loo_mean += loo[k];
    }
    loo_mean /= n;
    double ss = 0.0;
    for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
    const double se = std::sqrt((n - 1.0) / n * ss);
    return {base + log_mean, se};
}

} // namespace phasefield
