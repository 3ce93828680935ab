#include "phasefield/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace phasefield {

PhaseDataset sample_pair(double kappa, Angle mu, std::size_t n, Rng& rng)
{
    if (!(kappa >= 0.0)) throw std::invalid_argument("sample_pair: kappa must be >= 0");
    PhaseDataset d(n, 2);
    for (std::size_t k = 0; k < n; ++k) {
        const double y1 = rng.uniform_angle();
        const Angle y2 = vm_sample({Angle(y1 + mu.radians()), kappa}, rng);
        d.set(k, 0, y1);
        d.set(k, 1, y2.radians());
    }
    return d;
}

PhaseDataset gibbs_sample(const GraphModel& m, std::size_t n, const GibbsConfig& cfg)
{
    if (n < 1) throw std::invalid_argument("gibbs_sample: n must be >= 1");
    if (cfg.thin < 1) throw std::invalid_argument("gibbs_sample: thin must be >= 1");

    const int p = m.p();
    const auto adj = incidence(m);
    Rng rng(cfg.seed);
    std::vector<double> y(static_cast<std::size_t>(p));
    for (double& v : y) v = rng.uniform_angle();

    auto sweep = [&] {
        for (int u = 0; u < p; ++u) {
            double re = 0.0;
            double im = 0.0;
            for (const auto& nb : adj[std::size_t(u)]) {
                const double phase = y[std::size_t(nb.node)] - nb.offset;
                re += nb.kappa * std::cos(phase);
                im += nb.kappa * std::sin(phase);
            }
            const double a = std::hypot(re, im);
            const VonMisesParams cond = a > 0.0 ? VonMisesParams{Angle(std::atan2(im, re)), a}
                                                : VonMisesParams{Angle(0.0), 0.0};
            y[std::size_t(u)] = vm_sample(cond, rng).radians();
        }
    };

    for (std::size_t b = 0; b < cfg.burn_in; ++b) sweep();

    PhaseDataset out(n, p);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t t = 0; t < cfg.thin; ++t) sweep();
        for (int u = 0; u < p; ++u) out.set(k, u, y[std::size_t(u)]);
    }
    return out;
}

PhaseDataset gibbs_sample_chains(const GraphModel& m, std::size_t n_per_chain, std::size_t chains,
                                 const GibbsConfig& cfg)
{
    std::vector<PhaseDataset> parts(chains);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(chains); ++c) {
        GibbsConfig chain_cfg = cfg;
        chain_cfg.seed = derive_seed(cfg.seed, std::uint64_t(c));
        parts[std::size_t(c)] = gibbs_sample(m, n_per_chain, chain_cfg);
    }
    return PhaseDataset::concat(parts);
}

} // namespace phasefield
