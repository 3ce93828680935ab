#pragma once

#include <cstdint>

#include "phasefield/model.hpp"

namespace phasefield {

struct GibbsConfig {
    std::size_t burn_in = 10000;
    std::size_t thin = 1;
    std::uint64_t seed = 0;
};

/// Exact draws from the two-node model: Y1 uniform, Y2 | Y1 ~ VM(Y1 + mu, kappa).
PhaseDataset sample_pair(double kappa, Angle mu, std::size_t n, Rng& rng);

/// Systematic-scan Gibbs sampler. The chain starts uniform on the torus,
/// updates nodes 0..p-1 in order (one sweep per raw sample), drops burn_in
/// sweeps and keeps every thin-th sweep after that.
PhaseDataset gibbs_sample(const GraphModel& m, std::size_t n, const GibbsConfig& cfg);

/// Independent chains (chain c seeded with derive_seed(cfg.seed, c)) run
/// concurrently; rows are concatenated in chain order.
PhaseDataset gibbs_sample_chains(const GraphModel& m, std::size_t n_per_chain, std::size_t chains,
                                 const GibbsConfig& cfg);

} // namespace phasefield
