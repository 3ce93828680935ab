#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version (namespace
// omp, used by the library) and a plain serial reference (namespace serial,
// kept for tests and benchmarks).
//
// The OpenMP reductions split the index range into fixed blocks of
// kBlockSize, reduce each block sequentially and combine block partials in
// block order. Results are therefore bit-identical for any thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phasefield/model.hpp"

namespace phasefield::kernels {

inline constexpr std::size_t kBlockSize = 1024;

inline std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

/// Deterministic parallel sum of f(k) for k in [0, n).
template <class F>
double blocked_sum(std::size_t n, F&& f)
{
    const std::size_t nb = block_count(n);
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < std::ptrdiff_t(nb); ++b) {
        const std::size_t lo = std::size_t(b) * kBlockSize;
        const std::size_t hi = std::min(n, lo + kBlockSize);
        double acc = 0.0;
        for (std::size_t k = lo; k < hi; ++k) acc += f(k);
        partial[std::size_t(b)] = acc;
    }
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

/// Row-major n x dim feature matrix of the interaction screening objective.
struct FeatureView {
    std::span<const double> data;
    std::size_t n = 0;
    std::size_t dim = 0;

    std::span<const double> row(std::size_t k) const { return data.subspan(k * dim, dim); }
};

struct IsoEval {
    double objective = 0.0;
    std::vector<double> gradient;
};

/// Pairwise resultant sums: cos_sum[i*p+j] = sum_k cos(y_j - y_i), sin_sum likewise.
struct PairSums {
    int p = 0;
    std::vector<double> cos_sum;
    std::vector<double> sin_sum;
};

namespace serial {

/// (1/n) sum_k exp(-<theta, t_k>) evaluated term by term, without exponent guard.
double iso_objective(const FeatureView& f, std::span<const double> theta);
IsoEval iso_eval(const FeatureView& f, std::span<const double> theta);
/// (1/n) sum_k t_k t_k^T, dense dim x dim.
std::vector<double> correlation(const FeatureView& f);
PairSums pair_sums(const PhaseDataset& d);
/// Energies of uniform draws, block b drawn from derive_seed(seed, b).
std::vector<double> mc_energies(const GraphModel& m, std::size_t n_mc, std::uint64_t seed);

} // namespace serial

namespace omp {

/// Exponent-guarded: each block subtracts its own max exponent before
/// exponentiating and partials are rescaled when combined.
double iso_objective(const FeatureView& f, std::span<const double> theta);
IsoEval iso_eval(const FeatureView& f, std::span<const double> theta);
std::vector<double> correlation(const FeatureView& f);
PairSums pair_sums(const PhaseDataset& d);
std::vector<double> mc_energies(const GraphModel& m, std::size_t n_mc, std::uint64_t seed);

} // namespace omp

} // namespace phasefield::kernels
