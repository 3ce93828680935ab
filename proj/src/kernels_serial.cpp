#include <cmath>

#include "phasefield/kernels.hpp"

namespace phasefield::kernels::serial {

double iso_objective(const FeatureView& f, std::span<const double> theta)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < f.n; ++k) {
        const auto t = f.row(k);
        double e = 0.0;
        for (std::size_t l = 0; l < f.dim; ++l) e -= theta[l] * t[l];
        acc += std::exp(e);
    }
    return acc / double(f.n);
}

IsoEval iso_eval(const FeatureView& f, std::span<const double> theta)
{
    IsoEval out;
    out.gradient.assign(f.dim, 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < f.n; ++k) {
        const auto t = f.row(k);
        double e = 0.0;
        for (std::size_t l = 0; l < f.dim; ++l) e -= theta[l] * t[l];
        const double w = std::exp(e);
        acc += w;
        for (std::size_t l = 0; l < f.dim; ++l) out.gradient[l] -= t[l] * w;
    }
    out.objective = acc / double(f.n);
    for (double& g : out.gradient) g /= double(f.n);
    return out;
}

std::vector<double> correlation(const FeatureView& f)
{
    std::vector<double> h(f.dim * f.dim, 0.0);
    for (std::size_t k = 0; k < f.n; ++k) {
        const auto t = f.row(k);
        for (std::size_t a = 0; a < f.dim; ++a)
            for (std::size_t b = 0; b < f.dim; ++b) h[a * f.dim + b] += t[a] * t[b];
    }
    for (double& v : h) v /= double(f.n);
    return h;
}

PairSums pair_sums(const PhaseDataset& d)
{
    const int p = d.p();
    PairSums out{p, std::vector<double>(std::size_t(p) * p, 0.0), std::vector<double>(std::size_t(p) * p, 0.0)};
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            double c = 0.0;
            double s = 0.0;
            for (std::size_t k = 0; k < d.n(); ++k) {
                const double diff = d.at(k, j) - d.at(k, i);
                c += std::cos(diff);
                s += std::sin(diff);
            }
            out.cos_sum[i * p + j] = out.cos_sum[j * p + i] = c;
            out.sin_sum[i * p + j] = s;
            out.sin_sum[j * p + i] = -s;
        }
    }
    return out;
}

std::vector<double> mc_energies(const GraphModel& m, std::size_t n_mc, std::uint64_t seed)
{
    std::vector<double> energies(n_mc);
    std::vector<double> y(std::size_t(m.p()));
    for (std::size_t b = 0; b < block_count(n_mc); ++b) {
        Rng rng(derive_seed(seed, b));
        const std::size_t lo = b * kBlockSize;
        const std::size_t hi = std::min(n_mc, lo + kBlockSize);
        for (std::size_t k = lo; k < hi; ++k) {
            for (double& v : y) v = rng.uniform_angle();
            energies[k] = unnorm_log_density(y, m);
        }
    }
    return energies;
}

} // namespace phasefield::kernels::serial
