#include <algorithm>
#include <cmath>
#include <limits>

#include "phasefield/kernels.hpp"

namespace phasefield::kernels::omp {

namespace {

struct BlockPartial {
    double max_exponent = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::vector<double> grad;
};

// One pass over a block: exponents first, then the guarded sums.
void iso_block(const FeatureView& f, std::span<const double> theta, std::size_t lo, std::size_t hi,
               bool with_grad, BlockPartial& out, std::vector<double>& scratch)
{
    scratch.resize(hi - lo);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = lo; k < hi; ++k) {
        const double* t = f.data.data() + k * f.dim;
        double e = 0.0;
        for (std::size_t l = 0; l < f.dim; ++l) e -= theta[l] * t[l];
        scratch[k - lo] = e;
        mx = std::max(mx, e);
    }
    out.max_exponent = mx;
    out.sum = 0.0;
    if (with_grad) out.grad.assign(f.dim, 0.0);
    for (std::size_t k = lo; k < hi; ++k) {
        const double w = std::exp(scratch[k - lo] - mx);
        out.sum += w;
        if (with_grad) {
            const double* t = f.data.data() + k * f.dim;
            for (std::size_t l = 0; l < f.dim; ++l) out.grad[l] -= t[l] * w;
        }
    }
}

IsoEval iso_reduce(const FeatureView& f, std::span<const double> theta, bool with_grad)
{
    const std::size_t nb = block_count(f.n);
    std::vector<BlockPartial> parts(nb);
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (std::ptrdiff_t b = 0; b < std::ptrdiff_t(nb); ++b) {
            const std::size_t lo = std::size_t(b) * kBlockSize;
            const std::size_t hi = std::min(f.n, lo + kBlockSize);
            iso_block(f, theta, lo, hi, with_grad, parts[std::size_t(b)], scratch);
        }
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& part : parts) mx = std::max(mx, part.max_exponent);

    IsoEval out;
    if (with_grad) out.gradient.assign(f.dim, 0.0);
    double total = 0.0;
    for (const auto& part : parts) {
        const double scale = std::exp(part.max_exponent - mx);
        total += scale * part.sum;
        if (with_grad)
            for (std::size_t l = 0; l < f.dim; ++l) out.gradient[l] += scale * part.grad[l];
    }
    // exp(mx) may overflow to inf for wild iterates; callers treat that as rejection
    const double factor = std::exp(mx) / double(f.n);
    out.objective = total * factor;
    for (double& g : out.gradient) g *= factor;
    return out;
}

} // namespace

double iso_objective(const FeatureView& f, std::span<const double> theta)
{
    return iso_reduce(f, theta, false).objective;
}

IsoEval iso_eval(const FeatureView& f, std::span<const double> theta)
{
    return iso_reduce(f, theta, true);
}

std::vector<double> correlation(const FeatureView& f)
{
    const std::size_t nb = block_count(f.n);
    const std::size_t dd = f.dim * f.dim;
    std::vector<std::vector<double>> parts(nb);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < std::ptrdiff_t(nb); ++b) {
        auto& h = parts[std::size_t(b)];
        h.assign(dd, 0.0);
        const std::size_t lo = std::size_t(b) * kBlockSize;
        const std::size_t hi = std::min(f.n, lo + kBlockSize);
        for (std::size_t k = lo; k < hi; ++k) {
            const double* t = f.data.data() + k * f.dim;
            for (std::size_t a = 0; a < f.dim; ++a)
                for (std::size_t c = a; c < f.dim; ++c) h[a * f.dim + c] += t[a] * t[c];
        }
    }
    std::vector<double> h(dd, 0.0);
    for (const auto& part : parts)
        for (std::size_t i = 0; i < dd; ++i) h[i] += part[i];
    for (std::size_t a = 0; a < f.dim; ++a) {
        for (std::size_t c = a; c < f.dim; ++c) {
            h[a * f.dim + c] /= double(f.n);
            h[c * f.dim + a] = h[a * f.dim + c];
        }
    }
    return h;
}

PairSums pair_sums(const PhaseDataset& d)
{
    const int p = d.p();
    const std::size_t n = d.n();
    // node-major cos/sin tables so each pair streams two contiguous columns
    std::vector<double> cs(std::size_t(p) * n);
    std::vector<double> sn(std::size_t(p) * n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < std::ptrdiff_t(n); ++k) {
        for (int i = 0; i < p; ++i) {
            const double y = d.at(std::size_t(k), i);
            cs[std::size_t(i) * n + std::size_t(k)] = std::cos(y);
            sn[std::size_t(i) * n + std::size_t(k)] = std::sin(y);
        }
    }

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) pairs.emplace_back(i, j);

    PairSums out{p, std::vector<double>(std::size_t(p) * p, 0.0), std::vector<double>(std::size_t(p) * p, 0.0)};
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 0; q < std::ptrdiff_t(pairs.size()); ++q) {
        const auto [i, j] = pairs[std::size_t(q)];
        const double* ci = cs.data() + std::size_t(i) * n;
        const double* si = sn.data() + std::size_t(i) * n;
        const double* cj = cs.data() + std::size_t(j) * n;
        const double* sj = sn.data() + std::size_t(j) * n;
        double c = 0.0;
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            // cos(y_j - y_i) and sin(y_j - y_i) by angle-difference identities
            c += cj[k] * ci[k] + sj[k] * si[k];
            s += sj[k] * ci[k] - cj[k] * si[k];
        }
        out.cos_sum[std::size_t(i) * p + j] = out.cos_sum[std::size_t(j) * p + i] = c;
        out.sin_sum[std::size_t(i) * p + j] = s;
        out.sin_sum[std::size_t(j) * p + i] = -s;
    }
    return out;
}

std::vector<double> mc_energies(const GraphModel& m, std::size_t n_mc, std::uint64_t seed)
{
    std::vector<double> energies(n_mc);
    const std::size_t nb = block_count(n_mc);
#pragma omp parallel
    {
        std::vector<double> y(std::size_t(m.p()));
#pragma omp for schedule(static)
        for (std::ptrdiff_t b = 0; b < std::ptrdiff_t(nb); ++b) {
            Rng rng(derive_seed(seed, std::uint64_t(b)));
            const std::size_t lo = std::size_t(b) * kBlockSize;
            const std::size_t hi = std::min(n_mc, lo + kBlockSize);
            for (std::size_t k = lo; k < hi; ++k) {
                for (double& v : y) v = rng.uniform_angle();
                energies[k] = unnorm_log_density(y, m);
            }
        }
    }
    return energies;
}

} // namespace phasefield::kernels::omp
