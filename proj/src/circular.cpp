#include "phasefield/circular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phasefield {

namespace {

constexpr double kSeriesLimit = 20.0;

void require_nonnegative(double x, const char* what)
{
    if (!(x >= 0.0) || std::isinf(x))
        throw std::domain_error(std::string(what) + ": argument must be finite and >= 0");
}

// sum_k (x^2/4)^k / (k!)^2
double i0_series(double x)
{
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * double(k));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// (x/2) sum_k (x^2/4)^k / (k! (k+1)!)
double i1_series(double x)
{
    const double q = 0.25 * x * x;
    double term = 0.5 * x;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * double(k + 1));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// exp(-x) I_nu(x) ~ (2 pi x)^(-1/2) sum_k (-1)^k a_k(nu) / x^k, truncated at
// the smallest term.
double scaled_asymptotic(double x, int nu)
{
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * x);
        const double mag = std::abs(term);
        if (mag > prev) break;
        sum += term;
        if (mag < 1e-17 * std::abs(sum)) break;
        prev = mag;
    }
    return sum / std::sqrt(kTwoPi * x);
}

} // namespace

double wrap(double radians)
{
    if (!std::isfinite(radians)) throw std::invalid_argument("wrap: non-finite angle");
    if (radians >= -kPi && radians < kPi) return radians;
    double r = std::fmod(radians + kPi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    double out = r - kPi;
    if (out >= kPi) out = -kPi;
    return out;
}

double bessel_i0(double x)
{
    require_nonnegative(x, "bessel_i0");
    if (x < kSeriesLimit) return i0_series(x);
    return std::exp(x) * scaled_asymptotic(x, 0);
}

double bessel_i1(double x)
{
    require_nonnegative(x, "bessel_i1");
    if (x < kSeriesLimit) return i1_series(x);
    return std::exp(x) * scaled_asymptotic(x, 1);
}

double bessel_i0e(double x)
{
    require_nonnegative(x, "bessel_i0e");
    if (x < kSeriesLimit) return std::exp(-x) * i0_series(x);
    return scaled_asymptotic(x, 0);
}

double bessel_i1e(double x)
{
    require_nonnegative(x, "bessel_i1e");
    if (x < kSeriesLimit) return std::exp(-x) * i1_series(x);
    return scaled_asymptotic(x, 1);
}

double log_bessel_i0(double x)
{
    require_nonnegative(x, "log_bessel_i0");
    if (x < kSeriesLimit) return std::log(i0_series(x));
    return x + std::log(scaled_asymptotic(x, 0));
}

double log_bessel_i1(double x)
{
    require_nonnegative(x, "log_bessel_i1");
    if (x < kSeriesLimit) return std::log(i1_series(x));
    return x + std::log(scaled_asymptotic(x, 1));
}

double bessel_ratio(double kappa)
{
    require_nonnegative(kappa, "bessel_ratio");
    if (kappa < kSeriesLimit) return i1_series(kappa) / i0_series(kappa);
    return scaled_asymptotic(kappa, 1) / scaled_asymptotic(kappa, 0);
}

double vm_log_density(Angle y, const VonMisesParams& p)
{
    return p.kappa * std::cos(y.radians() - p.mu.radians()) - kLogTwoPi - log_bessel_i0(p.kappa);
}

Angle vm_sample(const VonMisesParams& p, Rng& rng)
{
    require_nonnegative(p.kappa, "vm_sample");
    if (p.kappa == 0.0) return Angle(rng.uniform_angle());

    const double kappa = p.kappa;
    double r;
    if (kappa < 1e-5) {
        // the closed form below cancels catastrophically as kappa -> 0
        r = 1.0 / kappa + kappa;
    } else {
        const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
        const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
        r = (1.0 + rho * rho) / (2.0 * rho);
    }

    double f;
    for (;;) {
        const double z = std::cos(kPi * rng.uniform());
        f = (1.0 + r * z) / (r + z);
        const double c = kappa * (r - f);
        const double u2 = rng.uniform_pos();
        if (c * (2.0 - c) - u2 > 0.0) break;
        if (std::log(c / u2) + 1.0 - c >= 0.0) break;
    }
    f = std::clamp(f, -1.0, 1.0);
    const double offset = std::acos(f);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return Angle(p.mu.radians() + sign * offset);
}

double invert_bessel_ratio(double r)
{
    if (!(r >= 0.0) || r >= 1.0) throw std::domain_error("invert_bessel_ratio: r must lie in [0, 1)");
    if (r == 0.0) return 0.0;
    if (bessel_ratio(kKappaCap) <= r) return kKappaCap;

    // standard rational approximation as the starting point
    double k;
    if (r < 0.53)
        k = 2.0 * r + r * r * r + 5.0 * std::pow(r, 5) / 6.0;
    else if (r < 0.85)
        k = -0.4 + 1.39 * r + 0.43 / (1.0 - r);
    else
        k = 1.0 / (r * r * r - 4.0 * r * r + 3.0 * r);
    k = std::clamp(k, 0.0, kKappaCap);

    double lo = 0.0;
    double hi = kKappaCap;
    for (int it = 0; it < 200; ++it) {
        const double a = bessel_ratio(k);
        const double f = a - r;
        if (std::abs(f) < 1e-10 && it > 0) break;
        if (f > 0.0)
            hi = k;
        else
            lo = k;
        // A'(k) = 1 - A/k - A^2; A'(0) = 1/2
        const double deriv = k > 0.0 ? 1.0 - a / k - a * a : 0.5;
        double next = deriv > 0.0 ? k - f / deriv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * hi) break;
        k = next;
    }
    return k;
}

VonMisesFit vm_mle_from_sums(double sum_cos, double sum_sin, std::size_t n)
{
    if (n < 2) throw std::invalid_argument("vm_mle: at least two samples are required");
    VonMisesFit fit;
    fit.params.mu = Angle(std::atan2(sum_sin, sum_cos));
    const double rbar = std::min(std::hypot(sum_cos, sum_sin) / double(n), 1.0);
    fit.mean_resultant = rbar;
    if (rbar >= 1.0 - 1e-12) {
        fit.params.kappa = kKappaCap;
        fit.degenerate = true;
        return fit;
    }
    fit.params.kappa = invert_bessel_ratio(rbar);
    fit.degenerate = fit.params.kappa >= kKappaCap;
    return fit;
}

VonMisesFit vm_mle(std::span<const double> samples)
{
    double c = 0.0;
    double s = 0.0;
    for (double y : samples) {
        c += std::cos(y);
        s += std::sin(y);
    }
    return vm_mle_from_sums(c, s, samples.size());
}

double mi_from_kappa(double kappa)
{
    require_nonnegative(kappa, "mi_from_kappa");
    if (kappa == 0.0) return 0.0;
    return std::max(0.0, kappa * bessel_ratio(kappa) - log_bessel_i0(kappa));
}

} // namespace phasefield
