#pragma once

#include <numbers>
#include <span>

#include "phasefield/rng.hpp"

namespace phasefield {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

/// Largest concentration reported by the von Mises fit; reached only on
/// (near) zero-dispersion samples, which are flagged as degenerate.
inline constexpr double kKappaCap = 1.0e6;

/// Wrap radians into [-pi, pi). Values already inside the interval are
/// returned unchanged, so wrap is idempotent. Throws on non-finite input.
double wrap(double radians);

/// A phase on the circle, stored in [-pi, pi).
class Angle {
public:
    constexpr Angle() = default;
    explicit Angle(double radians) : value_(wrap(radians)) {}

    double radians() const noexcept { return value_; }
    explicit operator double() const noexcept { return value_; }

    friend bool operator==(Angle, Angle) = default;

private:
    double value_ = 0.0;
};

struct VonMisesParams {
    Angle mu;
    double kappa = 0.0;
};

// Modified Bessel functions of the first kind, orders 0 and 1.
// Power series below x = 20, scaled asymptotic expansion above. Relative
// accuracy ~1e-13 on [0, 700]. Negative arguments throw std::domain_error.
double bessel_i0(double x);
double bessel_i1(double x);

/// exp(-x) I0(x) and exp(-x) I1(x); finite for every x >= 0.
double bessel_i0e(double x);
double bessel_i1e(double x);

/// log I0(x), finite for every finite x >= 0. All log-density paths use this.
double log_bessel_i0(double x);
double log_bessel_i1(double x);

/// A(kappa) = I1(kappa) / I0(kappa), the mean resultant length of VM(., kappa).
double bessel_ratio(double kappa);

double vm_log_density(Angle y, const VonMisesParams& p);

/// Exact draw from VM(mu, kappa): Best-Fisher rejection for kappa > 0,
/// uniform for kappa == 0.
Angle vm_sample(const VonMisesParams& p, Rng& rng);

struct VonMisesFit {
    VonMisesParams params;
    double mean_resultant = 0.0;
    /// Set when the sample has (numerically) zero dispersion and kappa was
    /// clamped to kKappaCap.
    bool degenerate = false;
};

/// Maximum-likelihood fit from the resultant sums sum(cos y), sum(sin y) over n samples.
VonMisesFit vm_mle_from_sums(double sum_cos, double sum_sin, std::size_t n);

/// Maximum-likelihood fit. Requires at least two samples.
VonMisesFit vm_mle(std::span<const double> samples);

/// Inverts A(kappa) = r for r in [0, 1). Returns kKappaCap when the root lies beyond it.
double invert_bessel_ratio(double r);

/// Mutual information of a two-node coupling with concentration kappa:
/// kappa A(kappa) - log I0(kappa).
double mi_from_kappa(double kappa);

} // namespace phasefield
