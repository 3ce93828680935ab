#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "phasefield/model.hpp"

namespace testing {

// Trapezoid rule over one period. Spectrally accurate for smooth periodic f.
template <class F>
double periodic_integral(F&& f, int nodes = 2048)
{
    const double h = 2.0 * std::numbers::pi / nodes;
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) acc += f(-std::numbers::pi + k * h);
    return acc * h;
}

// Power series in long double; reference for I_nu(x), nu in {0, 1}.
inline long double bessel_series(int nu, long double x)
{
    const long double q = x * x / 4.0L;
    long double term = nu == 0 ? 1.0L : x / 2.0L;
    long double sum = term;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (static_cast<long double>(k) * static_cast<long double>(k + nu));
        sum += term;
        if (term < sum * 1e-21L) break;
    }
    return sum;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
inline double ks_pvalue(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    const double ne = double(a.size()) * b.size() / (a.size() + b.size());
    const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    return std::clamp(p, 0.0, 1.0);
}

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("phasefield_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

} // namespace testing
