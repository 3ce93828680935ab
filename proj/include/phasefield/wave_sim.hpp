#pragma once

// Synthetic wave fields sampled on a sensor grid: noisy plane waves in one of
// 16 directions, and elliptical waves whose centre is either off the grid
// (unidirectional) or on it (diverging).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phasefield/circular.hpp"
#include "phasefield/rng.hpp"
#include "phasefield/signal.hpp"

namespace phasefield {

/// rows x cols sensors evenly spaced over [0, extent_x] x [0, extent_y],
/// row-major (sensor r * cols + c sits at x = column, y = row).
struct SensorGrid {
    int rows = 0;
    int cols = 0;
    double extent_x = 0.0;
    double extent_y = 0.0;
    std::vector<double> x;
    std::vector<double> y;

    static SensorGrid make(int rows, int cols, double extent_x, double extent_y);
    /// Unit spacing: extent = (cols - 1, rows - 1).
    static SensorGrid unit_spacing(int rows, int cols);
    /// The unit square [0, 1]^2.
    static SensorGrid unit_square(int rows, int cols);

    int size() const noexcept { return rows * cols; }
};

inline constexpr int kPlaneDirections = 16;

struct PlaneWaveSpec {
    /// theta_m = pi m / 8.
    int direction_index = 0;
    double direction_noise_kappa = 30.0;
    double omega = 2.0 * kPi * 5.0;
    std::size_t T = 200;
    double dt = 0.02;
    double noise_sd = 1.0 / std::sqrt(2.0);
    /// Replaces the von Mises direction jitter when set.
    std::optional<double> forced_xi;
};

struct EllipticalWaveSpec {
    static constexpr double kMinorCoeff = 0.09;
    static constexpr double kMajorCoeff = 225.0;

    double kr_mean = 1.0;
    double kr_sd = 0.1;
    double rotation_mean = kPi / 4.0;
    double rotation_kappa = 60.0;
    double omega = kTwoPi / 20.0;
    std::size_t T = 4096;
    double dt = 1.0;
    double noise_sd = 1.0 / std::sqrt(2.0);
    /// Centre boxes: class 0 (unidirectional) and class 1 (diverging).
    double class0_lo = 1.0, class0_hi = 1.5;
    double class1_lo = 0.0, class1_hi = 0.75;

    // overrides for controlled experiments
    std::optional<double> forced_kr;
    std::optional<double> forced_rotation;
    std::optional<std::pair<double, double>> forced_center;
};

/// Parameters actually drawn for one panel.
struct WaveDraw {
    std::string kind;
    int label = 0;
    double xi = 0.0;
    double kx = 0.0;
    double ky = 0.0;
    double kr = 0.0;
    double rotation = 0.0;
    double cx = 0.0;
    double cy = 0.0;
};

struct GeneratedWave {
    TimeSeriesPanel panel;
    /// Time-independent part of the phase per sensor; the true phase at
    /// sample k is spatial_phase[i] - omega * k * dt. That phase decreases in
    /// time, so the analytic signal of the measurement reports its negative.
    std::vector<double> spatial_phase;
    double omega = 0.0;
    WaveDraw draw;

    double true_phase(std::size_t k, int sensor) const
    {
        return spatial_phase[std::size_t(sensor)] - omega * double(k) * panel.dt;
    }
};

GeneratedWave gen_plane_wave(const PlaneWaveSpec& spec, const SensorGrid& grid, Rng& rng);

/// Spatial phase K_r sqrt(a u^2 + b v^2) with (u, v) the rotated offsets from the centre.
double elliptical_spatial_phase(double x, double y, double kr, double rotation, double cx, double cy);

GeneratedWave gen_elliptical_wave(const EllipticalWaveSpec& spec, const SensorGrid& grid, int class_label, Rng& rng);

struct LabeledPanelSet {
    std::vector<GeneratedWave> panels;
    std::vector<int> labels;
    int classes = 0;
};

/// n_per_class panels per direction, class-major order. Panel q draws from
/// its own stream derive_seed(seed, q), so the corpus is independent of
/// thread count.
LabeledPanelSet gen_plane_corpus(std::size_t n_per_class, const PlaneWaveSpec& spec, const SensorGrid& grid,
                                 std::uint64_t seed);
LabeledPanelSet gen_elliptical_corpus(std::size_t n_per_class, const EllipticalWaveSpec& spec,
                                      const SensorGrid& grid, std::uint64_t seed);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per class, a seeded shuffle of that class's indices with the first
/// round(train_fraction * count) going to train. Both lists come back sorted.
Split stratified_split(const std::vector<int>& labels, double train_fraction, std::uint64_t seed);

} // namespace phasefield
