#pragma once

#include <complex>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "phasefield/model.hpp"

namespace phasefield {

/// n_t time samples x p channels of real measurements, row-major.
struct TimeSeriesPanel {
    std::size_t n_t = 0;
    int p = 0;
    double dt = 1.0;
    std::vector<double> values;

    double at(std::size_t t, int ch) const { return values[t * std::size_t(p) + std::size_t(ch)]; }
    std::vector<double> channel(int ch) const;
};

/// order is the total bandpass order (lowpass prototype order / 2 x 2).
struct BandpassSpec {
    int order = 8;
    double low = 0.03;
    double high = 0.07;
    double fs = 1.0;
};

/// Direct-form-II-transposed second-order section, a0 == 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

struct SosFilter {
    std::vector<Biquad> sections;
};

/// Version string of the FFT library backing analytic_signal.
std::string fft_backend_version();

/// Analytic signal via FFT: negative frequencies zeroed, positive doubled,
/// DC and Nyquist kept at unit gain.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

/// Butterworth bandpass: analog prototype, bilinear transform with prewarped
/// band edges, factored into order/2 sections; unit gain at the band centre.
SosFilter design_bandpass(const BandpassSpec& spec);

/// H(exp(i 2 pi f / fs)) of the cascade (single pass).
std::complex<double> frequency_response(const SosFilter& filter, double freq_hz, double fs);

/// Causal filtering, optionally from per-section initial states (2 per section).
std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x,
                            std::span<const double> initial_state = {});

/// Per-section states giving a steady-state response to a unit step.
std::vector<double> sosfilt_zi(const SosFilter& filter);

/// Zero-phase forward-backward filtering with odd-reflection padding of
/// 3 * (2 * sections) samples. Throws if x is not longer than the padding.
std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x);

struct PhaseExtractionOptions {
    std::optional<BandpassSpec> bandpass;
    /// Drop the first and last edge_fraction of time points unless keep_edges.
    bool keep_edges = false;
    double edge_fraction = 0.05;
};

/// Number of time points dropped at each end.
std::size_t edge_trim(std::size_t n_t, const PhaseExtractionOptions& opts);

/// Angle of the analytic signal of every channel (optionally bandpassed);
/// rows are time points.
PhaseDataset instantaneous_phase(const TimeSeriesPanel& panel, const PhaseExtractionOptions& opts = {});

} // namespace phasefield
