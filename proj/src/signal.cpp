#include "phasefield/signal.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace phasefield {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

void fft_inplace(std::vector<std::complex<double>>& data, int sign)
{
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(int(data.size()), buf, buf, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

std::complex<double> bilinear(std::complex<double> s, double fs)
{
    return (2.0 * fs + s) / (2.0 * fs - s);
}

Biquad section_from_poles(std::complex<double> z1, std::complex<double> z2)
{
    Biquad b;
    b.b0 = 1.0;
    b.b1 = 0.0;
    b.b2 = -1.0;
    b.a1 = -(z1 + z2).real();
    b.a2 = (z1 * z2).real();
    return b;
}

} // namespace

std::string fft_backend_version()
{
    return fftw_version;
}

std::vector<double> TimeSeriesPanel::channel(int ch) const
{
    std::vector<double> out(n_t);
    for (std::size_t t = 0; t < n_t; ++t) out[t] = at(t, ch);
    return out;
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> x)
{
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("analytic_signal: length must be >= 2");
    std::vector<std::complex<double>> data(x.begin(), x.end());
    fft_inplace(data, FFTW_FORWARD);
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < n; ++k) {
        if (n % 2 == 0 && k == half) continue;
        if (k <= (n - 1) / 2)
            data[k] *= 2.0;
        else
            data[k] = 0.0;
    }
    fft_inplace(data, FFTW_BACKWARD);
    const double inv = 1.0 / double(n);
    for (auto& v : data) v *= inv;
    return data;
}

SosFilter design_bandpass(const BandpassSpec& spec)
{
    if (spec.order < 2 || spec.order % 2 != 0) throw std::invalid_argument("design_bandpass: order must be even and >= 2");
    if (!(spec.fs > 0.0) || !(spec.low > 0.0) || !(spec.low < spec.high) || !(spec.high < 0.5 * spec.fs))
        throw std::invalid_argument("design_bandpass: need 0 < low < high < fs/2");

    const double fs = spec.fs;
    const double w1 = 2.0 * fs * std::tan(kPi * spec.low / fs);
    const double w2 = 2.0 * fs * std::tan(kPi * spec.high / fs);
    const double w0sq = w1 * w2;
    const double bw = w2 - w1;
    const int proto = spec.order / 2;

    SosFilter filter;
    for (int k = 1; k <= proto; ++k) {
        const std::complex<double> lp = std::polar(1.0, kPi * double(2 * k + proto - 1) / double(2 * proto));
        if (lp.imag() < -1e-12) continue; // conjugate of an already handled pole
        // lowpass -> bandpass: s^2 - p*bw*s + w0^2 = 0
        const std::complex<double> pb = lp * bw;
        const std::complex<double> disc = std::sqrt(pb * pb - 4.0 * w0sq);
        const std::complex<double> s1 = 0.5 * (pb + disc);
        const std::complex<double> s2 = 0.5 * (pb - disc);
        if (std::abs(lp.imag()) <= 1e-12) {
            filter.sections.push_back(section_from_poles(bilinear(s1, fs), bilinear(s2, fs)));
        } else {
            const auto z1 = bilinear(s1, fs);
            const auto z2 = bilinear(s2, fs);
            filter.sections.push_back(section_from_poles(z1, std::conj(z1)));
            filter.sections.push_back(section_from_poles(z2, std::conj(z2)));
        }
    }

    const double centre_hz = std::atan(std::sqrt(w0sq) / (2.0 * fs)) * fs / kPi;
    const double gain = std::abs(frequency_response(filter, centre_hz, fs));
    const double per_section = std::pow(gain, -1.0 / double(filter.sections.size()));
    for (auto& s : filter.sections) {
        s.b0 *= per_section;
        s.b1 *= per_section;
        s.b2 *= per_section;
    }
    return filter;
}

std::complex<double> frequency_response(const SosFilter& filter, double freq_hz, double fs)
{
    const std::complex<double> zinv = std::polar(1.0, -kTwoPi * freq_hz / fs);
    std::complex<double> h{1.0, 0.0};
    for (const auto& s : filter.sections) {
        const auto num = s.b0 + zinv * (s.b1 + zinv * s.b2);
        const auto den = 1.0 + zinv * (s.a1 + zinv * s.a2);
        h *= num / den;
    }
    return h;
}

std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x, std::span<const double> initial_state)
{
    const std::size_t ns = filter.sections.size();
    if (!initial_state.empty() && initial_state.size() != 2 * ns)
        throw std::invalid_argument("sosfilt: initial state must have 2 entries per section");
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t q = 0; q < ns; ++q) {
        const auto& s = filter.sections[q];
        double z1 = initial_state.empty() ? 0.0 : initial_state[2 * q];
        double z2 = initial_state.empty() ? 0.0 : initial_state[2 * q + 1];
        for (double& v : y) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    return y;
}

std::vector<double> sosfilt_zi(const SosFilter& filter)
{
    std::vector<double> zi;
    double scale = 1.0; // step amplitude reaching the current section
    for (const auto& s : filter.sections) {
        const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
        const double out = dc * scale;
        const double z2 = s.b2 * scale - s.a2 * out;
        const double z1 = s.b1 * scale - s.a1 * out + z2;
        zi.push_back(z1);
        zi.push_back(z2);
        scale = out;
    }
    return zi;
}

std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x)
{
    const std::size_t pad = 3 * 2 * filter.sections.size();
    const std::size_t n = x.size();
    if (n <= pad) throw std::invalid_argument("filtfilt: series must be longer than 3 x filter order");

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * x[0] - x[k]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * x[n - 1] - x[n - 1 - k]);

    const auto zi = sosfilt_zi(filter);
    std::vector<double> state(zi.size());
    for (std::size_t q = 0; q < zi.size(); ++q) state[q] = zi[q] * ext.front();
    auto fwd = sosfilt(filter, ext, state);

    std::reverse(fwd.begin(), fwd.end());
    for (std::size_t q = 0; q < zi.size(); ++q) state[q] = zi[q] * fwd.front();
    auto back = sosfilt(filter, fwd, state);
    std::reverse(back.begin(), back.end());

    return std::vector<double>(back.begin() + std::ptrdiff_t(pad), back.begin() + std::ptrdiff_t(pad + n));
}

std::size_t edge_trim(std::size_t n_t, const PhaseExtractionOptions& opts)
{
    if (opts.keep_edges) return 0;
    return std::size_t(std::floor(opts.edge_fraction * double(n_t)));
}

PhaseDataset instantaneous_phase(const TimeSeriesPanel& panel, const PhaseExtractionOptions& opts)
{
    if (!(panel.dt > 0.0)) throw std::invalid_argument("instantaneous_phase: dt must be > 0");
    if (panel.values.size() != panel.n_t * std::size_t(panel.p))
        throw std::invalid_argument("instantaneous_phase: value count != n_t * p");
    const std::size_t trim = edge_trim(panel.n_t, opts);
    if (2 * trim >= panel.n_t) throw std::invalid_argument("instantaneous_phase: series too short");
    const std::size_t rows = panel.n_t - 2 * trim;

    std::optional<SosFilter> filter;
    if (opts.bandpass) {
        BandpassSpec spec = *opts.bandpass;
        spec.fs = 1.0 / panel.dt;
        filter = design_bandpass(spec);
    }

    for (double v : panel.values)
        if (!std::isfinite(v)) throw std::invalid_argument("instantaneous_phase: non-finite measurement");
    if (filter && panel.n_t <= 6 * filter->sections.size())
        throw std::invalid_argument("instantaneous_phase: series too short for the bandpass padding");

    PhaseDataset out(rows, panel.p);
#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < panel.p; ++ch) {
        auto x = panel.channel(ch);
        if (filter) x = filtfilt(*filter, x);
        const auto z = analytic_signal(x);
        for (std::size_t r = 0; r < rows; ++r) out.set(r, ch, std::arg(z[r + trim]));
    }
    return out;
}

} // namespace phasefield
