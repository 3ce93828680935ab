#include "phasefield/wave_sim.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace phasefield {

namespace {

void fill_measurements(GeneratedWave& w, std::size_t T, double dt, double noise_sd, Rng& rng)
{
    const int p = int(w.spatial_phase.size());
    w.panel.n_t = T;
    w.panel.p = p;
    w.panel.dt = dt;
    w.panel.values.resize(T * std::size_t(p));
    for (std::size_t k = 0; k < T; ++k)
        for (int i = 0; i < p; ++i)
            w.panel.values[k * std::size_t(p) + std::size_t(i)] = std::cos(w.true_phase(k, i)) + noise_sd * rng.normal();
}

void check_timing(std::size_t T, double dt, double noise_sd)
{
    if (T < 2) throw std::invalid_argument("wave generator: T must be >= 2");
    if (!(dt > 0.0)) throw std::invalid_argument("wave generator: dt must be > 0");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("wave generator: noise_sd must be >= 0");
}

template <class Gen>
LabeledPanelSet make_corpus(std::size_t n_per_class, int classes, std::uint64_t seed, Gen gen)
{
    if (n_per_class < 1) throw std::invalid_argument("gen_corpus: n_per_class must be >= 1");
    const std::size_t total = n_per_class * std::size_t(classes);
    LabeledPanelSet out;
    out.classes = classes;
    out.panels.resize(total);
    out.labels.resize(total);
    // the first panel is made up front so that spec errors surface as exceptions
    // here rather than inside the parallel region
    {
        Rng rng(derive_seed(seed, 0));
        out.panels[0] = gen(0, rng);
        out.labels[0] = 0;
    }
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 1; q < std::ptrdiff_t(total); ++q) {
        const int label = int(std::size_t(q) / n_per_class);
        Rng rng(derive_seed(seed, std::uint64_t(q)));
        out.panels[std::size_t(q)] = gen(label, rng);
        out.labels[std::size_t(q)] = label;
    }
    return out;
}

} // namespace

SensorGrid SensorGrid::make(int rows, int cols, double extent_x, double extent_y)
{
    if (rows < 1 || cols < 1) throw std::invalid_argument("SensorGrid: rows and cols must be >= 1");
    if (!(extent_x >= 0.0) || !(extent_y >= 0.0)) throw std::invalid_argument("SensorGrid: negative extent");
    SensorGrid g{rows, cols, extent_x, extent_y, {}, {}};
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            g.x.push_back(cols > 1 ? extent_x * double(c) / double(cols - 1) : 0.0);
            g.y.push_back(rows > 1 ? extent_y * double(r) / double(rows - 1) : 0.0);
        }
    }
    return g;
}

SensorGrid SensorGrid::unit_spacing(int rows, int cols)
{
    return make(rows, cols, double(cols - 1), double(rows - 1));
}

SensorGrid SensorGrid::unit_square(int rows, int cols)
{
    return make(rows, cols, 1.0, 1.0);
}

GeneratedWave gen_plane_wave(const PlaneWaveSpec& spec, const SensorGrid& grid, Rng& rng)
{
    if (spec.direction_index < 0 || spec.direction_index >= kPlaneDirections)
        throw std::invalid_argument("gen_plane_wave: direction index must be in [0, 16)");
    check_timing(spec.T, spec.dt, spec.noise_sd);

    GeneratedWave w;
    w.omega = spec.omega;
    w.draw.kind = "plane";
    w.draw.label = spec.direction_index;
    w.draw.xi = spec.forced_xi ? *spec.forced_xi
                               : vm_sample({Angle(0.0), spec.direction_noise_kappa}, rng).radians();
    const double heading = kPi / 8.0 * spec.direction_index + w.draw.xi;
    w.draw.kx = std::cos(heading);
    w.draw.ky = std::sin(heading);
    for (int i = 0; i < grid.size(); ++i)
        w.spatial_phase.push_back(w.draw.kx * grid.x[std::size_t(i)] + w.draw.ky * grid.y[std::size_t(i)]);
    fill_measurements(w, spec.T, spec.dt, spec.noise_sd, rng);
    return w;
}

double elliptical_spatial_phase(double x, double y, double kr, double rotation, double cx, double cy)
{
    const double dx = x - cx;
    const double dy = y - cy;
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    const double u = dx * c - dy * s;
    const double v = dx * s + dy * c;
    return kr * std::sqrt(EllipticalWaveSpec::kMinorCoeff * u * u + EllipticalWaveSpec::kMajorCoeff * v * v);
}

GeneratedWave gen_elliptical_wave(const EllipticalWaveSpec& spec, const SensorGrid& grid, int class_label, Rng& rng)
{
    if (class_label != 0 && class_label != 1) throw std::invalid_argument("gen_elliptical_wave: class must be 0 or 1");
    check_timing(spec.T, spec.dt, spec.noise_sd);

    GeneratedWave w;
    w.omega = spec.omega;
    w.draw.kind = "elliptical";
    w.draw.label = class_label;
    // draw order is fixed so forcing one parameter leaves the others unchanged
    const double kr = rng.normal(spec.kr_mean, spec.kr_sd);
    const double rot = vm_sample({Angle(spec.rotation_mean), spec.rotation_kappa}, rng).radians();
    const double lo = class_label == 0 ? spec.class0_lo : spec.class1_lo;
    const double hi = class_label == 0 ? spec.class0_hi : spec.class1_hi;
    const double cx = rng.uniform(lo, hi);
    const double cy = rng.uniform(lo, hi);
    w.draw.kr = spec.forced_kr.value_or(kr);
    w.draw.rotation = spec.forced_rotation.value_or(rot);
    w.draw.cx = spec.forced_center ? spec.forced_center->first : cx;
    w.draw.cy = spec.forced_center ? spec.forced_center->second : cy;
    for (int i = 0; i < grid.size(); ++i)
        w.spatial_phase.push_back(elliptical_spatial_phase(grid.x[std::size_t(i)], grid.y[std::size_t(i)], w.draw.kr,
                                                           w.draw.rotation, w.draw.cx, w.draw.cy));
    fill_measurements(w, spec.T, spec.dt, spec.noise_sd, rng);
    return w;
}

LabeledPanelSet gen_plane_corpus(std::size_t n_per_class, const PlaneWaveSpec& spec, const SensorGrid& grid,
                                 std::uint64_t seed)
{
    return make_corpus(n_per_class, kPlaneDirections, seed, [&](int label, Rng& rng) {
        PlaneWaveSpec s = spec;
        s.direction_index = label;
        return gen_plane_wave(s, grid, rng);
    });
}

LabeledPanelSet gen_elliptical_corpus(std::size_t n_per_class, const EllipticalWaveSpec& spec,
                                      const SensorGrid& grid, std::uint64_t seed)
{
    return make_corpus(n_per_class, 2, seed,
                       [&](int label, Rng& rng) { return gen_elliptical_wave(spec, grid, label, rng); });
}

Split stratified_split(const std::vector<int>& labels, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
        throw std::invalid_argument("stratified_split: fraction must be in [0, 1]");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t q = 0; q < labels.size(); ++q) by_class[labels[q]].push_back(q);

    Split out;
    for (auto& [label, idx] : by_class) {
        Rng rng(derive_seed(seed, std::uint64_t(std::int64_t(label))));
        for (std::size_t k = idx.size(); k > 1; --k) std::swap(idx[k - 1], idx[rng.below(k)]);
        const auto n_train = std::size_t(std::llround(train_fraction * double(idx.size())));
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + std::ptrdiff_t(n_train));
        out.test.insert(out.test.end(), idx.begin() + std::ptrdiff_t(n_train), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

} // namespace phasefield
