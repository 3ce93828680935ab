#include "phasefield/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "phasefield/chow_liu.hpp"
#include "phasefield/graphs.hpp"
#include "phasefield/sampler.hpp"

namespace phasefield {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct TrialOutcome {
    bool recovered = false;
    bool reliable = true;
    double seconds = 0.0;
};

TrialOutcome try_chow_liu(const PhaseDataset& d, const GraphStructure& truth)
{
    const auto t0 = Clock::now();
    const auto tree = fit_chow_liu(d);
    return {tree.structure() == truth, true, seconds_since(t0)};
}

TrialOutcome try_iso(const PhaseDataset& d, const GraphStructure& truth, const StructureOptions& opts)
{
    const auto t0 = Clock::now();
    const auto est = recover_structure(d, opts);
    return {est.structure == truth, est.reliable, seconds_since(t0)};
}

void check_sizes(const std::vector<std::size_t>& ns, std::size_t trials)
{
    if (ns.empty()) throw std::invalid_argument("experiment: at least one sample size is required");
    if (trials == 0) throw std::invalid_argument("experiment: trials must be >= 1");
    for (auto n : ns)
        if (n < 2) throw std::invalid_argument("experiment: sample sizes must be >= 2");
}

// outcomes[(method * ns + n_index) * trials + trial]
std::vector<RecoveryCell> tabulate(const std::vector<std::string>& methods, int p, const std::vector<std::size_t>& ns,
                                   std::size_t trials, const std::vector<TrialOutcome>& outcomes)
{
    std::vector<RecoveryCell> cells;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t a = 0; a < ns.size(); ++a) {
            RecoveryCell c{methods[m], p, ns[a], trials, 0, 0, 0.0};
            for (std::size_t t = 0; t < trials; ++t) {
                const auto& o = outcomes[(m * ns.size() + a) * trials + t];
                c.recovered += o.recovered ? 1 : 0;
                c.unreliable += o.reliable ? 0 : 1;
                c.mean_seconds += o.seconds / double(trials);
            }
            cells.push_back(c);
        }
    }
    return cells;
}

Json curve_json(const RocCurve& c)
{
    Json pts = Json::array();
    for (std::size_t q = 0; q < c.fpr.size(); ++q) pts.push_back(Json::array({c.fpr[q], c.tpr[q]}));
    return pts;
}

} // namespace

TreeRecoveryConfig TreeRecoveryConfig::full()
{
    TreeRecoveryConfig c;
    c.ps = {4, 8, 16, 32};
    c.ns = {250, 1000, 4000, 16000};
    c.trials = 100;
    return c;
}

std::vector<RecoveryCell> run_tree_recovery(const TreeRecoveryConfig& cfg)
{
    check_sizes(cfg.ns, cfg.trials);
    std::vector<std::string> methods;
    if (cfg.chow_liu) methods.push_back("chowliu");
    if (cfg.iso) methods.push_back("iso");
    const std::size_t n_max = *std::max_element(cfg.ns.begin(), cfg.ns.end());

    std::vector<RecoveryCell> cells;
    for (int p : cfg.ps) {
        if (p < 2) throw std::invalid_argument("tree recovery: p must be >= 2");
        std::vector<TrialOutcome> outcomes(methods.size() * cfg.ns.size() * cfg.trials);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t t = 0; t < std::ptrdiff_t(cfg.trials); ++t) {
            Rng rng(derive_seed(cfg.seed, std::uint64_t(p), std::uint64_t(t)));
            const auto truth = random_tree(p, rng);
            const auto chain = gibbs_sample(uniform_coupling(truth, cfg.kappa), n_max,
                                            {cfg.burn_in, 1, rng.next_u64()});
            for (std::size_t a = 0; a < cfg.ns.size(); ++a) {
                const auto d = chain.slice(0, cfg.ns[a]);
                for (std::size_t m = 0; m < methods.size(); ++m) {
                    outcomes[(m * cfg.ns.size() + a) * cfg.trials + std::size_t(t)] =
                        methods[m] == "chowliu" ? try_chow_liu(d, truth) : try_iso(d, truth, cfg.iso_options);
                }
            }
        }
        auto part = tabulate(methods, p, cfg.ns, cfg.trials, outcomes);
        cells.insert(cells.end(), part.begin(), part.end());
    }
    return cells;
}

GridRecoveryConfig GridRecoveryConfig::full()
{
    GridRecoveryConfig c;
    c.sides = {2, 3, 4, 5};
    c.ns = {500, 2000, 8000, 32000};
    c.trials = 45;
    return c;
}

std::vector<RecoveryCell> run_grid_recovery(const GridRecoveryConfig& cfg)
{
    check_sizes(cfg.ns, cfg.trials);
    const std::size_t n_max = *std::max_element(cfg.ns.begin(), cfg.ns.end());
    std::vector<RecoveryCell> cells;
    for (int side : cfg.sides) {
        const auto truth = toroidal_grid(side, side);
        const auto model = uniform_coupling(truth, cfg.kappa);
        std::vector<TrialOutcome> outcomes(cfg.ns.size() * cfg.trials);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t t = 0; t < std::ptrdiff_t(cfg.trials); ++t) {
            const auto chain =
                gibbs_sample(model, n_max, {cfg.burn_in, 1, derive_seed(cfg.seed, std::uint64_t(side), std::uint64_t(t))});
            for (std::size_t a = 0; a < cfg.ns.size(); ++a)
                outcomes[a * cfg.trials + std::size_t(t)] = try_iso(chain.slice(0, cfg.ns[a]), truth, cfg.iso_options);
        }
        auto part = tabulate({"iso"}, truth.p(), cfg.ns, cfg.trials, outcomes);
        cells.insert(cells.end(), part.begin(), part.end());
    }
    return cells;
}

std::vector<PhaseDataset> extract_phases(const LabeledPanelSet& set, const PhaseExtractionOptions& opts)
{
    std::vector<PhaseDataset> out(set.panels.size());
    if (out.empty()) return out;
    // first panel outside the parallel region so invalid options throw normally
    out[0] = instantaneous_phase(set.panels[0].panel, opts);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 1; q < std::ptrdiff_t(out.size()); ++q)
        out[std::size_t(q)] = instantaneous_phase(set.panels[std::size_t(q)].panel, opts);
    return out;
}

PhaseDataset pool(const std::vector<PhaseDataset>& datasets, const std::vector<std::size_t>& indices)
{
    std::vector<PhaseDataset> parts;
    parts.reserve(indices.size());
    for (auto q : indices) parts.push_back(datasets.at(q));
    return PhaseDataset::concat(parts);
}

PlaneClassificationConfig PlaneClassificationConfig::full()
{
    PlaneClassificationConfig c;
    c.grid = 8;
    c.per_class = 100;
    return c;
}

PlaneClassificationResult run_plane_classification(const PlaneClassificationConfig& cfg)
{
    if (cfg.grid < 2) throw std::invalid_argument("plane classification: grid must be >= 2");
    const auto grid = SensorGrid::unit_spacing(cfg.grid, cfg.grid);
    const auto corpus = gen_plane_corpus(cfg.per_class, cfg.wave, grid, derive_seed(cfg.seed, 0));
    const auto phases = extract_phases(corpus, {});
    const auto split = stratified_split(corpus.labels, cfg.train_fraction, derive_seed(cfg.seed, 1));

    PlaneClassificationResult r;
    r.train_count = split.train.size();
    r.test_count = split.test.size();

    const auto t0 = Clock::now();
    std::vector<TreeModel> models(std::size_t(corpus.classes));
    for (int c = 0; c < corpus.classes; ++c) {
        std::vector<std::size_t> idx;
        for (auto q : split.train)
            if (corpus.labels[q] == c) idx.push_back(q);
        if (idx.empty()) throw std::invalid_argument("plane classification: a class has no training panels");
        models[std::size_t(c)] = fit_chow_liu(pool(phases, idx));
    }
    r.fit_seconds = seconds_since(t0);

    r.predictions.resize(split.test.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 0; q < std::ptrdiff_t(split.test.size()); ++q)
        r.predictions[std::size_t(q)] = mary_classify(phases[split.test[std::size_t(q)]], models).index;
    for (auto q : split.test) r.labels.push_back(corpus.labels[q]);
    r.confusion = confusion(r.predictions, r.labels, corpus.classes);
    return r;
}

EllipticalWaveSpec DensityRocConfig::desk_wave()
{
    EllipticalWaveSpec w;
    w.T = 1024;
    w.dt = 1.0;
    return w;
}

DensityRocConfig DensityRocConfig::full()
{
    DensityRocConfig c;
    c.grids = {3, 4, 5, 6, 7, 8, 9, 10};
    c.iso_grids = {3, 4, 5, 6, 7};
    c.per_class = 500;
    c.wave = EllipticalWaveSpec{};
    return c;
}

std::vector<RocEntry> run_density_roc(const DensityRocConfig& cfg)
{
    std::vector<RocEntry> out;
    for (int side : cfg.grids) {
        if (side < 2) throw std::invalid_argument("density roc: grid side must be >= 2");
        const auto grid = SensorGrid::unit_square(side, side);
        const auto corpus =
            gen_elliptical_corpus(cfg.per_class, cfg.wave, grid, derive_seed(cfg.seed, std::uint64_t(side), 0));
        PhaseExtractionOptions opts;
        opts.bandpass = cfg.band;
        const auto phases = extract_phases(corpus, opts);
        const auto split =
            stratified_split(corpus.labels, cfg.train_fraction, derive_seed(cfg.seed, std::uint64_t(side), 1));

        std::vector<std::size_t> train0, train1;
        for (auto q : split.train) (corpus.labels[q] == 1 ? train1 : train0).push_back(q);
        const auto pooled0 = pool(phases, train0);
        const auto pooled1 = pool(phases, train1);
        std::vector<PhaseDataset> test0, test1;
        for (auto q : split.test) (corpus.labels[q] == 1 ? test1 : test0).push_back(phases[q]);

        auto evaluate = [&](const std::string& method, const GraphModel& m0, const GraphModel& m1, double secs) {
            const auto s1 = llr_scores(test1, m1, m0);
            const auto s0 = llr_scores(test0, m1, m0);
            out.push_back({method, side, roc(s1, s0), m0.structure().edge_count() + m1.structure().edge_count(), secs});
        };

        {
            const auto t0 = Clock::now();
            const auto m0 = fit_chow_liu(pooled0).as_graph_model();
            const auto m1 = fit_chow_liu(pooled1).as_graph_model();
            evaluate("chowliu", m0, m1, seconds_since(t0));
        }
        if (std::find(cfg.iso_grids.begin(), cfg.iso_grids.end(), side) != cfg.iso_grids.end()) {
            const auto t0 = Clock::now();
            const auto f0 = fit_iso(pooled0, cfg.iso_options);
            const auto f1 = fit_iso(pooled1, cfg.iso_options);
            evaluate("iso", f0.refit.model, f1.refit.model, seconds_since(t0));
        }
    }
    return out;
}

Json report(const std::vector<RecoveryCell>& cells)
{
    Json rows = Json::array();
    for (const auto& c : cells)
        rows.push_back({{"method", c.method},
                        {"p", c.p},
                        {"n", c.n},
                        {"trials", c.trials},
                        {"recovered", c.recovered},
                        {"fraction", c.fraction()},
                        {"unreliable", c.unreliable},
                        {"seconds", c.mean_seconds}});
    return Json{{"cells", rows}};
}

Json report(const PlaneClassificationResult& r)
{
    const auto& cm = r.confusion;
    Json matrix = Json::array();
    Json per_class = Json::array();
    for (int a = 0; a < cm.m; ++a) {
        Json row = Json::array();
        for (int b = 0; b < cm.m; ++b) row.push_back(cm.at(a, b));
        matrix.push_back(row);
        const auto total = cm.row_total(a);
        per_class.push_back(total == 0 ? 0.0 : double(cm.at(a, a)) / double(total));
    }
    Json distances = Json::object();
    for (const auto& [d, count] : cm.error_distances()) distances[std::to_string(d)] = count;
    return Json{{"classes", cm.m},
                {"train", r.train_count},
                {"test", r.test_count},
                {"accuracy", cm.accuracy()},
                {"per_class_accuracy", per_class},
                {"adjacent_error_fraction", cm.adjacent_error_fraction()},
                {"error_distances", distances},
                {"confusion", matrix},
                {"seconds", r.fit_seconds}};
}

Json report(const std::vector<RocEntry>& entries)
{
    Json rows = Json::array();
    for (const auto& e : entries)
        rows.push_back({{"method", e.method},
                        {"grid", e.grid},
                        {"auc", e.curve.auc},
                        {"model_edges", e.model_edges},
                        {"roc", curve_json(e.curve)},
                        {"seconds", e.fit_seconds}});
    return Json{{"curves", rows}};
}

Json strip_timing(const Json& j)
{
    if (j.is_object()) {
        Json out = Json::object();
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "seconds" && it.key() != "timing") out[it.key()] = strip_timing(it.value());
        return out;
    }
    if (j.is_array()) {
        Json out = Json::array();
        for (const auto& v : j) out.push_back(strip_timing(v));
        return out;
    }
    return j;
}

} // namespace phasefield
