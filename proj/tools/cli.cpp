#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <map>

#include <omp.h>

#include <CLI11.hpp>

#include "phasefield/chow_liu.hpp"
#include "phasefield/experiments.hpp"
#include "phasefield/graphs.hpp"
#include "phasefield/hypothesis.hpp"
#include "phasefield/io.hpp"
#include "phasefield/iso.hpp"
#include "phasefield/sampler.hpp"
#include "phasefield/signal.hpp"
#include "phasefield/wave_sim.hpp"

namespace phasefield::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    std::vector<std::string> args;
    std::optional<std::uint64_t> seed_flag;
    int jobs = 0;
    std::ostream* out = nullptr;

    std::uint64_t seed() const
    {
        if (seed_flag) return *seed_flag;
        if (const char* env = std::getenv("PHASEFIELD_SEED")) {
            try {
                std::size_t used = 0;
                const auto v = std::stoull(env, &used);
                if (used == std::string(env).size()) return v;
            } catch (const std::exception&) {
            }
            throw UsageError("PHASEFIELD_SEED is not an unsigned integer");
        }
        return 0;
    }

    std::string seed_source() const
    {
        if (seed_flag) return "flag";
        return std::getenv("PHASEFIELD_SEED") ? "env" : "default";
    }
};

using Clock = std::chrono::steady_clock;

fs::path prepare_out(const std::string& dir)
{
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw DataError("cannot create output directory " + dir);
    return p;
}

void write_manifest(const fs::path& dir, const Context& ctx, const std::string& command, const Json& config,
                    const Json& outputs, Clock::time_point started, const Json& panels = nullptr)
{
    Json m;
    m["command"] = command;
    m["argv"] = ctx.args;
    m["seed"] = ctx.seed();
    m["seed_source"] = ctx.seed_source();
    m["config"] = config;
    m["outputs"] = outputs;
    m["versions"] = {{"phasefield", kVersion}, {"compiler", __VERSION__}, {"fftw", fft_backend_version()}};
    m["timing"] = {{"seconds", std::chrono::duration<double>(Clock::now() - started).count()},
                   {"threads", omp_get_max_threads()}};
    if (!panels.is_null()) m["panels"] = panels;
    write_json(dir / "manifest.json", m);
}

Json solver_json(const SolverOptions& s)
{
    return {{"tol", s.tol}, {"max_iter", s.max_iter}};
}

// CSV files of a directory in name order, or the file itself.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs)
{
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> files;
            const fs::path panels = fs::is_directory(p / "panels") ? p / "panels" : p;
            for (const auto& e : fs::directory_iterator(panels))
                if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            out.insert(out.end(), files.begin(), files.end());
        } else if (fs::is_regular_file(p)) {
            out.push_back(p);
        } else {
            throw DataError("input not found: " + in);
        }
    }
    if (out.empty()) throw DataError("no input CSV files");
    return out;
}

// Labels recorded by simulate / extract-phase manifests, keyed by file
// name. Manifests are cached per directory.
class LabelIndex {
public:
    std::optional<int> operator()(const fs::path& file)
    {
        const auto& labels = labels_near(file.parent_path());
        const auto it = labels.find(file.filename().string());
        if (it == labels.end()) return std::nullopt;
        return it->second;
    }

private:
    std::map<fs::path, std::map<std::string, int>> cache_;

    const std::map<std::string, int>& labels_near(const fs::path& start)
    {
        if (auto it = cache_.find(start); it != cache_.end()) return it->second;
        auto& out = cache_[start];
        for (auto dir = start; !dir.empty(); dir = dir.parent_path()) {
            const auto mf = dir / "manifest.json";
            if (fs::is_regular_file(mf)) {
                const auto j = read_json(mf);
                if (j.contains("panels"))
                    for (const auto& e : j["panels"])
                        if (e.contains("file") && e.contains("label"))
                            out[fs::path(e["file"].get<std::string>()).filename().string()] = e["label"].get<int>();
                break;
            }
            if (dir == dir.parent_path()) break;
        }
        return out;
    }
};

Json draw_json(const WaveDraw& d)
{
    Json j{{"kind", d.kind}, {"label", d.label}};
    if (d.kind == "plane") {
        j["xi"] = d.xi;
        j["kx"] = d.kx;
        j["ky"] = d.ky;
    } else {
        j["kr"] = d.kr;
        j["rotation"] = d.rotation;
        j["cx"] = d.cx;
        j["cy"] = d.cy;
    }
    return j;
}

Json edges_json(const GraphStructure& g)
{
    Json a = Json::array();
    for (const auto& e : g.edges()) a.push_back(Json::array({e.i, e.j}));
    return a;
}

GraphModel load_graph_model(const fs::path& path)
{
    const auto j = read_json(path);
    return is_tree_json(j) ? tree_model_from_json(j).as_graph_model() : graph_model_from_json(j);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string kind;
    std::string out;
    int p = 8;
    std::optional<int> rows, cols;
    std::size_t n = 1000;
    double kappa = 1.0;
    double mu = 0.0;
    std::size_t burn_in = 10000;
    std::size_t thin = 1;
    std::optional<std::size_t> per_class;
    std::optional<std::size_t> T;
    std::optional<double> dt;
    std::optional<double> omega;
};

int cmd_simulate(const SimulateArgs& a, const Context& ctx)
{
    const auto started = Clock::now();
    const auto dir = prepare_out(a.out);
    const auto seed = ctx.seed();
    Json config{{"kind", a.kind}};
    Json outputs = Json::array();

    if (a.kind == "tree" || a.kind == "grid4") {
        GraphStructure g;
        if (a.kind == "tree") {
            Rng rng(derive_seed(seed, 0));
            g = random_tree(a.p, rng);
            config["p"] = a.p;
        } else {
            const int r = a.rows.value_or(3), c = a.cols.value_or(3);
            g = toroidal_grid(r, c);
            config["rows"] = r;
            config["cols"] = c;
        }
        const auto model = uniform_coupling(g, a.kappa, a.mu);
        const GibbsConfig gc{a.burn_in, a.thin, derive_seed(seed, 1)};
        const auto d = gibbs_sample(model, a.n, gc);
        write_json(dir / "model.json", to_json(model));
        write_dataset_csv(dir / "data.csv", d);
        config.update({{"n", a.n}, {"kappa", a.kappa}, {"mu", a.mu}, {"burn_in", a.burn_in}, {"thin", a.thin},
                       {"edges", edges_json(g)}});
        outputs = Json::array({"model.json", "data.csv"});
        write_manifest(dir, ctx, "simulate", config, outputs, started);
        return kOk;
    }

    fs::create_directories(dir / "panels");
    LabeledPanelSet set;
    if (a.kind == "plane") {
        PlaneWaveSpec spec;
        spec.T = a.T.value_or(spec.T);
        spec.dt = a.dt.value_or(spec.dt);
        spec.omega = a.omega.value_or(spec.omega);
        const int r = a.rows.value_or(8), c = a.cols.value_or(8);
        set = gen_plane_corpus(a.per_class.value_or(100), spec, SensorGrid::unit_spacing(r, c), seed);
        config.update({{"rows", r}, {"cols", c}, {"grid", "unit spacing"}, {"T", spec.T}, {"dt", spec.dt},
                       {"omega", spec.omega}, {"direction_noise_kappa", spec.direction_noise_kappa},
                       {"noise_sd", spec.noise_sd}, {"per_class", a.per_class.value_or(100)}});
    } else {
        EllipticalWaveSpec spec;
        spec.T = a.T.value_or(spec.T);
        spec.dt = a.dt.value_or(spec.dt);
        spec.omega = a.omega.value_or(spec.omega);
        const int r = a.rows.value_or(5), c = a.cols.value_or(5);
        set = gen_elliptical_corpus(a.per_class.value_or(500), spec, SensorGrid::unit_square(r, c), seed);
        config.update({{"rows", r}, {"cols", c}, {"grid", "unit square"}, {"T", spec.T}, {"dt", spec.dt},
                       {"omega", spec.omega}, {"noise_sd", spec.noise_sd},
                       {"per_class", a.per_class.value_or(500)},
                       {"paper_timing", {{"T", 200}, {"dt", 0.02}}}});
    }

    Json panels = Json::array();
    for (std::size_t q = 0; q < set.panels.size(); ++q) {
        char name[32];
        std::snprintf(name, sizeof name, "panel_%05zu.csv", q);
        write_panel_csv(dir / "panels" / name, set.panels[q].panel);
        panels.push_back({{"file", std::string("panels/") + name}, {"label", set.labels[q]},
                          {"params", draw_json(set.panels[q].draw)}});
    }
    config["classes"] = set.classes;
    config["dt"] = set.panels.front().panel.dt;
    write_manifest(dir, ctx, "simulate", config, Json::array({"panels/"}), started, panels);
    return kOk;
}

// ----------------------------------------------------------- extract-phase

struct ExtractArgs {
    std::string in;
    std::string out;
    std::optional<double> dt;
    std::optional<double> low, high;
    std::optional<int> order;
    bool bandpass = false;
    bool keep_edges = false;
};

int cmd_extract_phase(const ExtractArgs& a, const Context& ctx)
{
    const auto started = Clock::now();
    const fs::path in(a.in);
    double dt = 0.0;
    if (a.dt) {
        dt = *a.dt;
    } else if (fs::is_directory(in) && fs::is_regular_file(in / "manifest.json")) {
        const auto mf = read_json(in / "manifest.json");
        if (!mf.contains("config") || !mf["config"].contains("dt")) throw UsageError("--dt is required");
        dt = mf["config"]["dt"].get<double>();
    } else {
        throw UsageError("--dt is required");
    }

    PhaseExtractionOptions opts;
    opts.keep_edges = a.keep_edges;
    if (a.bandpass || a.low || a.high || a.order) {
        BandpassSpec b;
        b.low = a.low.value_or(b.low);
        b.high = a.high.value_or(b.high);
        b.order = a.order.value_or(b.order);
        opts.bandpass = b;
    }

    const auto dir = prepare_out(a.out);
    const auto files = expand_inputs({a.in});
    const bool single = files.size() == 1 && fs::is_regular_file(in);
    if (!single) fs::create_directories(dir / "panels");

    LabelIndex label_of;
    Json panels = Json::array();
    Json outputs = Json::array();
    for (const auto& f : files) {
        const auto panel = read_panel_csv(f, dt);
        const auto phases = instantaneous_phase(panel, opts);
        const auto rel = single ? fs::path("phase.csv") : fs::path("panels") / f.filename();
        write_dataset_csv(dir / rel, phases);
        outputs.push_back(rel.string());
        Json entry{{"file", rel.string()}, {"source", f.string()}};
        if (auto label = label_of(f)) entry["label"] = *label;
        panels.push_back(entry);
    }

    Json config{{"in", a.in}, {"dt", dt}, {"keep_edges", a.keep_edges},
                {"edge_trim_fraction", opts.keep_edges ? 0.0 : opts.edge_fraction}};
    if (opts.bandpass)
        config["bandpass"] = {{"order", opts.bandpass->order}, {"low", opts.bandpass->low},
                              {"high", opts.bandpass->high}, {"note", "order is the total bandpass order"}};
    else
        config["bandpass"] = nullptr;
    write_manifest(dir, ctx, "extract-phase", config, outputs, started, panels);
    return kOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
    std::vector<std::string> in;
    std::string method;
    std::string out;
    std::optional<int> label;
    int root = 0;
    std::optional<double> lambda;
    double eps = 0.05;
    double tol = 1e-9;
    std::size_t max_iter = 20000;
    double threshold = 0.5;
    bool refit = true;
};

PhaseDataset load_pooled(const std::vector<std::string>& inputs, std::optional<int> label, Json& used)
{
    LabelIndex label_of;
    std::vector<PhaseDataset> parts;
    for (const auto& f : expand_inputs(inputs)) {
        if (label) {
            const auto l = label_of(f);
            if (!l || *l != *label) continue;
        }
        parts.push_back(read_dataset_csv(f));
        used.push_back(f.string());
    }
    if (parts.empty()) throw DataError("no datasets matched the inputs");
    for (const auto& d : parts)
        if (d.p() != parts.front().p()) throw DataError("datasets differ in node count");
    return PhaseDataset::concat(parts);
}

int cmd_fit(const FitArgs& a, const Context& ctx)
{
    const auto started = Clock::now();
    Json used = Json::array();
    const auto d = load_pooled(a.in, a.label, used);
    const auto dir = prepare_out(a.out);
    Json config{{"method", a.method}, {"inputs", used}, {"n", d.n()}, {"p", d.p()}};
    if (a.label) config["label"] = *a.label;
    if (a.method == "chowliu") {
        const auto tree = fit_chow_liu(d, a.root);
        write_json(dir / "model.json", to_json(tree));
        config["root"] = a.root;
        config["edges"] = edges_json(tree.structure());
        write_manifest(dir, ctx, "fit", config, Json::array({"model.json"}), started);
        return kOk;
    }

    StructureOptions so;
    so.lambda = a.lambda;
    so.eps = a.eps;
    so.threshold = a.threshold;
    so.solver = {a.tol, a.max_iter};
    const auto est = recover_structure(d, so);
    Json structure{{"lambda", est.solution.lambda}, {"threshold", a.threshold}, {"reliable", est.reliable},
                   {"edges", edges_json(est.structure)}};
    Json kh = Json::array();
    for (int u = 0; u < d.p(); ++u) {
        Json row = Json::array();
        for (int k = 0; k < d.p(); ++k) row.push_back(est.kappa_from(u, k));
        kh.push_back(row);
    }
    structure["kappa_hat"] = kh;
    Json iterations = Json::array();
    for (const auto& n : est.solution.nodes) iterations.push_back({{"iterations", n.iterations}, {"converged", n.converged}});
    structure["nodes"] = iterations;
    write_json(dir / "structure.json", structure);

    GraphModel model;
    bool converged = est.reliable;
    if (a.refit) {
        const auto r = refit_unregularized(d, est.structure, so.solver);
        model = r.model;
        converged = converged && r.converged;
    } else {
        // regularized estimates on the declared edges, endpoint-averaged
        std::vector<EdgeCoupling> cs;
        for (const auto& e : est.structure.edges()) {
            const auto x = est.solution.nodes[std::size_t(e.i)].natural_for(e.j);
            const auto y = est.solution.nodes[std::size_t(e.j)].natural_for(e.i);
            cs.push_back(from_natural({0.5 * (x.theta_c + y.theta_c), 0.5 * (x.theta_s + y.theta_s)}));
        }
        model = GraphModel(est.structure, cs);
    }
    write_json(dir / "model.json", to_json(model));
    config.update({{"lambda", est.solution.lambda}, {"eps", a.eps}, {"threshold", a.threshold},
                   {"refit", a.refit}, {"solver", solver_json(so.solver)}, {"converged", converged},
                   {"edges", edges_json(est.structure)}});
    write_manifest(dir, ctx, "fit", config, Json::array({"model.json", "structure.json"}), started);
    if (!converged) throw NotConverged("one or more node problems did not converge; outputs were written to " + a.out);
    return kOk;
}

// ------------------------------------------------------------------ sample

struct SampleArgs {
    std::string model;
    std::size_t n = 1000;
    std::string out;
    std::size_t burn_in = 10000;
    std::size_t thin = 1;
    std::size_t chains = 1;
};

int cmd_sample(const SampleArgs& a, const Context& ctx)
{
    const auto started = Clock::now();
    const auto model = load_graph_model(a.model);
    if (a.thin < 1) throw UsageError("--thin must be >= 1");
    if (a.chains < 1) throw UsageError("--chains must be >= 1");
    const GibbsConfig gc{a.burn_in, a.thin, ctx.seed()};
    const auto d = a.chains == 1 ? gibbs_sample(model, a.n, gc) : gibbs_sample_chains(model, a.n, a.chains, gc);
    const auto dir = prepare_out(a.out);
    write_dataset_csv(dir / "data.csv", d);
    write_manifest(dir, ctx, "sample", {{"model", a.model}, {"n", a.n}, {"burn_in", a.burn_in}, {"thin", a.thin},
                                         {"chains", a.chains}},
                   Json::array({"data.csv"}), started);
    return kOk;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
    std::vector<std::string> models;
    std::vector<std::string> in;
    std::string out;
    std::string mode = "auto";
};

int cmd_classify(const ClassifyArgs& a, const Context& ctx)
{
    const auto started = Clock::now();
    std::vector<Json> model_json;
    for (const auto& m : a.models) model_json.push_back(read_json(m));
    const bool all_trees = std::all_of(model_json.begin(), model_json.end(), is_tree_json);
    std::string mode = a.mode;
    if (mode == "auto") mode = a.models.size() == 2 && !all_trees ? "llr" : "mary";
    if (mode == "mary" && !all_trees) throw UsageError("mary mode needs tree models (fit --method chowliu)");
    if (mode == "mary" && a.models.size() < 2) throw UsageError("mary mode needs at least two models");
    if (mode == "llr" && a.models.size() != 2) throw UsageError("llr mode needs exactly two models: class 0 then class 1");

    const auto files = expand_inputs(a.in);
    LabelIndex label_of;
    std::vector<PhaseDataset> data;
    for (const auto& f : files) data.push_back(read_dataset_csv(f));

    Json results = Json::array();
    if (mode == "mary") {
        std::vector<TreeModel> trees;
        for (const auto& j : model_json) trees.push_back(tree_model_from_json(j));
        for (std::size_t q = 0; q < files.size(); ++q) {
            const auto dec = mary_classify(data[q], trees);
            Json r{{"input", files[q].string()}, {"prediction", dec.index}, {"log_likelihoods", dec.log_likelihoods}};
            if (auto l = label_of(files[q])) r["label"] = *l;
            results.push_back(r);
        }
    } else {
        std::vector<GraphModel> gm;
        for (const auto& j : model_json)
            gm.push_back(is_tree_json(j) ? tree_model_from_json(j).as_graph_model() : graph_model_from_json(j));
        const auto scores = llr_scores(data, gm[1], gm[0]);
        for (std::size_t q = 0; q < files.size(); ++q) {
            Json r{{"input", files[q].string()}, {"score", scores[q]}};
            if (auto l = label_of(files[q])) r["label"] = *l;
            results.push_back(r);
        }
    }
    const auto dir = prepare_out(a.out);
    write_json(dir / "scores.json", {{"mode", mode}, {"classes", a.models.size()}, {"models", a.models},
                                     {"results", results}});
    write_manifest(dir, ctx, "classify", {{"mode", mode}, {"models", a.models}, {"inputs", a.in}}, Json::array({"scores.json"}),
                   started);
    return kOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string scores;
    std::string out;
    std::optional<int> classes;
    bool csv = false;
};

int cmd_evaluate(const EvaluateArgs& a, const Context& ctx)
{
    const auto started = Clock::now();
    const auto s = read_json(a.scores);
    if (!s.contains("mode") || !s.contains("results")) throw DataError("scores file lacks mode/results");
    const auto mode = s["mode"].get<std::string>();
    const auto dir = prepare_out(a.out);
    Json metrics{{"mode", mode}};
    Json outputs = Json::array({"metrics.json"});

    if (mode == "llr") {
        std::vector<double> s1, s0;
        for (const auto& r : s["results"]) {
            if (!r.contains("label")) throw DataError("every scored dataset needs a label for ROC evaluation");
            (r["label"].get<int>() == 1 ? s1 : s0).push_back(r["score"].get<double>());
        }
        const auto curve = roc(s1, s0);
        Json pts = Json::array();
        for (std::size_t q = 0; q < curve.fpr.size(); ++q) pts.push_back(Json::array({curve.fpr[q], curve.tpr[q]}));
        metrics.update({{"auc", curve.auc}, {"positives", s1.size()}, {"negatives", s0.size()}, {"roc", pts}});
        if (a.csv) {
            std::vector<double> v;
            for (std::size_t q = 0; q < curve.fpr.size(); ++q) {
                v.push_back(curve.fpr[q]);
                v.push_back(curve.tpr[q]);
            }
            write_csv(dir / "roc.csv", {"fpr", "tpr"}, curve.fpr.size(), 2, v);
            outputs.push_back("roc.csv");
        }
    } else {
        std::vector<int> preds, labels;
        for (const auto& r : s["results"]) {
            if (!r.contains("label")) throw DataError("every classified dataset needs a label for evaluation");
            preds.push_back(r["prediction"].get<int>());
            labels.push_back(r["label"].get<int>());
        }
        const int m = a.classes.value_or(s.value("classes", 0));
        const auto cm = confusion(preds, labels, m);
        PlaneClassificationResult tmp;
        tmp.confusion = cm;
        tmp.test_count = preds.size();
        auto rep = report(tmp);
        rep.erase("train");
        rep.erase("seconds");
        metrics.update(rep);
        if (a.csv) {
            std::vector<double> v;
            for (auto c : cm.counts) v.push_back(double(c));
            std::vector<std::string> header;
            for (int c = 0; c < m; ++c) header.push_back("pred" + std::to_string(c));
            write_csv(dir / "confusion.csv", header, std::size_t(m), std::size_t(m), v);
            outputs.push_back("confusion.csv");
        }
    }
    write_json(dir / "metrics.json", metrics);
    write_manifest(dir, ctx, "evaluate", {{"scores", a.scores}}, outputs, started);
    return kOk;
}

// ------------------------------------------------------------------- repro

struct ReproArgs {
    std::string target;
    std::string out;
    bool full = false;
    std::optional<std::size_t> trials;
};

void write_recovery_table(const fs::path& path, const std::vector<RecoveryCell>& cells)
{
    std::ofstream f(path);
    f << "method,p,n,trials,recovered,fraction,unreliable\n";
    for (const auto& c : cells)
        f << c.method << ',' << c.p << ',' << c.n << ',' << c.trials << ',' << c.recovered << ','
          << format_double(c.fraction()) << ',' << c.unreliable << '\n';
}

int cmd_repro(const ReproArgs& a, const Context& ctx)
{
    const auto started = Clock::now();
    const auto dir = prepare_out(a.out);
    const auto seed = ctx.seed();
    Json config{{"target", a.target}, {"scale", a.full ? "full" : "desk"}};
    Json rep;
    Json outputs = Json::array({"report.json"});

    if (a.target == "fig2a") {
        auto cfg = a.full ? TreeRecoveryConfig::full() : TreeRecoveryConfig{};
        cfg.seed = seed;
        if (a.trials) cfg.trials = *a.trials;
        config.update({{"ps", cfg.ps}, {"ns", cfg.ns}, {"trials", cfg.trials}, {"kappa", cfg.kappa},
                       {"burn_in", cfg.burn_in}, {"eps", cfg.iso_options.eps},
                       {"threshold", cfg.iso_options.threshold}});
        const auto cells = run_tree_recovery(cfg);
        rep = report(cells);
        write_recovery_table(dir / "table.csv", cells);
        outputs.push_back("table.csv");
    } else if (a.target == "fig2b") {
        auto cfg = a.full ? GridRecoveryConfig::full() : GridRecoveryConfig{};
        cfg.seed = seed;
        if (a.trials) cfg.trials = *a.trials;
        config.update({{"sides", cfg.sides}, {"ns", cfg.ns}, {"trials", cfg.trials}, {"kappa", cfg.kappa},
                       {"burn_in", cfg.burn_in}, {"eps", cfg.iso_options.eps},
                       {"threshold", cfg.iso_options.threshold}});
        const auto cells = run_grid_recovery(cfg);
        rep = report(cells);
        write_recovery_table(dir / "table.csv", cells);
        outputs.push_back("table.csv");
    } else if (a.target == "fig3a") {
        auto cfg = a.full ? PlaneClassificationConfig::full() : PlaneClassificationConfig{};
        cfg.seed = seed;
        if (a.trials) cfg.per_class = *a.trials;
        config.update({{"grid", cfg.grid}, {"per_class", cfg.per_class}, {"train_fraction", cfg.train_fraction},
                       {"T", cfg.wave.T}, {"dt", cfg.wave.dt}, {"omega", cfg.wave.omega}});
        const auto r = run_plane_classification(cfg);
        rep = report(r);
        std::vector<double> v;
        for (auto c : r.confusion.counts) v.push_back(double(c));
        std::vector<std::string> header;
        for (int c = 0; c < r.confusion.m; ++c) header.push_back("pred" + std::to_string(c));
        write_csv(dir / "confusion.csv", header, std::size_t(r.confusion.m), std::size_t(r.confusion.m), v);
        outputs.push_back("confusion.csv");
    } else {
        auto cfg = a.full ? DensityRocConfig::full() : DensityRocConfig{};
        cfg.seed = seed;
        if (a.trials) cfg.per_class = *a.trials;
        config.update({{"grids", cfg.grids}, {"iso_grids", cfg.iso_grids}, {"per_class", cfg.per_class},
                       {"T", cfg.wave.T}, {"dt", cfg.wave.dt},
                       {"band", {{"order", cfg.band.order}, {"low", cfg.band.low}, {"high", cfg.band.high}}},
                       {"eps", cfg.iso_options.eps}, {"threshold", cfg.iso_options.threshold}});
        const auto entries = run_density_roc(cfg);
        rep = report(entries);
        std::ofstream f(dir / "roc.csv");
        f << "method,grid,fpr,tpr\n";
        for (const auto& e : entries)
            for (std::size_t q = 0; q < e.curve.fpr.size(); ++q)
                f << e.method << ',' << e.grid << ',' << format_double(e.curve.fpr[q]) << ','
                  << format_double(e.curve.tpr[q]) << '\n';
        outputs.push_back("roc.csv");
    }
    write_json(dir / "report.json", rep);
    write_manifest(dir, ctx, "repro", config, outputs, started);
    *ctx.out << strip_timing(rep).dump(2) << '\n';
    return kOk;
}

void emit_error(std::ostream& err, int code, const std::string& kind, const std::string& message)
{
    err << Json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}.dump() << '\n';
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Context ctx;
    ctx.args = args;
    ctx.out = &out;

    CLI::App app{"Phase-coupling graphical models: simulate, extract phases, fit, sample, classify, evaluate."};
    app.name("phasefield");
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Random seed (falls back to $PHASEFIELD_SEED, then 0)");
    app.add_option("--jobs", ctx.jobs, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Generate synthetic phase data or wave panels");
    s->add_option("--kind", sim.kind, "tree | grid4 | plane | elliptical")
        ->required()
        ->check(CLI::IsMember({"tree", "grid4", "plane", "elliptical"}));
    s->add_option("--out", sim.out, "Output directory")->required();
    s->add_option("--p", sim.p, "Nodes of the random tree")->check(CLI::Range(2, 100000));
    s->add_option("--rows", sim.rows, "Grid rows")->check(CLI::Range(1, 10000));
    s->add_option("--cols", sim.cols, "Grid columns")->check(CLI::Range(1, 10000));
    s->add_option("--n", sim.n, "Gibbs samples (tree, grid4)");
    s->add_option("--kappa", sim.kappa, "Edge coupling (tree, grid4)")->check(CLI::NonNegativeNumber);
    s->add_option("--mu", sim.mu, "Edge offset in radians (tree, grid4)");
    s->add_option("--burn-in", sim.burn_in, "Gibbs burn-in sweeps");
    s->add_option("--thin", sim.thin, "Gibbs thinning")->check(CLI::PositiveNumber);
    s->add_option("--per-class", sim.per_class, "Panels per class (plane, elliptical)")->check(CLI::PositiveNumber);
    s->add_option("--T", sim.T, "Time samples per panel")->check(CLI::Range(std::size_t(2), std::size_t(1) << 30));
    s->add_option("--dt", sim.dt, "Seconds per sample")->check(CLI::PositiveNumber);
    s->add_option("--omega", sim.omega, "Angular frequency, rad/s");

    ExtractArgs ex;
    auto* e = app.add_subcommand("extract-phase", "Instantaneous phase of measurement panels");
    e->add_option("--in", ex.in, "Panel CSV or directory of panel CSVs")->required();
    e->add_option("--out", ex.out, "Output directory")->required();
    e->add_option("--dt", ex.dt, "Seconds per sample (read from the input manifest when omitted)")
        ->check(CLI::PositiveNumber);
    e->add_flag("--bandpass", ex.bandpass, "Apply the default Butterworth bandpass before the Hilbert step");
    e->add_option("--low", ex.low, "Bandpass low edge, Hz (implies --bandpass)");
    e->add_option("--high", ex.high, "Bandpass high edge, Hz (implies --bandpass)");
    e->add_option("--order", ex.order, "Total bandpass order, even (implies --bandpass)");
    e->add_flag("--keep-edges", ex.keep_edges, "Keep the first and last 5% of time points");

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit a Chow-Liu tree or an ISO graphical model");
    f->add_option("--in", fit.in, "Phase CSV files or directories (pooled)")->required();
    f->add_option("--method", fit.method, "chowliu | iso")->required()->check(CLI::IsMember({"chowliu", "iso"}));
    f->add_option("--out", fit.out, "Output directory")->required();
    f->add_option("--label", fit.label, "Only pool inputs with this manifest label");
    f->add_option("--root", fit.root, "Root node of the Chow-Liu tree")->check(CLI::NonNegativeNumber);
    f->add_option("--lambda", fit.lambda, "ISO penalty (default: structure schedule)")->check(CLI::NonNegativeNumber);
    f->add_option("--eps", fit.eps, "Failure probability of the penalty schedule")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    f->add_option("--tol", fit.tol, "Solver tolerance")->check(CLI::PositiveNumber);
    f->add_option("--max-iter", fit.max_iter, "Solver iteration cap")->check(CLI::PositiveNumber);
    f->add_option("--threshold", fit.threshold, "Edge declaration threshold on kappa-hat")->check(CLI::NonNegativeNumber);
    f->add_flag("--refit,!--no-refit", fit.refit, "Unregularized refit on the declared edges (default on)");

    SampleArgs sa;
    auto* sm = app.add_subcommand("sample", "Gibbs samples from a model JSON");
    sm->add_option("--model", sa.model, "Model JSON (graph or tree)")->required()->check(CLI::ExistingFile);
    sm->add_option("--n", sa.n, "Samples per chain")->check(CLI::PositiveNumber);
    sm->add_option("--out", sa.out, "Output directory")->required();
    sm->add_option("--burn-in", sa.burn_in, "Burn-in sweeps");
    sm->add_option("--thin", sa.thin, "Keep every thin-th sweep");
    sm->add_option("--chains", sa.chains, "Independent chains");

    ClassifyArgs cl;
    auto* c = app.add_subcommand("classify", "Score datasets against class models");
    c->add_option("--models", cl.models, "Model JSONs in class order")->required()->check(CLI::ExistingFile);
    c->add_option("--in", cl.in, "Phase CSV files or directories")->required();
    c->add_option("--out", cl.out, "Output directory")->required();
    c->add_option("--mode", cl.mode, "auto | mary | llr")->check(CLI::IsMember({"auto", "mary", "llr"}));

    EvaluateArgs ev;
    auto* v = app.add_subcommand("evaluate", "ROC / confusion metrics from classify output");
    v->add_option("--scores", ev.scores, "scores.json from classify")->required()->check(CLI::ExistingFile);
    v->add_option("--out", ev.out, "Output directory")->required();
    v->add_option("--classes", ev.classes, "Class count for the confusion matrix")->check(CLI::PositiveNumber);
    v->add_flag("--csv", ev.csv, "Also write CSV tables");

    ReproArgs rp;
    auto* r = app.add_subcommand("repro", "Reproduce an experiment table at desk (default) or full scale");
    r->add_option("target", rp.target, "fig2a | fig2b | fig3a | fig3b")
        ->required()
        ->check(CLI::IsMember({"fig2a", "fig2b", "fig3a", "fig3b"}));
    r->add_option("--out", rp.out, "Output directory")->required();
    r->add_flag("--full", rp.full, "Paper-scale grids (slow)");
    r->add_option("--trials", rp.trials, "Override trials (fig2a/fig2b) or panels per class (fig3a/fig3b)")
        ->check(CLI::PositiveNumber);

    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& ex) {
        emit_error(err, kUsage, "usage", ex.what());
        return kUsage;
    }
    if (seed_opt->count() > 0) ctx.seed_flag = seed;
    if (ctx.jobs > 0) omp_set_num_threads(ctx.jobs);

    try {
        if (s->parsed()) return cmd_simulate(sim, ctx);
        if (e->parsed()) return cmd_extract_phase(ex, ctx);
        if (f->parsed()) return cmd_fit(fit, ctx);
        if (sm->parsed()) return cmd_sample(sa, ctx);
        if (c->parsed()) return cmd_classify(cl, ctx);
        if (v->parsed()) return cmd_evaluate(ev, ctx);
        if (r->parsed()) return cmd_repro(rp, ctx);
    } catch (const UsageError& ex) {
        emit_error(err, kUsage, "usage", ex.what());
        return kUsage;
    } catch (const NotConverged& ex) {
        emit_error(err, kNotConverged, "convergence", ex.what());
        return kNotConverged;
    } catch (const DataError& ex) {
        emit_error(err, kDataError, "data", ex.what());
        return kDataError;
    } catch (const std::invalid_argument& ex) {
        emit_error(err, kDataError, "data", ex.what());
        return kDataError;
    } catch (const std::out_of_range& ex) {
        emit_error(err, kDataError, "data", ex.what());
        return kDataError;
    } catch (const nlohmann::json::exception& ex) {
        emit_error(err, kDataError, "data", ex.what());
        return kDataError;
    } catch (const fs::filesystem_error& ex) {
        emit_error(err, kDataError, "data", ex.what());
        return kDataError;
    }
    emit_error(err, kUsage, "usage", "no subcommand");
    return kUsage;
}

} // namespace phasefield::cli
