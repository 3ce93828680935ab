#pragma once

// Reproduction drivers for the recovery and classification experiments.
// Defaults are desk scale; the *_full() helpers return the larger grids.
// Every driver is deterministic given its seed; only the timing fields vary
// between runs.

#include <cstdint>
#include <string>
#include <vector>

#include "phasefield/hypothesis.hpp"
#include "phasefield/io.hpp"
#include "phasefield/iso.hpp"
#include "phasefield/signal.hpp"
#include "phasefield/wave_sim.hpp"

namespace phasefield {

struct RecoveryCell {
    std::string method;
    int p = 0;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t recovered = 0;
    /// ISO trials with an unconverged node problem.
    std::size_t unreliable = 0;
    double mean_seconds = 0.0;

    double fraction() const { return trials == 0 ? 0.0 : double(recovered) / double(trials); }
};

// Within one trial every sample size uses a prefix of the same Gibbs chain,
// so differences between sample sizes are not masked by independent draws.
struct TreeRecoveryConfig {
    std::vector<int> ps{4, 8};
    std::vector<std::size_t> ns{250, 1000, 4000};
    std::size_t trials = 20;
    double kappa = 1.0;
    std::size_t burn_in = 10000;
    bool chow_liu = true;
    bool iso = true;
    StructureOptions iso_options;
    std::uint64_t seed = 1;

    static TreeRecoveryConfig full();
};

std::vector<RecoveryCell> run_tree_recovery(const TreeRecoveryConfig& cfg);

struct GridRecoveryConfig {
    /// Side lengths of the square toroidal grids.
    std::vector<int> sides{3};
    std::vector<std::size_t> ns{500, 2000, 8000};
    std::size_t trials = 15;
    double kappa = 1.0;
    std::size_t burn_in = 10000;
    StructureOptions iso_options;
    std::uint64_t seed = 2;

    static GridRecoveryConfig full();
};

std::vector<RecoveryCell> run_grid_recovery(const GridRecoveryConfig& cfg);

/// Instantaneous phases of every panel, computed in parallel.
std::vector<PhaseDataset> extract_phases(const LabeledPanelSet& set, const PhaseExtractionOptions& opts);

/// Rows of the selected datasets stacked in index order.
PhaseDataset pool(const std::vector<PhaseDataset>& datasets, const std::vector<std::size_t>& indices);

struct PlaneClassificationConfig {
    int grid = 4;
    std::size_t per_class = 30;
    double train_fraction = 0.8;
    PlaneWaveSpec wave;
    std::uint64_t seed = 3;

    static PlaneClassificationConfig full();
};

struct PlaneClassificationResult {
    ConfusionMatrix confusion;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    std::vector<int> predictions;
    std::vector<int> labels;
    double fit_seconds = 0.0;
};

PlaneClassificationResult run_plane_classification(const PlaneClassificationConfig& cfg);

struct DensityRocConfig {
    std::vector<int> grids{3, 5};
    /// Grids on which the ISO fit is run (the ISO is much slower).
    std::vector<int> iso_grids{3, 5};
    std::size_t per_class = 100;
    double train_fraction = 0.8;
    EllipticalWaveSpec wave = desk_wave();
    BandpassSpec band;
    StructureOptions iso_options;
    std::uint64_t seed = 4;

    static EllipticalWaveSpec desk_wave();
    static DensityRocConfig full();
};

struct RocEntry {
    std::string method;
    int grid = 0;
    RocCurve curve;
    std::size_t model_edges = 0;
    double fit_seconds = 0.0;
};

std::vector<RocEntry> run_density_roc(const DensityRocConfig& cfg);

// JSON reports. Timing values live under "seconds" keys so that
// strip_timing() can remove them for reproducibility comparisons.
Json report(const std::vector<RecoveryCell>& cells);
Json report(const PlaneClassificationResult& r);
Json report(const std::vector<RocEntry>& entries);
Json strip_timing(const Json& j);

} // namespace phasefield
