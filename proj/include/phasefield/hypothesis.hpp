#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "phasefield/chow_liu.hpp"
#include "phasefield/model.hpp"

namespace phasefield {

/// (1/n) sum_k [energy(y_k; m1) - energy(y_k; m0)]. Both log partition
/// functions are omitted: they shift every score by the same constant, which
/// moves the threshold but leaves the ROC curve unchanged.
double llr_score(const PhaseDataset& d, const GraphModel& m1, const GraphModel& m0);

/// llr_score for every dataset, computed in parallel.
std::vector<double> llr_scores(std::span<const PhaseDataset> datasets, const GraphModel& m1, const GraphModel& m0);

struct BinaryTestResult {
    double score = 0.0;
    int label = 0;

    /// Class 1 when the score exceeds the threshold.
    int decide(double threshold) const { return score > threshold ? 1 : 0; }
};

struct MaryDecision {
    int index = 0;
    /// Total tree log-likelihood of the dataset under each class model.
    std::vector<double> log_likelihoods;
};

/// Maximum likelihood class; exact ties go to the lowest index.
MaryDecision mary_classify(const PhaseDataset& d, std::span<const TreeModel> models);

struct RocCurve {
    /// From (0, 0) to (1, 1), nondecreasing in both coordinates.
    std::vector<double> fpr;
    std::vector<double> tpr;
    /// Score threshold of each point (declare class 1 when score >= threshold);
    /// +inf for the first point.
    std::vector<double> thresholds;
    double auc = 0.0;
};

/// Threshold sweep over the pooled distinct scores with trapezoidal AUC.
/// Tied scores produce a diagonal step, so the AUC equals the normalized
/// Mann-Whitney statistic with ties counted one half.
RocCurve roc(std::span<const double> scores_class1, std::span<const double> scores_class0);

/// min(|a - b|, M - |a - b|).
int circular_distance(int a, int b, int m);

struct ConfusionMatrix {
    int m = 0;
    /// counts[truth * m + prediction].
    std::vector<std::size_t> counts;

    std::size_t at(int truth, int pred) const { return counts[std::size_t(truth) * std::size_t(m) + std::size_t(pred)]; }
    std::size_t total() const;
    std::size_t correct() const;
    double accuracy() const;
    std::size_t row_total(int truth) const;
    /// Error count keyed by circular distance between truth and prediction.
    std::map<int, std::size_t> error_distances() const;
    /// Fraction of errors at circular distance 1 (1 when there are no errors).
    double adjacent_error_fraction() const;
};

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> labels, int m);

} // namespace phasefield
