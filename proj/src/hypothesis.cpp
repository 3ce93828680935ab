#include "phasefield/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>

#include "phasefield/kernels.hpp"

namespace phasefield {

namespace {

void check_nodes(const PhaseDataset& d, const GraphModel& m1, const GraphModel& m0)
{
    if (m1.p() != m0.p()) throw std::invalid_argument("llr_score: models differ in node count");
    if (d.p() != m1.p()) throw std::invalid_argument("llr_score: dataset and models differ in node count");
    if (d.n() == 0) throw std::invalid_argument("llr_score: empty dataset");
}

} // namespace

double llr_score(const PhaseDataset& d, const GraphModel& m1, const GraphModel& m0)
{
    check_nodes(d, m1, m0);
    const double total = kernels::blocked_sum(d.n(), [&](std::size_t k) {
        const auto y = d.row(k);
        return unnorm_log_density(y, m1) - unnorm_log_density(y, m0);
    });
    return total / double(d.n());
}

std::vector<double> llr_scores(std::span<const PhaseDataset> datasets, const GraphModel& m1, const GraphModel& m0)
{
    for (const auto& d : datasets) check_nodes(d, m1, m0);
    std::vector<double> out(datasets.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 0; q < std::ptrdiff_t(datasets.size()); ++q)
        out[std::size_t(q)] = llr_score(datasets[std::size_t(q)], m1, m0);
    return out;
}

MaryDecision mary_classify(const PhaseDataset& d, std::span<const TreeModel> models)
{
    if (models.size() < 2) throw std::invalid_argument("mary_classify: at least two models are required");
    for (const auto& m : models)
        if (m.p() != d.p()) throw std::invalid_argument("mary_classify: model and dataset differ in node count");
    MaryDecision out;
    for (const auto& m : models) out.log_likelihoods.push_back(tree_log_likelihood(d, m));
    for (std::size_t c = 1; c < models.size(); ++c)
        if (out.log_likelihoods[c] > out.log_likelihoods[std::size_t(out.index)]) out.index = int(c);
    return out;
}

RocCurve roc(std::span<const double> scores_class1, std::span<const double> scores_class0)
{
    if (scores_class1.empty() || scores_class0.empty()) throw std::invalid_argument("roc: both score lists must be nonempty");
    for (double s : scores_class1)
        if (std::isnan(s)) throw std::invalid_argument("roc: NaN score");
    for (double s : scores_class0)
        if (std::isnan(s)) throw std::invalid_argument("roc: NaN score");

    std::vector<double> pos(scores_class1.begin(), scores_class1.end());
    std::vector<double> neg(scores_class0.begin(), scores_class0.end());
    std::sort(pos.begin(), pos.end(), std::greater<>());
    std::sort(neg.begin(), neg.end(), std::greater<>());
    std::vector<double> all = pos;
    all.insert(all.end(), neg.begin(), neg.end());
    std::sort(all.begin(), all.end(), std::greater<>());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    const double n1 = double(pos.size());
    const double n0 = double(neg.size());
    RocCurve c;
    c.fpr.push_back(0.0);
    c.tpr.push_back(0.0);
    c.thresholds.push_back(std::numeric_limits<double>::infinity());
    std::size_t ip = 0, in = 0;
    for (double t : all) {
        while (ip < pos.size() && pos[ip] >= t) ++ip;
        while (in < neg.size() && neg[in] >= t) ++in;
        const double f = double(in) / n0;
        const double r = double(ip) / n1;
        c.auc += 0.5 * (f - c.fpr.back()) * (r + c.tpr.back());
        c.fpr.push_back(f);
        c.tpr.push_back(r);
        c.thresholds.push_back(t);
    }
    return c;
}

int circular_distance(int a, int b, int m)
{
    const int d = std::abs(a - b) % m;
    return std::min(d, m - d);
}

std::size_t ConfusionMatrix::total() const
{
    std::size_t t = 0;
    for (auto v : counts) t += v;
    return t;
}

std::size_t ConfusionMatrix::correct() const
{
    std::size_t t = 0;
    for (int c = 0; c < m; ++c) t += at(c, c);
    return t;
}

double ConfusionMatrix::accuracy() const
{
    const auto t = total();
    return t == 0 ? 0.0 : double(correct()) / double(t);
}

std::size_t ConfusionMatrix::row_total(int truth) const
{
    std::size_t t = 0;
    for (int c = 0; c < m; ++c) t += at(truth, c);
    return t;
}

std::map<int, std::size_t> ConfusionMatrix::error_distances() const
{
    std::map<int, std::size_t> out;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (a != b && at(a, b) > 0) out[circular_distance(a, b, m)] += at(a, b);
    return out;
}

double ConfusionMatrix::adjacent_error_fraction() const
{
    const auto errors = total() - correct();
    if (errors == 0) return 1.0;
    const auto d = error_distances();
    const auto it = d.find(1);
    return it == d.end() ? 0.0 : double(it->second) / double(errors);
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> labels, int m)
{
    if (m < 1) throw std::invalid_argument("confusion: class count must be >= 1");
    if (preds.size() != labels.size()) throw std::invalid_argument("confusion: predictions and labels differ in length");
    ConfusionMatrix c{m, std::vector<std::size_t>(std::size_t(m) * std::size_t(m), 0)};
    for (std::size_t q = 0; q < preds.size(); ++q) {
        if (labels[q] < 0 || labels[q] >= m) throw std::out_of_range("confusion: label out of range");
        if (preds[q] < 0 || preds[q] >= m) throw std::out_of_range("confusion: prediction out of range");
        ++c.counts[std::size_t(labels[q]) * std::size_t(m) + std::size_t(preds[q])];
    }
    return c;
}

} // namespace phasefield
