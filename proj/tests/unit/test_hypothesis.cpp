#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "phasefield/hypothesis.hpp"
#include "phasefield/sampler.hpp"

using namespace phasefield;

namespace {

// Mann-Whitney by explicit pair counting, ties as one half.
double pair_count_auc(const std::vector<double>& s1, const std::vector<double>& s0)
{
    double wins = 0.0;
    for (double a : s1)
        for (double b : s0) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    return wins / double(s1.size() * s0.size());
}

} // namespace

TEST_CASE("ROC AUC equals the pair-counting statistic")
{
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> s1(1 + rng.below(40)), s0(1 + rng.below(40));
        // coarse values so ties are common
        for (auto& v : s1) v = std::round(rng.normal(0.5, 1.0) * 3.0) / 3.0;
        for (auto& v : s0) v = std::round(rng.normal(0.0, 1.0) * 3.0) / 3.0;
        const auto c = roc(s1, s0);
        CHECK(c.auc == doctest::Approx(pair_count_auc(s1, s0)).epsilon(1e-12));
        CHECK(c.fpr.front() == 0.0);
        CHECK(c.tpr.front() == 0.0);
        CHECK(c.fpr.back() == 1.0);
        CHECK(c.tpr.back() == 1.0);
        CHECK(std::isinf(c.thresholds.front()));
        for (std::size_t k = 1; k < c.fpr.size(); ++k) {
            CHECK(c.fpr[k] >= c.fpr[k - 1]);
            CHECK(c.tpr[k] >= c.tpr[k - 1]);
        }
    }
    const std::vector<double> hi{2.0, 3.0}, lo{0.0, 1.0};
    CHECK(roc(hi, lo).auc == 1.0);
    CHECK(roc(lo, hi).auc == 0.0);
    CHECK(roc(lo, lo).auc == 0.5);
    CHECK_THROWS(roc({}, lo));
    CHECK_THROWS(roc(std::vector<double>{std::nan("")}, lo));
}

TEST_CASE("circular distance and confusion matrix")
{
    CHECK(circular_distance(0, 15, 16) == 1);
    CHECK(circular_distance(3, 11, 16) == 8);
    CHECK(circular_distance(2, 2, 16) == 0);
    const std::vector<int> preds{0, 1, 15, 3, 3, 0};
    const std::vector<int> labels{0, 1, 0, 2, 3, 8};
    const auto cm = confusion(preds, labels, 16);
    CHECK(cm.total() == 6);
    CHECK(cm.correct() == 3);
    CHECK(cm.accuracy() == doctest::Approx(0.5));
    CHECK(cm.at(0, 15) == 1);
    CHECK(cm.row_total(0) == 2);
    const auto dist = cm.error_distances();
    CHECK(dist.at(1) == 2);
    CHECK(dist.at(8) == 1);
    CHECK(cm.adjacent_error_fraction() == doctest::Approx(2.0 / 3.0));
    const std::vector<int> ok{1, 2};
    CHECK(confusion(ok, ok, 4).adjacent_error_fraction() == 1.0);
    CHECK_THROWS_AS(confusion(std::vector<int>{4}, std::vector<int>{0}, 4), std::out_of_range);
}

TEST_CASE("llr score is the mean energy difference")
{
    const auto m1 = GraphModel::from_oriented(3, {{{0, 1}, {1.0, Angle(0.0)}}});
    const auto m0 = GraphModel::from_oriented(3, {{{1, 2}, {2.0, Angle(0.5)}}});
    Rng rng(3);
    PhaseDataset d(50, 3);
    for (std::size_t k = 0; k < 50; ++k)
        for (int u = 0; u < 3; ++u) d.set(k, u, rng.uniform_angle());
    double want = 0.0;
    for (std::size_t k = 0; k < 50; ++k) want += unnorm_log_density(d.row(k), m1) - unnorm_log_density(d.row(k), m0);
    CHECK(llr_score(d, m1, m0) == doctest::Approx(want / 50.0).epsilon(1e-13));
    const std::vector<PhaseDataset> many{d, d.slice(0, 10)};
    const auto s = llr_scores(many, m1, m0);
    CHECK(s[0] == llr_score(d, m1, m0));
    CHECK(s[1] == llr_score(d.slice(0, 10), m1, m0));

    // data drawn from m1 scores higher on average than data from m0
    const auto a = gibbs_sample(m1, 2000, {500, 1, 1});
    const auto b = gibbs_sample(m0, 2000, {500, 1, 2});
    CHECK(llr_score(a, m1, m0) > llr_score(b, m1, m0));
    CHECK(BinaryTestResult{0.3, 1}.decide(0.2) == 1);
    CHECK(BinaryTestResult{0.2, 1}.decide(0.2) == 0);
}

TEST_CASE("M-ary decision picks the highest tree likelihood, lowest index on ties")
{
    const TreeModel a(0, {{0, 1, 3.0, Angle(0.0)}});
    const TreeModel b(0, {{0, 1, 3.0, Angle(kPi)}});
    const auto da = gibbs_sample(a.as_graph_model(), 200, {100, 1, 4});
    const std::vector<TreeModel> models{b, a, a};
    const auto dec = mary_classify(da, models);
    CHECK(dec.index == 1);
    CHECK(dec.log_likelihoods.size() == 3);
    CHECK(dec.log_likelihoods[1] == dec.log_likelihoods[2]);
    CHECK(dec.log_likelihoods[1] == doctest::Approx(tree_log_likelihood(da, a)));
    CHECK_THROWS(mary_classify(da, std::vector<TreeModel>{a}));
}
