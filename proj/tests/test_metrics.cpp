#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idrr/errors.hpp"
#include "idrr/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace idrr;

namespace {

using Labels = std::vector<std::size_t>;

double js(const std::vector<double>& p, const std::vector<double>& q) { return js_distance(p, q); }

// Calls f(pred, gold) for every pair of label sequences of length n over `space` labels.
template <typename F>
void for_all_assignments(std::size_t space, std::size_t n, F f) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < 2 * n; ++i) total *= space;
    Labels pred(n), gold(n);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i, c /= space) pred[i] = c % space;
        for (std::size_t i = 0; i < n; ++i, c /= space) gold[i] = c % space;
        f(pred, gold);
    }
}

}  // namespace

TEST_CASE("js distance examples") {
    CHECK(js({0.2, 0.8}, {0.2, 0.8}) == 0.0);
    CHECK(js({1, 0}, {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::round(js({1, 0}, {0.5, 0.5}) * 1e4) / 1e4 == doctest::Approx(0.5579));
    CHECK_THROWS_AS(js({1, 0}, {1, 0, 0}), LabelSpaceError);
    CHECK_THROWS_AS(js({0.7, 0.7}, {1, 0}), DataError);
    CHECK_THROWS_AS(js_distance(LabelDistribution{Level::One, {1, 0}}, LabelDistribution{Level::Two, {1, 0}}),
                    LabelSpaceError);
}

TEST_CASE("property: js distance is a bounded metric") {
    Rng rng(1000);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(14);
        const auto p = testing::random_distribution(rng, n);
        const auto q = testing::random_distribution(rng, n);
        const auto r = testing::random_distribution(rng, n);
        const double pq = js(p, q), qr = js(q, r), pr = js(p, r);
        CHECK(pq >= 0.0);
        CHECK(pq <= 1.0);
        CHECK(js(p, p) <= 1e-7);
        CHECK(pq == js(q, p));
        CHECK(pr <= pq + qr + 1e-12);
        CHECK(std::abs(pq - oracle::js(p, q)) <= 1e-12);
        // Common permutation of coordinates.
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        std::vector<double> pp(n), qq(n);
        for (std::size_t i = 0; i < n; ++i) {
            pp[i] = p[perm[i]];
            qq[i] = q[perm[i]];
        }
        CHECK(std::abs(js(pp, qq) - pq) <= 1e-12);
    }
}

TEST_CASE("mean_js") {
    const auto& h = SenseHierarchy::standard();
    Rng rng(5);
    std::vector<RelationInstance> targets;
    std::vector<PredictionRecord> preds;
    for (int i = 0; i < 5; ++i) {
        targets.push_back(testing::random_instance(rng, "t" + std::to_string(i)));
        PredictionRecord p;
        p.id = targets.back().id;
        for (std::size_t l = 0; l < 3; ++l) {
            p.dist.push_back(targets.back().dist[l]);
            p.label.push_back(targets.back().majority[l]);
        }
        preds.push_back(p);
    }
    CHECK(mean_js(preds, targets) == std::array<double, 3>{0, 0, 0});
    std::reverse(preds.begin(), preds.end());
    CHECK(mean_js(preds, targets) == std::array<double, 3>{0, 0, 0});
    preds[0].id = "other";
    CHECK_THROWS_AS(mean_js(preds, targets), DataError);
    preds.pop_back();
    CHECK_THROWS_AS(mean_js(preds, targets), DataError);

    // Distances 0.2 and 0.4 average to 0.3: build them from two-sense distributions.
    (void)h;
    const std::vector<double> base{1, 0};
    auto at_distance = [&](double target) {
        double lo = 0, hi = 1;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (js(base, {1 - mid, mid}) < target ? lo : hi) = mid;
        }
        return std::vector<double>{1 - lo, lo};
    };
    CHECK((js(base, at_distance(0.2)) + js(base, at_distance(0.4))) / 2 == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("weighted f1 examples") {
    const Labels a{0, 0, 1};
    CHECK(weighted_f1(Labels{0, 0, 1}, a, 2) == 100.0);
    CHECK(format_percentage(weighted_f1(Labels{0, 0, 0}, a, 2)) == "53.33");
    CHECK(weighted_f1(Labels{1, 1, 0}, a, 2) == 0.0);
    CHECK_THROWS_AS(weighted_f1(Labels{0, 3}, Labels{0, 1}, 2), LabelSpaceError);
    CHECK_THROWS_AS(weighted_f1(Labels{0}, Labels{0, 1}, 2), DataError);
}

TEST_CASE("oracle: weighted f1 on every assignment for small spaces") {
    std::size_t checked = 0;
    for (std::size_t space = 1; space <= 3; ++space) {
        for (std::size_t n = 1; n <= 4; ++n) {
            for_all_assignments(space, n, [&](const Labels& pred, const Labels& gold) {
                ++checked;
                const double got = weighted_f1(pred, gold, space);
                const double want = oracle::weighted_f1(pred, gold, space);
                if (std::abs(got - want) > 1e-9) {
                    CHECK(got == doctest::Approx(want));
                }
            });
        }
    }
    for (std::size_t n = 1; n <= 5; ++n) {
        for_all_assignments(4, n, [&](const Labels& pred, const Labels& gold) {
            ++checked;
            if (std::abs(weighted_f1(pred, gold, 4) - oracle::weighted_f1(pred, gold, 4)) > 1e-9) FAIL("mismatch");
        });
    }
    CHECK(checked > 1000000);
}

TEST_CASE("property: weighted f1 is the support-weighted mean of per-sense f1") {
    Rng rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t space = 2 + rng.below(6), n = 1 + rng.below(30);
        Labels pred(n), gold(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = rng.below(space);
            gold[i] = rng.below(space);
        }
        const auto per = per_sense_f1(pred, gold, space);
        double weighted = 0.0;
        for (const auto& s : per) weighted += s.f1 * static_cast<double>(s.support) / static_cast<double>(n);
        CHECK(std::abs(weighted - weighted_f1(pred, gold, space)) <= 1e-9);
        const auto cm = confusion_matrix(pred, gold, space);
        std::size_t total = 0;
        for (std::size_t g = 0; g < space; ++g) {
            const std::size_t row = std::accumulate(cm[g].begin(), cm[g].end(), std::size_t{0});
            total += row;
            CHECK(row == per[g].support);
        }
        CHECK(total == n);
    }
}

TEST_CASE("per-sense f1 and markers") {
    SUBCASE("absent sense") {
        const auto per = per_sense_f1(Labels{0, 1}, Labels{0, 1}, 3);
        CHECK(per[2].marker == SenseMarker::NotInGold);
        CHECK(std::string(marker_text(per[2].marker)) == "-");
    }
    SUBCASE("all correct") { CHECK(per_sense_f1(Labels{0, 0}, Labels{0, 0}, 2)[0].f1 == 100.0); }
    SUBCASE("swapped") {
        const auto per = per_sense_f1(Labels{1, 0}, Labels{0, 1}, 2);
        CHECK(per[0].f1 == 0.0);
        CHECK(per[1].f1 == 0.0);
        CHECK(per[0].marker == SenseMarker::None);
    }
    SUBCASE("predicted but never gold is still marked absent") {
        const auto per = per_sense_f1(Labels{2, 0}, Labels{0, 0}, 3);
        CHECK(per[2].marker == SenseMarker::NotInGold);
        CHECK(per[2].predicted == 1);
    }
}

TEST_CASE("confusion matrix") {
    CHECK(confusion_matrix(Labels{0, 1}, Labels{0, 1}, 2) == ConfusionMatrix{{1, 0}, {0, 1}});
    CHECK(confusion_matrix(Labels{0, 1, 1}, Labels{0, 0, 1}, 2) == ConfusionMatrix{{1, 1}, {0, 1}});
    CHECK(confusion_matrix(Labels{}, Labels{}, 2) == ConfusionMatrix{{0, 0}, {0, 0}});
    const auto& h = SenseHierarchy::standard();
    const std::string csv = confusion_to_csv(confusion_matrix(Labels{0, 1}, Labels{0, 1}, 4), h, Level::One);
    CHECK(csv.rfind("gold\\predicted,Temporal,Contingency,Comparison,Expansion\n", 0) == 0);
}

TEST_CASE("evaluation reports") {
    const auto& h = SenseHierarchy::standard();
    SingleLabelInstance a{"a", 23, "x", "y", 1, 2};
    SingleLabelInstance b{"b", 23, "x", "y", 3, 8};
    PredictionRecord pa{"a", {one_hot(Level::One, 4, 1), one_hot(Level::Two, 14, 2)}, {1, 2}};
    PredictionRecord pb{"b", {one_hot(Level::One, 4, 1), one_hot(Level::Two, 14, 2)}, {1, 2}};
    const auto report = evaluate_single_label({pb, pa}, {a, b}, h);
    REQUIRE(report.levels.size() == 2);
    CHECK_FALSE(report.levels[0].js_mean.has_value());
    CHECK(report.levels[0].f1_weighted == doctest::Approx(100.0 * 0.5 * (2.0 / 3.0)));
    CHECK(report.levels[1].per_sense[8].marker == SenseMarker::None);
    CHECK(report.levels[1].per_sense[0].marker == SenseMarker::NotInGold);
    const std::string text = format_report_text(report, h, "t");
    CHECK(text.find("Cause") != std::string::npos);
}
