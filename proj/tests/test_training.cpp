#include <doctest.h>

#include <cmath>
#include <numbers>

#include "desk.hpp"
#include "idrr/analysis.hpp"
#include "idrr/errors.hpp"
#include "idrr/schedule.hpp"
#include "idrr/training.hpp"
#include "support.hpp"

using namespace idrr;

namespace {

const SenseHierarchy& H() { return SenseHierarchy::standard(); }

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.model.encoder.model_id = "hash-encoder-32";
    c.model.encoder.max_tokens = 32;
    c.model.trunk_width = 16;
    c.loss = LossKind::Mae;
    c.base_lr = 0.02;
    c.schedule = ScheduleKind::CosineAnnealing;
    c.epochs = 6;
    c.batch_size = 5;
    c.seeds = {1};
    return c;
}

// Written out independently of the implementation.
double reference_lr(ScheduleKind kind, double base, int epochs, double t) {
    switch (kind) {
        case ScheduleKind::None: return base;
        case ScheduleKind::Linear: return t >= 5.0 ? base / 2.0 : base - base * t / 10.0;
        case ScheduleKind::CosineAnnealing: {
            const double x = 4.0 * std::numbers::pi * t / epochs;
            return base * (3.0 + std::cos(x)) / 4.0;
        }
    }
    return 0.0;
}

}  // namespace

TEST_CASE("schedule anchors") {
    const double base = 1e-5;
    const auto linear = make_schedule(ScheduleKind::Linear, base, 10);
    CHECK(std::abs(linear(0) - base) <= 1e-12);
    CHECK(std::abs(linear(5) - base / 2) <= 1e-12);
    CHECK(std::abs(linear(9) - base / 2) <= 1e-12);
    const auto cosine = make_schedule(ScheduleKind::CosineAnnealing, base, 10);
    CHECK(std::abs(cosine(0) - base) <= 1e-12);
    CHECK(std::abs(cosine(2.5) - base / 2) <= 1e-12);
    CHECK(std::abs(cosine(5) - base) <= 1e-12);
    CHECK(make_schedule(ScheduleKind::None, base, 10)(7.3) == base);

    ScheduleOptions restart;
    restart.cosine_restarts = true;
    const auto hard = make_schedule(ScheduleKind::CosineAnnealing, base, 10, restart);
    CHECK(std::abs(hard(0) - base) <= 1e-12);
    CHECK(std::abs(hard(5) - base) <= 1e-12);
    CHECK(hard(4.99) < 0.51 * base);

    CHECK_THROWS_AS(make_schedule(ScheduleKind::Linear, 0.0, 10), ConfigError);
    CHECK_THROWS_AS(make_schedule(ScheduleKind::Linear, base, 0), ConfigError);
    CHECK_THROWS_AS(parse_schedule_kind("step"), ConfigError);
}

TEST_CASE("property: schedules match the reference and stay in [base/2, base]") {
    Rng rng(8);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto kind = static_cast<ScheduleKind>(rng.below(3));
        const double base = std::pow(10.0, -1.0 - 5.0 * rng.unit());
        const int epochs = 10;
        const double t = 10.0 * rng.unit();
        const double lr = make_schedule(kind, base, epochs)(t);
        CHECK(std::abs(lr - reference_lr(kind, base, epochs, t)) <= 1e-12);
        CHECK(lr <= base * (1 + 1e-12));
        CHECK(lr >= base / 2 * (1 - 1e-12));
    }
}

TEST_CASE("aggregate") {
    const auto a = aggregate({50, 52, 54});
    CHECK(a.mean == doctest::Approx(52.0));
    CHECK(a.std == doctest::Approx(2.0));
    CHECK(a.std_defined);
    const auto one = aggregate({7});
    CHECK(one.mean == 7.0);
    CHECK_FALSE(one.std_defined);
    CHECK(aggregate({3, 3, 3, 3}).std == 0.0);
}

TEST_CASE("two-instance run") {
    auto c = tiny_config();
    c.epochs = 1;
    c.batch_size = 2;
    const auto data = testing::separable_corpus(2);
    const auto result = train(c, 1, H(), data, {});
    REQUIRE(result.log.epochs.size() == 1);
    CHECK(std::isfinite(result.log.epochs[0].train_loss));
    const auto preds = predict(result.model, data);
    REQUIRE(preds.size() == 2);
    for (const auto& p : preds)
        for (const auto& d : p.dist) validate_distribution(d.values);
    CHECK_THROWS_AS(train(c, 1, H(), {}, {}), TrainingError);
}

TEST_CASE("training log, determinism and loss decrease") {
    const auto c = tiny_config();
    const auto data = testing::separable_corpus(48);
    const auto validation = testing::separable_corpus(12, 9);
    std::vector<std::string> lines;
    const auto a = train(c, 3, H(), data, validation, [&](const std::string& s) { lines.push_back(s); });
    const auto b = train(c, 3, H(), data, validation);

    SUBCASE("lr trace follows the schedule at every step") {
        const auto schedule = make_schedule(c.schedule, c.base_lr, c.epochs);
        const std::size_t steps = (data.size() + c.batch_size - 1) / c.batch_size;
        REQUIRE(a.log.lr_trace.size() == steps * static_cast<std::size_t>(c.epochs));
        for (std::size_t i = 0; i < a.log.lr_trace.size(); ++i) {
            const double t = static_cast<double>(i / steps) + static_cast<double>(i % steps) / steps;
            CHECK(a.log.step_epoch[i] == t);
            CHECK(std::abs(a.log.lr_trace[i] - schedule(t)) <= 1e-12);
        }
    }
    SUBCASE("same seed, same bits") {
        CHECK(a.model.parameters() == b.model.parameters());
        const auto pa = predict(a.model, validation);
        const auto pb = predict(b.model, validation);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            CHECK(pa[i].label == pb[i].label);
            for (std::size_t l = 0; l < 3; ++l) CHECK(pa[i].dist[l].values == pb[i].dist[l].values);
        }
        CHECK(train(c, 4, H(), data, validation).model.parameters() != a.model.parameters());
    }
    SUBCASE("loss decreases and epochs are logged") {
        CHECK(a.log.epochs.back().train_loss < a.log.epochs.front().train_loss);
        CHECK(lines.size() == static_cast<std::size_t>(c.epochs));
        CHECK(a.log.epochs[0].validation_js.has_value());
    }
    SUBCASE("trained model beats the random baseline") {
        const auto trained = evaluate_distributions(predict(a.model, data), data, H());
        std::vector<std::string> ids;
        for (const auto& inst : data) ids.push_back(inst.id);
        const auto baseline_preds = random_baseline(mean_distributions(data, H()), ids, 10, 5);
        const auto baseline = evaluate_distributions(baseline_preds, data, H());
        CHECK(*baseline.levels[0].js_mean > *trained.levels[0].js_mean);
    }
}

TEST_CASE("single-label targets are one-hot majorities") {
    const auto data = testing::separable_corpus(4);
    const auto t = target_matrices(data, {0, 2}, LabelSetting::Single, H());
    for (std::size_t l = 0; l < 3; ++l) {
        CHECK(t[l].rows() == 2);
        for (std::size_t r = 0; r < 2; ++r) {
            const std::size_t row = r == 0 ? 0 : 2;
            double sum = 0.0;
            for (std::size_t j = 0; j < t[l].cols(); ++j) sum += t[l](r, j);
            CHECK(sum == 1.0);
            CHECK(t[l](r, data[row].majority[l]) == 1.0);
        }
    }
}

TEST_CASE("run_seeds aggregates and names failing seeds") {
    auto c = tiny_config();
    c.epochs = 2;
    c.seeds = {1, 2};
    const auto data = testing::separable_corpus(20);
    std::size_t seen = 0;
    const auto results = run_seeds(c, H(), data, {}, data, [&](const SeedRun&, const MultiTaskModel&) { ++seen; });
    CHECK(seen == 2);
    REQUIRE(results.runs.size() == 2);
    std::vector<double> js;
    for (const auto& r : results.runs) js.push_back(*r.test_report.levels[0].js_mean);
    CHECK(results.js[0].mean == doctest::Approx(aggregate(js).mean));
    CHECK(results.js[0].std_defined);

    c.seeds = {7};
    CHECK_FALSE(run_seeds(c, H(), data, {}, data).js[0].std_defined);
    c.seeds = {};
    CHECK_THROWS_AS(run_seeds(c, H(), data, {}, data), ConfigError);
}

TEST_CASE("desk-scale runs on separable data") {
    const auto ce = testing::desk_run("desk_ce.conf");
    for (std::size_t l = 0; l < 3; ++l) CHECK(ce.train_f1[l] == 100.0);
    CHECK(ce.last_loss < ce.first_loss);
    const auto mae = testing::desk_run("desk_mae.conf");
    CHECK(mae.train_js[0] < 0.05);
}
