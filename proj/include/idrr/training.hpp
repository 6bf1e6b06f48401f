#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "idrr/config.hpp"
#include "idrr/corpus.hpp"
#include "idrr/metrics.hpp"
#include "idrr/model.hpp"
#include "idrr/predictions.hpp"

namespace idrr {

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;  // mean total loss over the epoch's batches
    std::optional<std::array<double, 3>> validation_js;
    std::optional<std::array<double, 3>> validation_f1;
    double seconds = 0.0;
};

struct TrainingLog {
    std::vector<EpochRecord> epochs;
    // Learning rate used at each optimizer step, and the fractional epoch it was evaluated at.
    std::vector<double> lr_trace;
    std::vector<double> step_epoch;
};

struct TrainResult {
    MultiTaskModel model;
    TrainingLog log;
};

using LogSink = std::function<void(const std::string&)>;

// Adam with the canonical constants (beta1 0.9, beta2 0.999, eps 1e-8, no weight decay).
class Adam {
public:
    explicit Adam(const Parameters& shape_like);
    void step(Parameters& params, const Parameters& grads, double lr);

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEpsilon = 1e-8;
    Parameters m_;
    Parameters v_;
    long t_ = 0;
};

// Rows = instances, cols = encoder width.
Matrix embed_instances(const MultiTaskModel& model, const std::vector<RelationInstance>& instances);
Matrix embed_pairs(const MultiTaskModel& model, const std::vector<std::pair<std::string, std::string>>& pairs);

// Eval-mode predictions: softmax distributions and pooled labels for every level.
std::vector<PredictionRecord> predict(const MultiTaskModel& model, const Matrix& embeddings,
                                      const std::vector<std::string>& ids);
std::vector<PredictionRecord> predict(const MultiTaskModel& model, const std::vector<RelationInstance>& instances);

// Per-level target matrix: distributions (multi) or one-hot majority labels (single).
std::array<Matrix, 3> target_matrices(const std::vector<RelationInstance>& instances,
                                      const std::vector<std::size_t>& rows, LabelSetting setting,
                                      const SenseHierarchy& hierarchy);

// Trains one model from `seed`; returns the final-epoch model.
TrainResult train(const ExperimentConfig& config, std::uint64_t seed, const SenseHierarchy& hierarchy,
                  const std::vector<RelationInstance>& train_set, const std::vector<RelationInstance>& validation_set,
                  const LogSink& log = {});

struct Aggregate {
    double mean = 0.0;
    double std = 0.0;  // sample (n-1) standard deviation
    bool std_defined = false;
};
Aggregate aggregate(const std::vector<double>& values);

struct SeedRun {
    std::uint64_t seed = 0;
    TrainingLog log;
    std::vector<PredictionRecord> test_predictions;
    EvaluationReport test_report;
};

struct AggregatedResults {
    std::vector<SeedRun> runs;
    std::array<Aggregate, 3> js;
    std::array<Aggregate, 3> f1;
};

// Trains once per configured seed and evaluates on `test_set`. `on_run` sees each finished run
// (with its model) before the next starts. A failing seed aborts with a TrainingError naming it.
AggregatedResults run_seeds(const ExperimentConfig& config, const SenseHierarchy& hierarchy,
                            const std::vector<RelationInstance>& train_set,
                            const std::vector<RelationInstance>& validation_set,
                            const std::vector<RelationInstance>& test_set,
                            const std::function<void(const SeedRun&, const MultiTaskModel&)>& on_run = {},
                            const LogSink& log = {});

}  // namespace idrr
