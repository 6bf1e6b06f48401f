#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idrr/corpus.hpp"
#include "idrr/distribution.hpp"
#include "idrr/predictions.hpp"
#include "idrr/sense_hierarchy.hpp"

namespace idrr {

// Square root of the base-2 Jensen-Shannon divergence; in [0, 1].
double js_distance(std::span<const double> p, std::span<const double> q);
double js_distance(const LabelDistribution& p, const LabelDistribution& q);

// Mean per-instance JS distance for levels 1..3. Predictions and targets are matched by id;
// a missing or extra id is a DataError.
std::array<double, 3> mean_js(const std::vector<PredictionRecord>& predictions,
                              const std::vector<RelationInstance>& targets);

using LabelSeq = std::span<const std::size_t>;

// Support-weighted mean of per-class F1, as a percentage.
double weighted_f1(LabelSeq predicted, LabelSeq gold, std::size_t space_size);

enum class SenseMarker {
    None,
    NotInGold,       // "-": sense absent from the gold labels
    NeverPredicted,  // "n/a"
};
const char* marker_text(SenseMarker marker);

struct SenseScore {
    double f1 = 0.0;  // percentage; 0 when undefined
    std::size_t support = 0;
    std::size_t predicted = 0;
    // NotInGold when the sense never occurs in the gold labels; otherwise None.
    SenseMarker marker = SenseMarker::None;
};

std::vector<SenseScore> per_sense_f1(LabelSeq predicted, LabelSeq gold, std::size_t space_size);

// Rows are gold senses, columns predicted senses.
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;
ConfusionMatrix confusion_matrix(LabelSeq predicted, LabelSeq gold, std::size_t space_size);

struct LevelReport {
    Level level = Level::One;
    std::optional<double> js_mean;  // only when targets are distributions
    double f1_weighted = 0.0;
    std::vector<SenseScore> per_sense;
    ConfusionMatrix confusion;
};

struct EvaluationReport {
    std::vector<LevelReport> levels;
    std::size_t instance_count = 0;
};

// Distribution targets: JS plus single-label scores against majority labels, all 3 levels.
EvaluationReport evaluate_distributions(const std::vector<PredictionRecord>& predictions,
                                        const std::vector<RelationInstance>& targets,
                                        const SenseHierarchy& hierarchy);

// Single-label targets (levels 1-2 only).
EvaluationReport evaluate_single_label(const std::vector<PredictionRecord>& predictions,
                                       const std::vector<SingleLabelInstance>& targets,
                                       const SenseHierarchy& hierarchy);

std::string format_percentage(double value);  // two decimals
std::string confusion_to_csv(const ConfusionMatrix& matrix, const SenseHierarchy& hierarchy, Level level);
// Aligned plain-text rendering of one report.
std::string format_report_text(const EvaluationReport& report, const SenseHierarchy& hierarchy,
                               const std::string& title);

}  // namespace idrr
