#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "idrr/distribution.hpp"
#include "idrr/sense_hierarchy.hpp"

namespace idrr {

// One line of predictions.jsonl. `levels` is 3 for full predictions and 2 for single-label
// test sets that only carry level-1/level-2 senses.
struct PredictionRecord {
    std::string id;
    std::vector<LabelDistribution> dist;
    std::vector<std::size_t> label;

    bool operator==(const PredictionRecord&) const = default;
};

std::string predictions_to_jsonl(const std::vector<PredictionRecord>& records, const SenseHierarchy& hierarchy);
std::vector<PredictionRecord> predictions_from_jsonl(std::string_view text, const SenseHierarchy& hierarchy);

}  // namespace idrr
