#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idrr/corpus.hpp"
#include "idrr/losses.hpp"
#include "idrr/model.hpp"
#include "idrr/schedule.hpp"

namespace idrr {

// `key = value` lines; '#' starts a comment. Keys are unique.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

private:
    std::map<std::string, std::string> values_;
};

// Whether heads are trained against full distributions or one-hot majority labels.
enum class LabelSetting { Multi, Single };

struct CorpusConfig {
    std::string discogem_path;
    DiscogemColumns columns;
    // Genres left out of the sense-mass statistics (not out of the data).
    std::vector<std::string> stats_exclude_genres;
    std::string pdtb_path;
    char pdtb_delimiter = '\t';
    std::string coannotated_path;
    int agreement_level = 2;
    std::string hierarchy_path;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ModelConfig model;
    LossKind loss = LossKind::Mae;
    LabelSetting label_setting = LabelSetting::Multi;
    double base_lr = 1e-5;
    ScheduleKind schedule = ScheduleKind::None;
    ScheduleOptions schedule_options;
    int epochs = 10;
    std::size_t batch_size = 16;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::uint64_t split_seed = 42;
    SplitRatios ratios;
    double max_grad_norm = 0.0;  // 0 disables clipping
    std::size_t baseline_draws = 10;
    CorpusConfig corpus;
};

// Builds and validates an experiment config. Unknown keys and bad values are ConfigErrors.
// Relative paths are resolved against `base_dir`.
ExperimentConfig experiment_from_config(const KeyValueConfig& kv, const std::string& base_dir = "");
ExperimentConfig load_experiment_config(const std::string& path);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace idrr
