#include "idrr/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "idrr/delimited.hpp"
#include "idrr/errors.hpp"

namespace idrr {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is{std::string(text)};
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
    }
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + key + "': '" + value + "' is not a non-negative integer");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + value + "'");
}

char to_delimiter(const std::string& key, const std::string& value) {
    if (value == "tab" || value == "\\t") return '\t';
    if (value == "comma") return ',';
    if (value.size() == 1) return value[0];
    throw ConfigError("config key '" + key + "': delimiter must be a single character, 'tab' or 'comma'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    std::istringstream is{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (!cfg.values_.emplace(key, value).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }
    return cfg;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : split_list(text)) seeds.push_back(to_uint("seeds", item));
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    return seeds;
}

ExperimentConfig experiment_from_config(const KeyValueConfig& kv, const std::string& base_dir) {
    static const std::set<std::string> known = {
        "name", "encoder", "max_tokens", "pooling", "trunk_width", "dropout", "loss", "label_setting", "lr",
        "schedule", "cosine_restarts", "linear_decay_epochs", "epochs", "batch_size", "seeds", "split_seed",
        "split_ratios", "max_grad_norm", "baseline_draws", "discogem_path", "discogem_delimiter", "column.id",
        "column.arg1", "column.arg2", "column.genre", "ignore_columns", "stats_exclude_genres", "pdtb_path",
        "pdtb_delimiter", "coannotated_path", "agreement_level", "hierarchy"};
    for (const auto& [key, _] : kv.values()) {
        if (!known.count(key) && !key.starts_with("sense.")) throw ConfigError("unknown config key '" + key + "'");
    }

    auto path = [&](const std::string& value) {
        if (value.empty()) return value;
        std::filesystem::path p(value);
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        return p.lexically_normal().string();
    };

    ExperimentConfig c;
    const auto& v = kv.values();
    auto str = [&](const char* key) -> const std::string* {
        auto it = v.find(key);
        return it == v.end() ? nullptr : &it->second;
    };

    if (auto s = str("name")) c.name = *s;
    if (auto s = str("encoder")) c.model.encoder.model_id = *s;
    if (auto s = str("max_tokens")) c.model.encoder.max_tokens = to_uint("max_tokens", *s);
    if (auto s = str("pooling")) c.model.encoder.pooling = parse_pooling(*s);
    if (auto s = str("trunk_width")) c.model.trunk_width = to_uint("trunk_width", *s);
    if (auto s = str("dropout")) c.model.dropout_rate = to_double("dropout", *s);
    if (auto s = str("loss")) c.loss = parse_loss_kind(*s);
    c.label_setting = c.loss == LossKind::CrossEntropy ? LabelSetting::Single : LabelSetting::Multi;
    if (auto s = str("label_setting")) {
        if (*s == "multi") c.label_setting = LabelSetting::Multi;
        else if (*s == "single") c.label_setting = LabelSetting::Single;
        else throw ConfigError("label_setting must be 'multi' or 'single', got '" + *s + "'");
    }
    if (auto s = str("lr")) c.base_lr = to_double("lr", *s);
    if (auto s = str("schedule")) c.schedule = parse_schedule_kind(*s);
    if (auto s = str("cosine_restarts")) c.schedule_options.cosine_restarts = to_bool("cosine_restarts", *s);
    if (auto s = str("linear_decay_epochs")) c.schedule_options.linear_decay_epochs = to_double("linear_decay_epochs", *s);
    if (auto s = str("epochs")) c.epochs = static_cast<int>(to_uint("epochs", *s));
    if (auto s = str("batch_size")) c.batch_size = to_uint("batch_size", *s);
    if (auto s = str("seeds")) c.seeds = parse_seed_list(*s);
    if (auto s = str("split_seed")) c.split_seed = to_uint("split_seed", *s);
    if (auto s = str("split_ratios")) {
        const auto parts = split_list(*s);
        if (parts.size() != 3) throw ConfigError("split_ratios needs three comma-separated values");
        c.ratios = {to_double("split_ratios", parts[0]), to_double("split_ratios", parts[1]),
                    to_double("split_ratios", parts[2])};
    }
    if (auto s = str("max_grad_norm")) c.max_grad_norm = to_double("max_grad_norm", *s);
    if (auto s = str("baseline_draws")) c.baseline_draws = to_uint("baseline_draws", *s);

    auto& corpus = c.corpus;
    if (auto s = str("discogem_path")) corpus.discogem_path = path(*s);
    if (auto s = str("discogem_delimiter")) corpus.columns.delimiter = to_delimiter("discogem_delimiter", *s);
    if (auto s = str("column.id")) corpus.columns.id = *s;
    if (auto s = str("column.arg1")) corpus.columns.arg1 = *s;
    if (auto s = str("column.arg2")) corpus.columns.arg2 = *s;
    if (auto s = str("column.genre")) corpus.columns.genre = *s;
    if (auto s = str("ignore_columns")) corpus.columns.ignored = split_list(*s);
    for (const auto& [key, value] : v) {
        if (key.starts_with("sense.")) corpus.columns.sense_columns.emplace_back(key.substr(6), value);
    }
    if (auto s = str("stats_exclude_genres")) corpus.stats_exclude_genres = split_list(*s);
    if (auto s = str("pdtb_path")) corpus.pdtb_path = path(*s);
    if (auto s = str("pdtb_delimiter")) corpus.pdtb_delimiter = to_delimiter("pdtb_delimiter", *s);
    if (auto s = str("coannotated_path")) corpus.coannotated_path = path(*s);
    if (auto s = str("agreement_level")) {
        corpus.agreement_level = static_cast<int>(to_uint("agreement_level", *s));
        if (corpus.agreement_level < 1 || corpus.agreement_level > 3) throw ConfigError("agreement_level must be 1, 2 or 3");
    }
    if (auto s = str("hierarchy")) corpus.hierarchy_path = path(*s);

    if (c.epochs < 1) throw ConfigError("epochs must be at least 1");
    if (c.batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (!(c.base_lr > 0.0)) throw ConfigError("lr must be positive");
    if (!(c.model.dropout_rate >= 0.0 && c.model.dropout_rate < 1.0)) throw ConfigError("dropout must be in [0,1)");
    if (c.model.encoder.max_tokens < 16) throw ConfigError("max_tokens must be at least 16");
    if (c.max_grad_norm < 0.0) throw ConfigError("max_grad_norm must be non-negative");
    if (c.baseline_draws < 1) throw ConfigError("baseline_draws must be at least 1");
    const double ratio_sum = c.ratios.train + c.ratios.validation + c.ratios.test;
    if (std::abs(ratio_sum - 1.0) > 1e-9) throw ConfigError("split_ratios must sum to 1");
    make_schedule(c.schedule, c.base_lr, c.epochs, c.schedule_options);
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const DataError&) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    const auto dir = std::filesystem::path(path).parent_path().string();
    return experiment_from_config(KeyValueConfig::parse(text), dir);
}

}  // namespace idrr
