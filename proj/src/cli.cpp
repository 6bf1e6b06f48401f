#include "idrr/cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "idrr/analysis.hpp"
#include "idrr/config.hpp"
#include "idrr/corpus.hpp"
#include "idrr/delimited.hpp"
#include "idrr/errors.hpp"
#include "idrr/hashing.hpp"
#include "idrr/metrics.hpp"
#include "idrr/model.hpp"
#include "idrr/predictions.hpp"
#include "idrr/training.hpp"

namespace idrr::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string now_utc() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_config_text(const std::string& path) {
    if (path.empty()) throw ConfigError("--config is required");
    try {
        return read_text_file(path);
    } catch (const DataError&) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
}

SenseHierarchy hierarchy_for(const ExperimentConfig& config) {
    if (config.corpus.hierarchy_path.empty()) return SenseHierarchy::standard();
    return SenseHierarchy::load_schema_file(config.corpus.hierarchy_path);
}

// Output directory with a lock file and a manifest recording the hash of every output.
class OutputDir {
public:
    OutputDir(const std::string& dir, bool force, std::string command) : root_(dir), command_(std::move(command)) {
        if (dir.empty()) throw ConfigError("--out is required");
        const fs::path manifest = root_ / "manifest.json";
        if (fs::exists(manifest) && !force) {
            bool complete = true;
            try {
                complete = json::parse(read_text_file(manifest.string())).value("status", "complete") == "complete";
            } catch (const std::exception&) {
            }
            if (complete) {
                throw ConfigError("'" + dir + "' already holds a completed run; pass --force to overwrite it");
            }
        }
        fs::create_directories(root_);
        const fs::path lock = root_ / ".lock";
        lock_fd_ = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (lock_fd_ < 0) throw Error("'" + dir + "' is locked by another process (remove " + lock.string() + " if stale)");
        manifest_["tool_version"] = kToolVersion;
        manifest_["command"] = command_;
        manifest_["status"] = "incomplete";
        manifest_["started_at"] = now_utc();
        manifest_["corpus_hashes"] = json::object();
        manifest_["outputs"] = json::object();
        write_manifest();
    }

    ~OutputDir() {
        if (lock_fd_ >= 0) {
            ::close(lock_fd_);
            std::error_code ec;
            fs::remove(root_ / ".lock", ec);
        }
    }

    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;

    const fs::path& root() const { return root_; }
    json& manifest() { return manifest_; }

    void write(const std::string& relative, const std::string& text) {
        const fs::path path = root_ / relative;
        fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) throw Error("cannot write '" + path.string() + "'");
        manifest_["outputs"][relative] = sha256_hex(text);
    }

    void record_tree(const std::string& relative) {
        for (const auto& entry : fs::recursive_directory_iterator(root_ / relative)) {
            if (!entry.is_regular_file()) continue;
            const std::string rel = fs::relative(entry.path(), root_).generic_string();
            manifest_["outputs"][rel] = sha256_file(entry.path().string());
        }
    }

    void record_corpus(const std::string& path) {
        if (!path.empty()) manifest_["corpus_hashes"][path] = sha256_file(path);
    }

    void finish() {
        manifest_["status"] = "complete";
        manifest_["finished_at"] = now_utc();
        write_manifest();
    }

private:
    void write_manifest() {
        std::ofstream out(root_ / "manifest.json", std::ios::binary);
        out << manifest_.dump(2) << "\n";
    }

    fs::path root_;
    std::string command_;
    json manifest_;
    int lock_fd_ = -1;
};

void describe_config(OutputDir& out, const std::string& config_text, const SenseHierarchy& hierarchy,
                     const std::vector<std::uint64_t>& seeds) {
    out.manifest()["config_hash"] = sha256_hex(config_text);
    out.manifest()["hierarchy_hash"] = sha256_hex(hierarchy.to_schema());
    out.manifest()["seeds"] = seeds;
    out.write("config.conf", config_text);
    out.write("hierarchy.tsv", hierarchy.to_schema());
}

struct PreparedData {
    SenseHierarchy hierarchy;
    std::vector<RelationInstance> instances;
    SplitAssignment split;
};

PreparedData load_prepared(const std::string& data_dir) {
    if (data_dir.empty()) throw ConfigError("--data (the output of 'prepare') is required");
    const fs::path root(data_dir);
    if (!fs::exists(root / "instances.jsonl")) {
        throw ConfigError("'" + data_dir + "' does not contain prepared data (run 'prepare' first)");
    }
    SenseHierarchy hierarchy = SenseHierarchy::load_schema_file((root / "hierarchy.tsv").string());
    auto instances = instances_from_jsonl(read_text_file((root / "instances.jsonl").string()), hierarchy);
    auto split = parse_split_file(read_text_file((root / "split.tsv").string()));
    return PreparedData{std::move(hierarchy), std::move(instances), std::move(split)};
}

void check_same_hierarchy(const SenseHierarchy& a, const SenseHierarchy& b, const std::string& what) {
    if (a.to_schema() != b.to_schema()) {
        throw DataError("sense hierarchy hash mismatch: " + what + " (" + sha256_hex(a.to_schema()).substr(0, 12) +
                        " vs " + sha256_hex(b.to_schema()).substr(0, 12) + ")");
    }
}

json per_sense_json(const std::vector<SenseScore>& scores, const SenseHierarchy& hierarchy, Level level) {
    json j = json::object();
    for (std::size_t s = 0; s < scores.size(); ++s) {
        const auto& score = scores[s];
        json entry;
        if (score.marker == SenseMarker::NotInGold) {
            entry["f1"] = nullptr;
            entry["marker"] = marker_text(score.marker);
        } else {
            entry["f1"] = score.f1;
        }
        entry["support"] = score.support;
        entry["predicted"] = score.predicted;
        j[hierarchy.name(level, s)] = entry;
    }
    return j;
}

json report_json(const EvaluationReport& report, const SenseHierarchy& hierarchy) {
    json j;
    j["instance_count"] = report.instance_count;
    j["js_log_base"] = 2;
    json levels = json::object();
    for (const auto& level : report.levels) {
        json l;
        if (level.js_mean) l["js_mean"] = *level.js_mean;
        l["f1_weighted"] = level.f1_weighted;
        l["per_sense"] = per_sense_json(level.per_sense, hierarchy, level.level);
        levels["level" + std::to_string(level_number(level.level))] = l;
    }
    j["levels"] = levels;
    return j;
}

json aggregate_json(const Aggregate& a) {
    json j;
    j["mean"] = a.mean;
    j["std"] = a.std;
    if (!a.std_defined) j["std_undefined"] = true;
    return j;
}

// Mean ± sample std over several reports of the same test set.
json aggregate_reports_json(const std::vector<EvaluationReport>& reports, const SenseHierarchy& hierarchy,
                            const std::string& across) {
    json j;
    j[across] = reports.size();
    j["aggregation"] = "mean±std (sample standard deviation, n-1)";
    j["js_log_base"] = 2;
    json levels = json::object();
    const std::size_t n_levels = reports.front().levels.size();
    for (std::size_t l = 0; l < n_levels; ++l) {
        const Level level = reports.front().levels[l].level;
        json lj;
        std::vector<double> js, f1;
        for (const auto& r : reports) {
            if (r.levels[l].js_mean) js.push_back(*r.levels[l].js_mean);
            f1.push_back(r.levels[l].f1_weighted);
        }
        if (js.size() == reports.size()) lj["js_mean"] = aggregate_json(aggregate(js));
        lj["f1_weighted"] = aggregate_json(aggregate(f1));
        json per_sense = json::object();
        for (std::size_t s = 0; s < hierarchy.size(level); ++s) {
            std::vector<double> values;
            for (const auto& r : reports) {
                if (r.levels[l].per_sense[s].marker != SenseMarker::NotInGold) values.push_back(r.levels[l].per_sense[s].f1);
            }
            if (values.empty()) {
                per_sense[hierarchy.name(level, s)] = "-";
            } else {
                per_sense[hierarchy.name(level, s)] = aggregate_json(aggregate(values));
            }
        }
        lj["per_sense"] = per_sense;
        levels["level" + std::to_string(level_number(level))] = lj;
    }
    j["levels"] = levels;
    return j;
}

std::string format_aggregate(const Aggregate& a, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f ± %.*f%s", decimals, a.mean, decimals, a.std, a.std_defined ? "" : " (n=1)");
    return buf;
}

std::string aggregate_table(const std::vector<EvaluationReport>& reports, const std::string& title) {
    std::string out = title + "\n";
    out += "            JS distance            weighted F1\n";
    const std::size_t n_levels = reports.front().levels.size();
    for (std::size_t l = 0; l < n_levels; ++l) {
        std::vector<double> js, f1;
        for (const auto& r : reports) {
            if (r.levels[l].js_mean) js.push_back(*r.levels[l].js_mean);
            f1.push_back(r.levels[l].f1_weighted);
        }
        char buf[200];
        std::snprintf(buf, sizeof buf, "Level-%zu     %-22s %s\n", l + 1,
                      js.size() == reports.size() ? format_aggregate(aggregate(js), 3).c_str() : "-",
                      format_aggregate(aggregate(f1), 2).c_str());
        out += buf;
    }
    return out;
}

std::vector<std::uint64_t> seeds_for(const ExperimentConfig& config, const GlobalOptions& options) {
    if (options.seed) return {*options.seed};
    return config.seeds;
}

std::vector<std::string> ids_of(const std::vector<RelationInstance>& instances) {
    std::vector<std::string> ids;
    for (const auto& inst : instances) ids.push_back(inst.id);
    return ids;
}

std::vector<std::uint64_t> run_seeds_from_manifest(const std::string& run_dir) {
    const json m = json::parse(read_text_file((fs::path(run_dir) / "manifest.json").string()));
    if (m.value("status", "") != "complete") throw DataError("run '" + run_dir + "' is incomplete");
    return m.at("seeds").get<std::vector<std::uint64_t>>();
}

std::string seed_dir(std::uint64_t seed) { return "seed-" + std::to_string(seed); }

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
    if (dynamic_cast<const DataError*>(&e)) return kDataError;
    return kRuntimeError;
}

std::vector<std::string> verify_manifest(const std::string& dir) {
    const fs::path root(dir);
    const json m = json::parse(read_text_file((root / "manifest.json").string()));
    std::vector<std::string> mismatches;
    for (const auto& [rel, hash] : m.at("outputs").items()) {
        const fs::path p = root / rel;
        if (!fs::exists(p) || sha256_file(p.string()) != hash.get<std::string>()) mismatches.push_back(rel);
    }
    if (m.contains("config_hash") && fs::exists(root / "config.conf") &&
        sha256_file((root / "config.conf").string()) != m.at("config_hash").get<std::string>()) {
        mismatches.push_back("config.conf");
    }
    return mismatches;
}

void cmd_prepare(const GlobalOptions& options, std::ostream& log) {
    const std::string config_text = read_config_text(options.config_path);
    const ExperimentConfig config = load_experiment_config(options.config_path);
    const auto& corpus = config.corpus;
    if (corpus.discogem_path.empty()) throw ConfigError("config must set discogem_path");
    if (!fs::exists(corpus.discogem_path)) throw ConfigError("corpus file '" + corpus.discogem_path + "' does not exist");
    const SenseHierarchy hierarchy = hierarchy_for(config);
    const std::uint64_t split_seed = options.seed.value_or(config.split_seed);

    OutputDir out(options.out_dir, options.force, "prepare");
    describe_config(out, config_text, hierarchy, {split_seed});
    out.record_corpus(corpus.discogem_path);

    Diagnostics diagnostics;
    const auto raw = load_discogem(corpus.discogem_path, corpus.columns, &diagnostics);
    const auto instances = adapt_corpus(raw, hierarchy, "discogem", &diagnostics);
    const SplitAssignment split = stratified_split(instances, config.ratios, split_seed);

    out.write("instances.jsonl", instances_to_jsonl(instances, hierarchy));
    out.write("split.tsv", format_split_file(split));

    std::vector<RelationInstance> stat_instances;
    const std::set<std::string> excluded(corpus.stats_exclude_genres.begin(), corpus.stats_exclude_genres.end());
    for (const auto& inst : instances) {
        if (!excluded.count(inst.genre)) stat_instances.push_back(inst);
    }
    const auto sums = sense_mass_sums(stat_instances, hierarchy);
    const auto counts = majority_counts_by_split(instances, split, hierarchy);

    json stats;
    stats["rows_read"] = raw.size();
    stats["instance_count"] = instances.size();
    stats["excluded"] = raw.size() - instances.size();
    stats["stats_exclude_genres"] = corpus.stats_exclude_genres;
    json mass = json::object();
    std::string text = "Adapted sense mass (sum over instances)\n";
    for (std::size_t l = 0; l < 3; ++l) {
        json level = json::object();
        text += "Level-" + std::to_string(l + 1) + "\n";
        for (std::size_t s = 0; s < sums[l].size(); ++s) {
            const std::string& name = hierarchy.name(kLevels[l], s);
            level[name] = sums[l][s];
            char buf[96];
            std::snprintf(buf, sizeof buf, "  %-22s %10.1f\n", name.c_str(), sums[l][s]);
            text += buf;
        }
        mass["level" + std::to_string(l + 1)] = level;
    }
    stats["mass_sums"] = mass;
    json majority = json::object();
    text += "\nLevel-2 majority labels per split (train/validation/test)\n";
    std::array<std::size_t, 3> totals{};
    for (std::size_t s = 0; s < counts.size(); ++s) {
        const std::string& name = hierarchy.name(Level::Two, s);
        majority[name] = {{"train", counts[s][0]}, {"validation", counts[s][1]}, {"test", counts[s][2]}};
        for (std::size_t k = 0; k < 3; ++k) totals[k] += counts[s][k];
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %-22s %6zu %6zu %6zu\n", name.c_str(), counts[s][0], counts[s][1], counts[s][2]);
        text += buf;
    }
    stats["majority_counts"] = majority;
    stats["split_sizes"] = {{"train", totals[0]}, {"validation", totals[1]}, {"test", totals[2]}};
    out.write("stats.json", stats.dump(2) + "\n");
    out.write("stats.txt", text);

    std::string warnings;
    for (const auto& w : diagnostics.warnings) warnings += w + "\n";
    out.write("warnings.txt", warnings);
    for (const auto& w : diagnostics.warnings) log << "warning: " << w << "\n";
    log << "prepared " << instances.size() << " instances (" << totals[0] << " train, " << totals[1] << " validation, "
        << totals[2] << " test) into " << options.out_dir << "\n";
    out.finish();
}

void cmd_train(const GlobalOptions& options, const std::string& data_dir, std::ostream& log) {
    const std::string config_text = read_config_text(options.config_path);
    ExperimentConfig config = load_experiment_config(options.config_path);
    config.seeds = seeds_for(config, options);
    const PreparedData data = load_prepared(data_dir);
    check_same_hierarchy(hierarchy_for(config), data.hierarchy, "run config vs prepared data");
    const SenseHierarchy& hierarchy = data.hierarchy;

    const auto train_set = select_split(data.instances, data.split, Split::Train);
    const auto validation_set = select_split(data.instances, data.split, Split::Validation);
    const auto test_set = select_split(data.instances, data.split, Split::Test);

    OutputDir out(options.out_dir, options.force, "train");
    describe_config(out, config_text, hierarchy, config.seeds);
    out.record_corpus((fs::path(data_dir) / "instances.jsonl").string());
    out.record_corpus((fs::path(data_dir) / "split.tsv").string());
    // Relative paths in the copied config would resolve against the run directory, so keep the resolved one.
    if (!config.corpus.pdtb_path.empty()) {
        out.manifest()["pdtb_path"] = fs::absolute(config.corpus.pdtb_path).lexically_normal().string();
    }

    const auto on_run = [&](const SeedRun& run, const MultiTaskModel& model) {
        const std::string dir = seed_dir(run.seed);
        save_checkpoint((out.root() / dir / "checkpoint").string(), model, hierarchy, config_text);
        out.record_tree(dir + "/checkpoint");
        out.write(dir + "/predictions.jsonl", predictions_to_jsonl(run.test_predictions, hierarchy));
        json metrics = report_json(run.test_report, hierarchy);
        metrics["seed"] = run.seed;
        out.write(dir + "/metrics.json", metrics.dump(2) + "\n");
        for (const auto& level : run.test_report.levels) {
            out.write(dir + "/confusion_level" + std::to_string(level_number(level.level)) + ".csv",
                      confusion_to_csv(level.confusion, hierarchy, level.level));
        }
        std::string text;
        for (const auto& e : run.log.epochs) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "epoch %d train_loss %.9g", e.epoch, e.train_loss);
            text += buf;
            if (e.validation_js) {
                std::snprintf(buf, sizeof buf, " val_js %.6f %.6f %.6f val_f1 %.2f %.2f %.2f", (*e.validation_js)[0],
                              (*e.validation_js)[1], (*e.validation_js)[2], (*e.validation_f1)[0],
                              (*e.validation_f1)[1], (*e.validation_f1)[2]);
                text += buf;
            }
            std::snprintf(buf, sizeof buf, " seconds %.3f\n", e.seconds);
            text += buf;
        }
        text += "lr_trace (fractional_epoch lr)\n";
        for (std::size_t i = 0; i < run.log.lr_trace.size(); ++i) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", run.log.step_epoch[i], run.log.lr_trace[i]);
            text += buf;
        }
        out.write(dir + "/log.txt", text);
        out.write(dir + "/report.txt", format_report_text(run.test_report, hierarchy, "DiscoGeM test, seed " + std::to_string(run.seed)));
    };
    const auto results = run_seeds(config, hierarchy, train_set, validation_set, test_set, on_run,
                                   [&](const std::string& line) { log << line << "\n"; });

    std::vector<EvaluationReport> reports;
    for (const auto& run : results.runs) reports.push_back(run.test_report);
    json metrics = aggregate_reports_json(reports, hierarchy, "seeds");
    metrics["loss"] = loss_name(config.loss);
    metrics["schedule"] = schedule_name(config.schedule);
    metrics["lr"] = config.base_lr;
    out.write("metrics.json", metrics.dump(2) + "\n");
    const std::string table = aggregate_table(reports, "DiscoGeM test (" + config.name + ", " +
                                                           std::to_string(reports.size()) + " seed(s))");
    out.write("report.txt", table);
    log << table;
    out.finish();
}

void cmd_evaluate(const GlobalOptions& options, const EvaluateOptions& eval, std::ostream& log) {
    if (eval.run_dir.empty()) throw ConfigError("--run is required");
    const fs::path run_root(eval.run_dir);
    if (!fs::exists(run_root / "manifest.json")) throw ConfigError("'" + eval.run_dir + "' is not a run directory");
    const std::vector<std::uint64_t> seeds = run_seeds_from_manifest(eval.run_dir);
    const std::string config_path = (run_root / "config.conf").string();
    const ExperimentConfig config = load_experiment_config(config_path);
    const SenseHierarchy run_hierarchy = SenseHierarchy::load_schema_file((run_root / "hierarchy.tsv").string());

    OutputDir out(options.out_dir, options.force, "evaluate");
    out.manifest()["run_dir"] = fs::absolute(run_root).lexically_normal().string();
    out.manifest()["test"] = eval.test;
    out.manifest()["seeds"] = seeds;

    std::vector<std::pair<std::string, CoherenceReport>> coherence_columns;
    json metrics;
    std::string text;

    const std::string test = to_lower(eval.test);
    if (test == "discogem") {
        const PreparedData data = load_prepared(eval.data_dir);
        check_same_hierarchy(run_hierarchy, data.hierarchy, "checkpoint vs DiscoGeM test set");
        out.record_corpus((fs::path(eval.data_dir) / "instances.jsonl").string());
        const auto test_set = select_split(data.instances, data.split, Split::Test);
        std::vector<std::size_t> gold1, gold2;
        for (const auto& inst : test_set) {
            gold1.push_back(inst.majority[0]);
            gold2.push_back(inst.majority[1]);
        }
        std::vector<EvaluationReport> reports;
        std::vector<CoherenceReport> coherence;
        json per_seed = json::object();
        for (std::uint64_t seed : seeds) {
            const MultiTaskModel model =
                load_checkpoint((run_root / seed_dir(seed) / "checkpoint").string(), data.hierarchy);
            const auto preds = predict(model, test_set);
            const auto report = evaluate_distributions(preds, test_set, data.hierarchy);
            out.write("discogem/" + seed_dir(seed) + "/predictions.jsonl", predictions_to_jsonl(preds, data.hierarchy));
            for (const auto& level : report.levels) {
                out.write("discogem/" + seed_dir(seed) + "/confusion_level" + std::to_string(level_number(level.level)) + ".csv",
                          confusion_to_csv(level.confusion, data.hierarchy, level.level));
            }
            per_seed[std::to_string(seed)] = report_json(report, data.hierarchy);
            std::vector<std::size_t> p1, p2;
            for (const auto& p : preds) {
                p1.push_back(p.label[0]);
                p2.push_back(p.label[1]);
            }
            coherence.push_back(coherence_report(p1, p2, data.hierarchy, gold1, gold2));
            reports.push_back(report);
        }
        metrics["discogem"] = aggregate_reports_json(reports, data.hierarchy, "seeds");
        metrics["discogem"]["per_seed"] = per_seed;
        coherence_columns.emplace_back("DiscoGeM-test", average_coherence(coherence));
        text += aggregate_table(reports, "DiscoGeM test");
    } else {
        const PdtbScheme scheme = parse_pdtb_scheme(test);
        std::string pdtb_path = eval.pdtb_path;
        if (pdtb_path.empty()) {
            const json m = json::parse(read_text_file((run_root / "manifest.json").string()));
            pdtb_path = m.value("pdtb_path", "");
        }
        if (pdtb_path.empty()) throw ConfigError("no PDTB file: pass --pdtb or set pdtb_path in the run config");
        if (!fs::exists(pdtb_path)) throw ConfigError("PDTB file '" + pdtb_path + "' does not exist");
        const SenseHierarchy& test_hierarchy = run_hierarchy;
        out.record_corpus(pdtb_path);
        Diagnostics diagnostics;
        const auto sets = load_pdtb_splits(pdtb_path, scheme, test_hierarchy, config.corpus.pdtb_delimiter, &diagnostics);
        for (const auto& w : diagnostics.warnings) log << "warning: " << w << "\n";

        std::vector<MultiTaskModel> models;
        for (std::uint64_t seed : seeds) {
            models.push_back(load_checkpoint((run_root / seed_dir(seed) / "checkpoint").string(), test_hierarchy));
        }
        std::vector<EvaluationReport> fold_means_source;
        json sets_json = json::object();
        std::vector<CoherenceReport> fold_coherence;
        std::vector<double> fold_f1[2];
        for (const auto& set : sets) {
            if (set.instances.empty()) throw DataError("PDTB test set " + set.name + " has no relations");
            std::vector<std::pair<std::string, std::string>> pairs;
            std::vector<std::string> ids;
            std::vector<std::size_t> gold1, gold2;
            for (const auto& inst : set.instances) {
                pairs.emplace_back(inst.arg1, inst.arg2);
                ids.push_back(inst.id);
                gold1.push_back(inst.level1);
                gold2.push_back(inst.level2);
            }
            std::vector<EvaluationReport> reports;
            std::vector<CoherenceReport> coherence;
            for (std::size_t m = 0; m < models.size(); ++m) {
                auto preds = predict(models[m], embed_pairs(models[m], pairs), ids);
                for (auto& p : preds) {
                    p.dist.resize(2);
                    p.label.resize(2);
                }
                const auto report = evaluate_single_label(preds, set.instances, test_hierarchy);
                const std::string prefix = set.name + "/" + seed_dir(seeds[m]);
                out.write(prefix + "/predictions.jsonl", predictions_to_jsonl(preds, test_hierarchy));
                for (const auto& level : report.levels) {
                    out.write(prefix + "/confusion_level" + std::to_string(level_number(level.level)) + ".csv",
                              confusion_to_csv(level.confusion, test_hierarchy, level.level));
                }
                std::vector<std::size_t> p1, p2;
                for (const auto& p : preds) {
                    p1.push_back(p.label[0]);
                    p2.push_back(p.label[1]);
                }
                coherence.push_back(coherence_report(p1, p2, test_hierarchy, gold1, gold2));
                reports.push_back(report);
            }
            json set_json = aggregate_reports_json(reports, test_hierarchy, "seeds");
            set_json["instance_count"] = set.instances.size();
            sets_json[set.name] = set_json;
            const CoherenceReport averaged = average_coherence(coherence);
            if (scheme == PdtbScheme::Cross) {
                fold_coherence.push_back(averaged);
                for (std::size_t l = 0; l < 2; ++l) {
                    std::vector<double> f1;
                    for (const auto& r : reports) f1.push_back(r.levels[l].f1_weighted);
                    fold_f1[l].push_back(aggregate(f1).mean);
                }
            } else {
                coherence_columns.emplace_back(set.name, averaged);
                text += aggregate_table(reports, "PDTB " + set.name + " (" + std::to_string(set.instances.size()) +
                                                     " relations)");
            }
        }
        metrics["pdtb"] = sets_json;
        if (scheme == PdtbScheme::Cross) {
            json folds;
            folds["folds"] = sets.size();
            folds["aggregation"] = "mean±std across folds of the seed-averaged weighted F1";
            for (std::size_t l = 0; l < 2; ++l) {
                folds["level" + std::to_string(l + 1)]["f1_weighted"] = aggregate_json(aggregate(fold_f1[l]));
            }
            metrics["cross_aggregate"] = folds;
            coherence_columns.emplace_back("Cross", average_coherence(fold_coherence));
            text += "PDTB Cross (" + std::to_string(sets.size()) + " folds)\n";
            for (std::size_t l = 0; l < 2; ++l) {
                text += "Level-" + std::to_string(l + 1) + "  weighted F1 " + format_aggregate(aggregate(fold_f1[l]), 2) + "\n";
            }
        }
    }
    out.write("metrics.json", metrics.dump(2) + "\n");
    out.write("coherence.csv", coherence_to_csv(coherence_columns, run_hierarchy));
    out.write("report.txt", text);
    log << text;
    out.finish();
}

void cmd_analyze(const GlobalOptions& options, const std::string& data_dir, const std::string& run_dir,
                 std::ostream& log) {
    const std::string config_text = read_config_text(options.config_path);
    const ExperimentConfig config = load_experiment_config(options.config_path);
    const PreparedData data = load_prepared(data_dir);
    if (config.corpus.coannotated_path.empty() && run_dir.empty()) {
        throw ConfigError("nothing to analyze: set coannotated_path in the config or pass --run");
    }
    OutputDir out(options.out_dir, options.force, "analyze");
    describe_config(out, config_text, data.hierarchy, {});

    if (!config.corpus.coannotated_path.empty()) {
        const std::string& path = config.corpus.coannotated_path;
        if (!fs::exists(path)) throw ConfigError("co-annotation file '" + path + "' does not exist");
        out.record_corpus(path);
        const Level level = level_from_number(config.corpus.agreement_level);
        const DelimitedTable table = read_delimited_file(path, '\t');
        const std::size_t id_col = table.column("id");
        const std::size_t ref_col = table.column("reference");
        if (id_col == std::string::npos || ref_col == std::string::npos) {
            throw SchemaError("co-annotation file needs 'id' and 'reference' columns");
        }
        std::map<std::string, const RelationInstance*> by_id;
        for (const auto& inst : data.instances) by_id[inst.id] = &inst;
        std::vector<ReferencedDistribution> items;
        for (const auto& row : table.rows) {
            auto it = by_id.find(row.at(id_col));
            if (it == by_id.end()) throw DataError("co-annotated relation '" + row.at(id_col) + "' is not in the corpus");
            // "Contingency.Cause.Reason" names the sense at the requested depth.
            std::string reference = row.at(ref_col);
            std::vector<std::string> parts;
            for (std::size_t start = 0;;) {
                const auto dot = reference.find('.', start);
                parts.push_back(reference.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
                if (dot == std::string::npos) break;
                start = dot + 1;
            }
            const std::size_t depth = static_cast<std::size_t>(level_number(level));
            const std::string name = parts.size() >= depth ? parts[depth - 1] : parts.back();
            items.push_back({data.hierarchy.index_of(level, name), it->second->target(level)});
        }
        const AgreementReport report = agreement_report(items);
        json j;
        j["level"] = level_number(level);
        j["total"] = report.total;
        json topk = json::array();
        std::string text = "Top-k agreement at level-" + std::to_string(level_number(level)) + " over " +
                           std::to_string(report.total) + " relations\n";
        for (std::size_t i = 0; i < report.ks.size(); ++i) {
            topk.push_back({{"k", report.ks[i]}, {"count", report.counts[i]}, {"percentage", report.percentage(i)}});
            char buf[96];
            std::snprintf(buf, sizeof buf, "Top-%zu  %zu (%.1f%%)\n", report.ks[i], report.counts[i], report.percentage(i));
            text += buf;
        }
        j["topk"] = topk;
        out.write("agreement.json", j.dump(2) + "\n");
        out.write("agreement.txt", text);
        log << text;
    }

    if (!run_dir.empty()) {
        const auto seeds = run_seeds_from_manifest(run_dir);
        const auto test_set = select_split(data.instances, data.split, Split::Test);
        std::vector<std::size_t> gold1, gold2;
        for (const auto& inst : test_set) {
            gold1.push_back(inst.majority[0]);
            gold2.push_back(inst.majority[1]);
        }
        std::vector<CoherenceReport> reports;
        for (std::uint64_t seed : seeds) {
            const auto preds = predictions_from_jsonl(
                read_text_file((fs::path(run_dir) / seed_dir(seed) / "predictions.jsonl").string()), data.hierarchy);
            std::map<std::string, const PredictionRecord*> by_id;
            for (const auto& p : preds) by_id[p.id] = &p;
            std::vector<std::size_t> p1, p2;
            for (const auto& inst : test_set) {
                auto it = by_id.find(inst.id);
                if (it == by_id.end()) throw DataError("run has no prediction for test instance '" + inst.id + "'");
                p1.push_back(it->second->label.at(0));
                p2.push_back(it->second->label.at(1));
            }
            reports.push_back(coherence_report(p1, p2, data.hierarchy, gold1, gold2));
        }
        const std::string csv = coherence_to_csv({{"DiscoGeM-test", average_coherence(reports)}}, data.hierarchy);
        out.write("coherence.csv", csv);
        log << csv;
    }
    out.finish();
}

void cmd_baseline(const GlobalOptions& options, const std::string& data_dir, std::ostream& log) {
    const std::string config_text = read_config_text(options.config_path);
    const ExperimentConfig config = load_experiment_config(options.config_path);
    const PreparedData data = load_prepared(data_dir);
    const auto seeds = seeds_for(config, options);
    const auto train_set = select_split(data.instances, data.split, Split::Train);
    const auto test_set = select_split(data.instances, data.split, Split::Test);
    if (test_set.empty()) throw DataError("test split is empty");

    OutputDir out(options.out_dir, options.force, "baseline");
    describe_config(out, config_text, data.hierarchy, seeds);
    const auto marginals = mean_distributions(train_set, data.hierarchy);
    std::vector<EvaluationReport> reports;
    for (std::uint64_t seed : seeds) {
        const auto preds = random_baseline(marginals, ids_of(test_set), config.baseline_draws, seed);
        const auto report = evaluate_distributions(preds, test_set, data.hierarchy);
        out.write(seed_dir(seed) + "/predictions.jsonl", predictions_to_jsonl(preds, data.hierarchy));
        json metrics = report_json(report, data.hierarchy);
        metrics["seed"] = seed;
        out.write(seed_dir(seed) + "/metrics.json", metrics.dump(2) + "\n");
        reports.push_back(report);
    }
    json metrics = aggregate_reports_json(reports, data.hierarchy, "seeds");
    metrics["baseline_draws"] = config.baseline_draws;
    metrics["marginals"] = "training split mean distribution";
    out.write("metrics.json", metrics.dump(2) + "\n");
    const std::string table = aggregate_table(reports, "Random baseline on DiscoGeM test");
    out.write("report.txt", table);
    log << table;
    out.finish();
}

}  // namespace idrr::cli
