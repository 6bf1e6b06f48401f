#include "idrr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "idrr/errors.hpp"

namespace idrr {

double js_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw LabelSpaceError("JS distance between distributions of different sizes");
    validate_distribution(p);
    validate_distribution(q);
    double divergence = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        // p*log2(2p/(p+q)) rather than p*log2(p/m): stays finite when p is denormal.
        const double sum = p[i] + q[i];
        const double a = p[i] > 0.0 ? 0.5 * p[i] * std::log2(2.0 * p[i] / sum) : 0.0;
        const double b = q[i] > 0.0 ? 0.5 * q[i] * std::log2(2.0 * q[i] / sum) : 0.0;
        divergence += a + b;  // one addition per coordinate keeps d(p,q) == d(q,p) bitwise
    }
    return std::sqrt(std::clamp(divergence, 0.0, 1.0));
}

double js_distance(const LabelDistribution& p, const LabelDistribution& q) {
    if (p.level != q.level) throw LabelSpaceError("JS distance between distributions of different levels");
    return js_distance(std::span<const double>(p.values), std::span<const double>(q.values));
}

std::array<double, 3> mean_js(const std::vector<PredictionRecord>& predictions,
                              const std::vector<RelationInstance>& targets) {
    if (predictions.size() != targets.size()) {
        throw DataError("prediction count " + std::to_string(predictions.size()) + " differs from target count " +
                        std::to_string(targets.size()));
    }
    std::map<std::string, const PredictionRecord*> by_id;
    for (const auto& p : predictions) {
        if (!by_id.emplace(p.id, &p).second) throw DataError("duplicate prediction id '" + p.id + "'");
    }
    std::array<double, 3> sum{};
    for (const auto& t : targets) {
        auto it = by_id.find(t.id);
        if (it == by_id.end()) throw DataError("no prediction for instance '" + t.id + "'");
        if (it->second->dist.size() < 3) throw DataError("prediction '" + t.id + "' lacks distributions");
        for (std::size_t l = 0; l < 3; ++l) sum[l] += js_distance(it->second->dist[l], t.dist[l]);
    }
    const double n = targets.empty() ? 1.0 : static_cast<double>(targets.size());
    return {sum[0] / n, sum[1] / n, sum[2] / n};
}

namespace {

void check_labels(LabelSeq predicted, LabelSeq gold, std::size_t space_size) {
    if (predicted.size() != gold.size()) throw DataError("predicted and gold label sequences differ in length");
    for (auto seq : {predicted, gold}) {
        for (std::size_t l : seq) {
            if (l >= space_size) throw LabelSpaceError("label index " + std::to_string(l) + " outside a space of " +
                                                       std::to_string(space_size));
        }
    }
}

}  // namespace

ConfusionMatrix confusion_matrix(LabelSeq predicted, LabelSeq gold, std::size_t space_size) {
    check_labels(predicted, gold, space_size);
    ConfusionMatrix m(space_size, std::vector<std::size_t>(space_size, 0));
    for (std::size_t i = 0; i < gold.size(); ++i) ++m[gold[i]][predicted[i]];
    return m;
}

const char* marker_text(SenseMarker marker) {
    switch (marker) {
        case SenseMarker::None: return "";
        case SenseMarker::NotInGold: return "-";
        case SenseMarker::NeverPredicted: return "n/a";
    }
    return "";
}

std::vector<SenseScore> per_sense_f1(LabelSeq predicted, LabelSeq gold, std::size_t space_size) {
    const ConfusionMatrix m = confusion_matrix(predicted, gold, space_size);
    std::vector<SenseScore> out(space_size);
    for (std::size_t s = 0; s < space_size; ++s) {
        std::size_t row = 0, col = 0;
        for (std::size_t k = 0; k < space_size; ++k) {
            row += m[s][k];
            col += m[k][s];
        }
        const std::size_t tp = m[s][s];
        SenseScore& score = out[s];
        score.support = row;
        score.predicted = col;
        if (row == 0) score.marker = SenseMarker::NotInGold;
        if (tp > 0) {
            const double precision = static_cast<double>(tp) / static_cast<double>(col);
            const double recall = static_cast<double>(tp) / static_cast<double>(row);
            score.f1 = 100.0 * 2.0 * precision * recall / (precision + recall);
        }
    }
    return out;
}

double weighted_f1(LabelSeq predicted, LabelSeq gold, std::size_t space_size) {
    const auto scores = per_sense_f1(predicted, gold, space_size);
    if (gold.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : scores) total += s.f1 * static_cast<double>(s.support);
    return total / static_cast<double>(gold.size());
}

namespace {

LevelReport single_label_level(Level level, const std::vector<std::size_t>& predicted,
                               const std::vector<std::size_t>& gold, const SenseHierarchy& hierarchy) {
    LevelReport r;
    r.level = level;
    const std::size_t n = hierarchy.size(level);
    r.f1_weighted = weighted_f1(predicted, gold, n);
    r.per_sense = per_sense_f1(predicted, gold, n);
    r.confusion = confusion_matrix(predicted, gold, n);
    return r;
}

template <typename Target>
std::vector<const PredictionRecord*> align(const std::vector<PredictionRecord>& predictions,
                                           const std::vector<Target>& targets) {
    if (predictions.size() != targets.size()) {
        throw DataError("prediction count " + std::to_string(predictions.size()) + " differs from target count " +
                        std::to_string(targets.size()));
    }
    std::map<std::string, const PredictionRecord*> by_id;
    for (const auto& p : predictions) {
        if (!by_id.emplace(p.id, &p).second) throw DataError("duplicate prediction id '" + p.id + "'");
    }
    std::vector<const PredictionRecord*> out;
    for (const auto& t : targets) {
        auto it = by_id.find(t.id);
        if (it == by_id.end()) throw DataError("no prediction for instance '" + t.id + "'");
        out.push_back(it->second);
    }
    return out;
}

}  // namespace

EvaluationReport evaluate_distributions(const std::vector<PredictionRecord>& predictions,
                                        const std::vector<RelationInstance>& targets,
                                        const SenseHierarchy& hierarchy) {
    const auto aligned = align(predictions, targets);
    const auto js = mean_js(predictions, targets);
    EvaluationReport report;
    report.instance_count = targets.size();
    for (std::size_t l = 0; l < 3; ++l) {
        std::vector<std::size_t> pred, gold;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (aligned[i]->label.size() < 3) throw DataError("prediction '" + targets[i].id + "' lacks labels");
            pred.push_back(aligned[i]->label[l]);
            gold.push_back(targets[i].majority[l]);
        }
        LevelReport r = single_label_level(kLevels[l], pred, gold, hierarchy);
        r.js_mean = js[l];
        report.levels.push_back(std::move(r));
    }
    return report;
}

EvaluationReport evaluate_single_label(const std::vector<PredictionRecord>& predictions,
                                       const std::vector<SingleLabelInstance>& targets,
                                       const SenseHierarchy& hierarchy) {
    const auto aligned = align(predictions, targets);
    EvaluationReport report;
    report.instance_count = targets.size();
    for (std::size_t l = 0; l < 2; ++l) {
        std::vector<std::size_t> pred, gold;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (aligned[i]->label.size() < 2) throw DataError("prediction '" + targets[i].id + "' lacks labels");
            pred.push_back(aligned[i]->label[l]);
            gold.push_back(l == 0 ? targets[i].level1 : targets[i].level2);
        }
        report.levels.push_back(single_label_level(kLevels[l], pred, gold, hierarchy));
    }
    return report;
}

std::string format_percentage(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::string confusion_to_csv(const ConfusionMatrix& matrix, const SenseHierarchy& hierarchy, Level level) {
    std::string out = "gold\\predicted";
    for (const auto& s : hierarchy.senses(level)) out += "," + s.name;
    out += "\n";
    for (std::size_t r = 0; r < matrix.size(); ++r) {
        out += hierarchy.name(level, r);
        for (std::size_t c : matrix[r]) out += "," + std::to_string(c);
        out += "\n";
    }
    return out;
}

std::string format_report_text(const EvaluationReport& report, const SenseHierarchy& hierarchy,
                               const std::string& title) {
    std::ostringstream os;
    os << title << " (" << report.instance_count << " instances)\n";
    for (const auto& level : report.levels) {
        os << "\nLevel-" << level_number(level.level);
        if (level.js_mean) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", *level.js_mean);
            os << "  JS " << buf;
        }
        os << "  weighted F1 " << format_percentage(level.f1_weighted) << "\n";
        std::size_t width = 5;
        for (const auto& s : hierarchy.senses(level.level)) width = std::max(width, s.name.size());
        for (std::size_t i = 0; i < level.per_sense.size(); ++i) {
            const auto& score = level.per_sense[i];
            std::string name = hierarchy.name(level.level, i);
            name.resize(width, ' ');
            os << "  " << name << "  "
               << (score.marker == SenseMarker::NotInGold ? std::string("-") : format_percentage(score.f1))
               << "  (support " << score.support << ", predicted " << score.predicted << ")\n";
        }
    }
    return os.str();
}

}  // namespace idrr
