#include "idrr/analysis.hpp"

#include <algorithm>
#include <numeric>

#include "idrr/errors.hpp"

namespace idrr {

std::array<LabelDistribution, 3> mean_distributions(const std::vector<RelationInstance>& instances,
                                                    const SenseHierarchy& hierarchy) {
    if (instances.empty()) throw DataError("cannot compute marginals of an empty split");
    std::array<LabelDistribution, 3> out;
    for (std::size_t l = 0; l < 3; ++l) {
        out[l] = LabelDistribution{kLevels[l], std::vector<double>(hierarchy.size(kLevels[l]), 0.0)};
        for (const auto& inst : instances) {
            for (std::size_t i = 0; i < out[l].size(); ++i) out[l].values[i] += inst.dist[l].values.at(i);
        }
        for (double& v : out[l].values) v /= static_cast<double>(instances.size());
    }
    return out;
}

LabelDistribution sample_frequencies(const LabelDistribution& marginal, std::size_t draws, Rng& rng) {
    if (draws == 0) throw ConfigError("baseline needs at least one draw");
    validate_distribution(marginal.values, 1e-6);
    LabelDistribution out{marginal.level, std::vector<double>(marginal.size(), 0.0)};
    std::vector<std::size_t> counts(marginal.size(), 0);
    for (std::size_t d = 0; d < draws; ++d) ++counts[rng.categorical(marginal.values)];
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out.values[i] = static_cast<double>(counts[i]) / static_cast<double>(draws);
    }
    return out;
}

std::vector<PredictionRecord> random_baseline(const std::array<LabelDistribution, 3>& marginals,
                                              const std::vector<std::string>& ids, std::size_t draws,
                                              std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PredictionRecord> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        PredictionRecord rec;
        rec.id = id;
        for (const auto& marginal : marginals) {
            rec.dist.push_back(sample_frequencies(marginal, draws, rng));
            rec.label.push_back(argmax_lowest(rec.dist.back().values));
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<std::size_t> rank_senses(const LabelDistribution& dist) {
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist.values[a] > dist.values[b]; });
    return order;
}

bool topk_agreement(std::size_t reference, const LabelDistribution& dist, std::size_t k) {
    if (reference >= dist.size()) throw LabelSpaceError("reference label outside the distribution's label space");
    if (k == 0) throw ConfigError("k must be at least 1");
    if (!(dist.values[reference] > 0.0)) return false;
    const auto order = rank_senses(dist);
    const std::size_t limit = std::min(k, order.size());
    return std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(limit), reference) !=
           order.begin() + static_cast<std::ptrdiff_t>(limit);
}

AgreementReport agreement_report(const std::vector<ReferencedDistribution>& items, const std::vector<std::size_t>& ks) {
    AgreementReport report;
    report.total = items.size();
    report.ks = ks;
    for (std::size_t k : ks) {
        std::size_t count = 0;
        for (const auto& item : items) count += topk_agreement(item.reference, item.dist, k) ? 1 : 0;
        report.counts.push_back(count);
    }
    return report;
}

CoherenceReport coherence_report(const std::vector<std::size_t>& pred1, const std::vector<std::size_t>& pred2,
                                 const SenseHierarchy& hierarchy, const std::optional<std::vector<std::size_t>>& gold1,
                                 const std::optional<std::vector<std::size_t>>& gold2) {
    if (pred1.size() != pred2.size()) throw DataError("level-1 and level-2 prediction sequences differ in length");
    CoherenceReport report;
    report.level1.resize(hierarchy.size(Level::One));
    report.level2.resize(hierarchy.size(Level::Two));
    for (std::size_t i = 0; i < pred1.size(); ++i) {
        const bool coherent = hierarchy.is_coherent(pred1[i], pred2[i]);
        auto& e1 = report.level1.at(pred1[i]);
        auto& e2 = report.level2.at(pred2[i]);
        ++e1.predicted;
        ++e2.predicted;
        if (coherent) {
            ++e1.coherent;
            ++e2.coherent;
        }
    }
    auto finish = [](std::vector<CoherenceEntry>& entries, const std::optional<std::vector<std::size_t>>& gold) {
        std::vector<bool> in_gold(entries.size(), true);
        if (gold) {
            std::fill(in_gold.begin(), in_gold.end(), false);
            for (std::size_t g : *gold) in_gold.at(g) = true;
        }
        for (std::size_t s = 0; s < entries.size(); ++s) {
            auto& e = entries[s];
            if (!in_gold[s]) {
                e.marker = SenseMarker::NotInGold;
            } else if (e.predicted == 0) {
                e.marker = SenseMarker::NeverPredicted;
            } else {
                e.percentage = 100.0 * static_cast<double>(e.coherent) / static_cast<double>(e.predicted);
            }
        }
    };
    finish(report.level1, gold1);
    finish(report.level2, gold2);
    return report;
}

std::string format_coherence_cell(const CoherenceEntry& entry) {
    if (entry.marker != SenseMarker::None) return marker_text(entry.marker);
    return format_percentage(entry.percentage);
}

std::string coherence_to_csv(const std::vector<std::pair<std::string, CoherenceReport>>& reports,
                             const SenseHierarchy& hierarchy) {
    std::string out = "level,sense";
    for (const auto& [name, _] : reports) out += "," + name;
    out += "\n";
    for (std::size_t l = 0; l < 2; ++l) {
        const Level level = kLevels[l];
        for (std::size_t s = 0; s < hierarchy.size(level); ++s) {
            out += std::to_string(l + 1) + "," + hierarchy.name(level, s);
            for (const auto& [_, report] : reports) {
                out += "," + format_coherence_cell(l == 0 ? report.level1[s] : report.level2[s]);
            }
            out += "\n";
        }
    }
    return out;
}

CoherenceReport average_coherence(const std::vector<CoherenceReport>& runs) {
    if (runs.empty()) throw DataError("no coherence reports to average");
    CoherenceReport out = runs.front();
    auto merge = [&](std::vector<CoherenceEntry> CoherenceReport::*field) {
        auto& entries = out.*field;
        for (std::size_t s = 0; s < entries.size(); ++s) {
            CoherenceEntry merged;
            std::size_t scored = 0;
            bool all_absent = true;
            double sum = 0.0;
            for (const auto& run : runs) {
                const auto& e = (run.*field).at(s);
                if (e.marker != SenseMarker::NotInGold) all_absent = false;
                merged.predicted += e.predicted;
                merged.coherent += e.coherent;
                if (e.marker == SenseMarker::None) {
                    sum += e.percentage;
                    ++scored;
                }
            }
            if (all_absent) {
                merged.marker = SenseMarker::NotInGold;
            } else if (scored == 0) {
                merged.marker = SenseMarker::NeverPredicted;
            } else {
                merged.percentage = sum / static_cast<double>(scored);
            }
            entries[s] = merged;
        }
    };
    merge(&CoherenceReport::level1);
    merge(&CoherenceReport::level2);
    return out;
}

}  // namespace idrr
