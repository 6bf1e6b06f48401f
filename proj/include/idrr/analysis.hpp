#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "idrr/corpus.hpp"
#include "idrr/distribution.hpp"
#include "idrr/metrics.hpp"
#include "idrr/predictions.hpp"
#include "idrr/random.hpp"
#include "idrr/sense_hierarchy.hpp"

namespace idrr {

// Mean target distribution per level over a set of instances.
std::array<LabelDistribution, 3> mean_distributions(const std::vector<RelationInstance>& instances,
                                                    const SenseHierarchy& hierarchy);

// Empirical frequencies of `draws` labels sampled from `marginal`.
LabelDistribution sample_frequencies(const LabelDistribution& marginal, std::size_t draws, Rng& rng);

// Annotation-emulating baseline: per instance and level, `draws` labels sampled from the
// level's marginal, returned as their frequency vector.
std::vector<PredictionRecord> random_baseline(const std::array<LabelDistribution, 3>& marginals,
                                              const std::vector<std::string>& ids, std::size_t draws,
                                              std::uint64_t seed);

// Sense indices by decreasing probability; equal probabilities keep canonical order.
std::vector<std::size_t> rank_senses(const LabelDistribution& dist);

// True when `reference` is among the k highest-ranked senses of `dist` and received some
// probability mass.
bool topk_agreement(std::size_t reference, const LabelDistribution& dist, std::size_t k);

struct AgreementReport {
    std::size_t total = 0;
    std::vector<std::size_t> ks;
    std::vector<std::size_t> counts;

    double percentage(std::size_t i) const {
        return total == 0 ? 0.0 : 100.0 * static_cast<double>(counts[i]) / static_cast<double>(total);
    }
};

struct ReferencedDistribution {
    std::size_t reference = 0;
    LabelDistribution dist;
};

AgreementReport agreement_report(const std::vector<ReferencedDistribution>& items,
                                 const std::vector<std::size_t>& ks = {1, 3, 5, 10});

struct CoherenceEntry {
    SenseMarker marker = SenseMarker::None;
    double percentage = 0.0;
    std::size_t predicted = 0;
    std::size_t coherent = 0;
};

struct CoherenceReport {
    std::vector<CoherenceEntry> level1;
    std::vector<CoherenceEntry> level2;
};

// For each level-1 sense s: share of instances predicted s whose level-2 prediction is a child
// of s; symmetrically for level-2 senses. Senses never predicted are marked n/a; when gold
// labels are supplied, senses absent from them are marked "-" instead.
CoherenceReport coherence_report(const std::vector<std::size_t>& pred1, const std::vector<std::size_t>& pred2,
                                 const SenseHierarchy& hierarchy,
                                 const std::optional<std::vector<std::size_t>>& gold1 = std::nullopt,
                                 const std::optional<std::vector<std::size_t>>& gold2 = std::nullopt);

std::string format_coherence_cell(const CoherenceEntry& entry);

// Rows are senses (level 1 then level 2), one column per named report.
std::string coherence_to_csv(const std::vector<std::pair<std::string, CoherenceReport>>& reports,
                             const SenseHierarchy& hierarchy);

}  // namespace idrr

namespace idrr {

// Per-sense mean of coherence percentages over several runs. A sense is "-" if it is "-" in
// every run, n/a if it was never predicted in any run.
CoherenceReport average_coherence(const std::vector<CoherenceReport>& runs);

}  // namespace idrr
