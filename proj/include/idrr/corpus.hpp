#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "idrr/distribution.hpp"
#include "idrr/sense_hierarchy.hpp"

namespace idrr {

// Non-fatal problems found while loading (rejected rows, dropped instances).
struct Diagnostics {
    std::vector<std::string> warnings;
    void warn(std::string message) { warnings.push_back(std::move(message)); }
};

// Column layout of a distribution-labelled corpus file.
struct DiscogemColumns {
    char delimiter = ',';
    std::string id = "id";
    std::string arg1 = "arg1";
    std::string arg2 = "arg2";
    std::string genre = "genre";
    // Probability column -> sense name. When empty, every column that is not id/arg/genre
    // and not listed in `ignored` is a probability column named after its sense.
    std::vector<std::pair<std::string, std::string>> sense_columns;
    std::vector<std::string> ignored;
};

// One corpus row before label-space adaptation.
struct RawRelation {
    std::string id;
    std::string arg1;
    std::string arg2;
    std::string genre;
    std::vector<std::pair<std::string, double>> mass;  // original sense name -> probability
};

struct RelationInstance {
    std::string id;
    std::string arg1;
    std::string arg2;
    std::string genre;
    std::string source;
    std::array<LabelDistribution, 3> dist;
    std::array<std::size_t, 3> majority{};

    const LabelDistribution& target(Level level) const { return dist[level_number(level) - 1]; }
    std::size_t majority_at(Level level) const { return majority[level_number(level) - 1]; }

    bool operator==(const RelationInstance&) const = default;
};

std::vector<RawRelation> load_discogem(const std::string& path, const DiscogemColumns& columns,
                                       Diagnostics* diagnostics = nullptr);
std::vector<RawRelation> parse_discogem(std::string_view text, const DiscogemColumns& columns,
                                        Diagnostics* diagnostics = nullptr);

// Drops senses outside the adapted inventory and L1-renormalizes the remaining mass. Level-2
// and level-1 mass is the sum of the adapted children; fallback level-3 senses carry their
// level-2 mass. Throws DegenerateInstanceError when nothing survives.
std::array<LabelDistribution, 3> adapt_label_space(const std::vector<std::pair<std::string, double>>& raw,
                                                   const SenseHierarchy& hierarchy);

// Adapts every row; degenerate rows are excluded and reported through `diagnostics`.
std::vector<RelationInstance> adapt_corpus(const std::vector<RawRelation>& raw, const SenseHierarchy& hierarchy,
                                           const std::string& source, Diagnostics* diagnostics = nullptr);

RelationInstance make_instance(std::string id, std::string arg1, std::string arg2, std::string genre,
                               std::string source, std::array<LabelDistribution, 3> dist);

// Sum of each sense's probability over the corpus, per level.
std::array<std::vector<double>, 3> sense_mass_sums(const std::vector<RelationInstance>& instances,
                                                   const SenseHierarchy& hierarchy);

// ---- splits ----

enum class Split { Train, Validation, Test };
const char* split_name(Split split);
Split parse_split(std::string_view name);

struct SplitRatios {
    double train = 0.7;
    double validation = 0.1;
    double test = 0.2;

    bool operator==(const SplitRatios&) const = default;
};

struct SplitAssignment {
    std::uint64_t seed = 0;
    SplitRatios ratios;
    // In corpus order.
    std::vector<std::pair<std::string, Split>> entries;

    Split of(const std::string& id) const;
    std::vector<std::string> ids(Split split) const;

    bool operator==(const SplitAssignment&) const = default;
};

// Per-class counts from largest-remainder rounding of the ratios; classes smaller than 3 fill
// train, then test, then validation.
std::array<std::size_t, 3> stratum_counts(std::size_t class_size, const SplitRatios& ratios);

// Stratifies on the level-2 majority label. Deterministic for a fixed seed.
SplitAssignment stratified_split(const std::vector<RelationInstance>& instances, const SplitRatios& ratios,
                                 std::uint64_t seed);

std::string format_split_file(const SplitAssignment& split);
SplitAssignment parse_split_file(std::string_view text);

std::vector<RelationInstance> select_split(const std::vector<RelationInstance>& instances,
                                           const SplitAssignment& split, Split which);

// Level-2 majority-label counts per split (rows: level-2 senses; columns: train/validation/test).
std::vector<std::array<std::size_t, 3>> majority_counts_by_split(const std::vector<RelationInstance>& instances,
                                                                 const SplitAssignment& split,
                                                                 const SenseHierarchy& hierarchy);

// ---- single-label (PDTB-style) test sets ----

enum class PdtbScheme { Lin, Ji, Cross };
PdtbScheme parse_pdtb_scheme(std::string_view name);

inline constexpr int kCrossValidationFolds = 12;

struct SingleLabelInstance {
    std::string id;
    int section = 0;
    std::string arg1;
    std::string arg2;
    std::size_t level1 = 0;
    std::size_t level2 = 0;

    bool operator==(const SingleLabelInstance&) const = default;
};

struct SingleLabelTestSet {
    std::string name;  // "Lin", "Ji" or "Cross-<k>"
    std::vector<SingleLabelInstance> instances;
};

// Relations whose level-2 sense is outside the adapted set are dropped; for multi-sense
// relations ('|' or ';' separated) the first listed sense is used.
std::vector<SingleLabelInstance> parse_pdtb_relations(std::string_view text, const SenseHierarchy& hierarchy,
                                                      char delimiter = '\t', Diagnostics* diagnostics = nullptr);

// Test sections of cross-validation fold k: {2k, 2k+1}.
std::array<int, 2> cross_fold_test_sections(int fold);

std::vector<SingleLabelTestSet> build_pdtb_test_sets(const std::vector<SingleLabelInstance>& relations,
                                                     PdtbScheme scheme);
std::vector<SingleLabelTestSet> load_pdtb_splits(const std::string& path, PdtbScheme scheme,
                                                 const SenseHierarchy& hierarchy, char delimiter = '\t',
                                                 Diagnostics* diagnostics = nullptr);

// ---- adapted-corpus cache ----

std::string instances_to_jsonl(const std::vector<RelationInstance>& instances, const SenseHierarchy& hierarchy);
std::vector<RelationInstance> instances_from_jsonl(std::string_view text, const SenseHierarchy& hierarchy);

}  // namespace idrr
