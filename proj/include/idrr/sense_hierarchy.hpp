#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace idrr {

enum class Level : int { One = 1, Two = 2, Three = 3 };

inline constexpr Level kLevels[] = {Level::One, Level::Two, Level::Three};

inline int level_number(Level level) { return static_cast<int>(level); }
Level level_from_number(int n);

struct Sense {
    std::string name;
    std::size_t index = 0;
    // Index of the parent in the level above; empty at level 1.
    std::optional<std::size_t> parent;
    // Level-2 sense reused at level 3 because it has no level-3 children.
    bool is_fallback = false;

    bool operator==(const Sense&) const = default;
};

// Three label spaces (4 / 14 / n3 senses) with parent links level3 -> level2 -> level1.
// Immutable once constructed.
class SenseHierarchy {
public:
    // The adapted inventory: 14 level-2 senses with Similarity in place of Cause+Belief,
    // every catalogued level-3 child of those senses, and fallbacks for childless ones.
    static const SenseHierarchy& standard();

    // Builds the hierarchy from the level-3 names present in a corpus. `names` may also
    // contain level-2 names (they only signal presence). A level-3 name whose level-2
    // parent is outside the adapted set, or an unknown name, is a LabelSpaceError.
    static SenseHierarchy from_level3_names(const std::set<std::string>& names);

    static SenseHierarchy parse_schema(std::string_view text);
    static SenseHierarchy load_schema_file(const std::string& path);
    std::string to_schema() const;

    std::size_t size(Level level) const { return senses(level).size(); }
    const std::vector<Sense>& senses(Level level) const;
    const Sense& sense(Level level, std::size_t index) const;
    const std::string& name(Level level, std::size_t index) const { return sense(level, index).name; }

    // Case-insensitive lookup; throws LabelSpaceError naming the offending string.
    std::size_t index_of(Level level, std::string_view name) const;
    std::optional<std::size_t> find(Level level, std::string_view name) const;

    // Parent index one level up. `level` must be Two or Three.
    std::size_t parent_of(Level level, std::size_t index) const;
    const std::string& parent_of(std::string_view level2_name) const;
    std::size_t level1_ancestor(std::size_t level3_index) const;

    bool is_coherent(std::size_t level1_index, std::size_t level2_index) const;
    bool is_coherent(std::string_view level1_name, std::string_view level2_name) const;

    std::vector<std::size_t> children(Level parent_level, std::size_t index) const;

    bool operator==(const SenseHierarchy&) const = default;

private:
    SenseHierarchy() = default;
    void validate() const;

    std::vector<Sense> level1_;
    std::vector<Sense> level2_;
    std::vector<Sense> level3_;
};

// Ordered level-3 space for the given corpus label names (see from_level3_names).
std::vector<Sense> build_level3_space(const std::set<std::string>& names);

// Resolves any catalogued PDTB 3.0 sense name (level 1, 2 or 3, including senses dropped
// by the adaptation) to its canonical spelling and level; empty when unknown.
struct CatalogEntry {
    std::string name;
    Level level;
    std::string level2;  // own name at level 2, parent name at level 3, empty at level 1
    std::string level1;
    bool adapted = false;  // survives the 14-label adaptation
};
std::optional<CatalogEntry> lookup_catalog(std::string_view name);

std::string to_lower(std::string_view s);

}  // namespace idrr
