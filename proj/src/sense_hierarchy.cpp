#include "idrr/sense_hierarchy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "idrr/errors.hpp"

namespace idrr {

namespace {

struct Level2Row {
    const char* level1;
    const char* name;
    bool adapted;
    std::vector<const char*> level3;
};

// PDTB 3.0 senses annotated in DiscoGeM, in the row order of the corpus statistics table.
// Belief and Speech-Act senses are not part of the inventory.
const std::vector<Level2Row>& catalog_rows() {
    static const std::vector<Level2Row> rows = {
        {"Temporal", "Synchronous", true, {}},
        {"Temporal", "Asynchronous", true, {"Precedence", "Succession"}},
        {"Contingency", "Cause", true, {"Reason", "Result", "NegResult"}},
        {"Contingency", "Condition", true, {"Arg1-as-Cond", "Arg2-as-Cond"}},
        {"Contingency", "Neg-Condition", false, {"Arg1-as-NegCond", "Arg2-as-NegCond"}},
        {"Contingency", "Purpose", true, {"Arg1-as-Goal", "Arg2-as-Goal"}},
        {"Comparison", "Concession", true, {"Arg1-as-Denier", "Arg2-as-Denier"}},
        {"Comparison", "Contrast", true, {}},
        {"Comparison", "Similarity", true, {}},
        {"Expansion", "Conjunction", true, {}},
        {"Expansion", "Disjunction", false, {}},
        {"Expansion", "Equivalence", true, {}},
        {"Expansion", "Exception", false, {"Arg1-as-Exception", "Arg2-as-Exception"}},
        {"Expansion", "Instantiation", true, {"Arg1-as-Instance", "Arg2-as-Instance"}},
        {"Expansion", "Level-of-Detail", true, {"Arg1-as-Detail", "Arg2-as-Detail"}},
        {"Expansion", "Manner", true, {"Arg1-as-Manner", "Arg2-as-Manner"}},
        {"Expansion", "Substitution", true, {"Arg1-as-Substitution", "Arg2-as-Substitution"}},
    };
    return rows;
}

const char* const kLevel1Names[] = {"Temporal", "Contingency", "Comparison", "Expansion"};

// Alternative spellings found in PDTB releases and DiscoGeM exports.
const std::vector<std::pair<std::string, std::string>>& aliases() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"negative-condition", "Neg-Condition"},
        {"negcondition", "Neg-Condition"},
        {"level-of-details", "Level-of-Detail"},
        {"detail", "Level-of-Detail"},
        {"arg1-as-subst", "Arg1-as-Substitution"},
        {"arg2-as-subst", "Arg2-as-Substitution"},
        {"arg1-as-excpt", "Arg1-as-Exception"},
        {"arg2-as-excpt", "Arg2-as-Exception"},
        {"arg1-as-instance", "Arg1-as-Instance"},
        {"arg1-as-negcond", "Arg1-as-NegCond"},
        {"arg2-as-negcond", "Arg2-as-NegCond"},
        {"negresult", "NegResult"},
        {"neg-result", "NegResult"},
    };
    return table;
}

constexpr std::string_view kSchemaMagic = "# idrr sense hierarchy";
constexpr int kSchemaVersion = 1;

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

Level level_from_number(int n) {
    if (n < 1 || n > 3) throw LabelSpaceError("sense level must be 1, 2 or 3, got " + std::to_string(n));
    return static_cast<Level>(n);
}

std::optional<CatalogEntry> lookup_catalog(std::string_view raw) {
    std::string key = to_lower(raw);
    // Dotted labels ("Contingency.Cause.Reason") are looked up by their last component.
    if (const auto dot = key.rfind('.'); dot != std::string::npos) key = key.substr(dot + 1);
    for (const auto& [alias, canonical] : aliases()) {
        if (key == alias) {
            key = to_lower(canonical);
            break;
        }
    }
    for (const char* l1 : kLevel1Names) {
        if (key == to_lower(l1)) return CatalogEntry{l1, Level::One, "", l1, true};
    }
    for (const auto& row : catalog_rows()) {
        if (key == to_lower(row.name)) return CatalogEntry{row.name, Level::Two, row.name, row.level1, row.adapted};
        for (const char* l3 : row.level3) {
            if (key == to_lower(l3)) return CatalogEntry{l3, Level::Three, row.name, row.level1, row.adapted};
        }
    }
    return std::nullopt;
}

std::vector<Sense> build_level3_space(const std::set<std::string>& names) {
    std::set<std::string> present;
    for (const auto& n : names) {
        auto entry = lookup_catalog(n);
        if (!entry) throw LabelSpaceError("unknown sense name '" + n + "'");
        if (entry->level == Level::One) throw LabelSpaceError("level-1 sense '" + n + "' given as a level-3 label");
        if (!entry->adapted) {
            throw LabelSpaceError("sense '" + n + "' has level-2 parent '" + entry->level2 +
                                  "' outside the adapted 14-label set");
        }
        present.insert(entry->name);
    }

    std::vector<Sense> out;
    std::size_t level2_index = 0;
    for (const auto& row : catalog_rows()) {
        if (!row.adapted) continue;
        bool any_child = false;
        for (const char* l3 : row.level3) {
            if (!present.count(l3)) continue;
            out.push_back(Sense{l3, out.size(), level2_index, false});
            any_child = true;
        }
        if (!any_child) out.push_back(Sense{row.name, out.size(), level2_index, true});
        ++level2_index;
    }
    return out;
}

namespace {

SenseHierarchy build_standard() {
    std::set<std::string> names;
    for (const auto& row : catalog_rows()) {
        if (!row.adapted) continue;
        names.insert(row.name);
        for (const char* l3 : row.level3) names.insert(l3);
    }
    return SenseHierarchy::from_level3_names(names);
}

}  // namespace

const SenseHierarchy& SenseHierarchy::standard() {
    static const SenseHierarchy h = build_standard();
    return h;
}

SenseHierarchy SenseHierarchy::from_level3_names(const std::set<std::string>& names) {
    SenseHierarchy h;
    for (std::size_t i = 0; i < std::size(kLevel1Names); ++i) h.level1_.push_back(Sense{kLevel1Names[i], i, std::nullopt, false});
    for (const auto& row : catalog_rows()) {
        if (!row.adapted) continue;
        std::size_t parent = 0;
        while (h.level1_[parent].name != row.level1) ++parent;
        h.level2_.push_back(Sense{row.name, h.level2_.size(), parent, false});
    }
    h.level3_ = build_level3_space(names);
    h.validate();
    return h;
}

void SenseHierarchy::validate() const {
    if (level1_.size() != 4) throw LabelSpaceError("level-1 space must have 4 senses");
    if (level2_.size() != 14) throw LabelSpaceError("level-2 space must have 14 senses");
    if (level3_.empty()) throw LabelSpaceError("level-3 space is empty");
    auto check = [](const std::vector<Sense>& space, std::size_t parent_size, const char* what) {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < space.size(); ++i) {
            const auto& s = space[i];
            if (s.index != i) throw LabelSpaceError(std::string(what) + " sense indices are not contiguous");
            if (!seen.insert(to_lower(s.name)).second) throw LabelSpaceError("duplicate sense '" + s.name + "'");
            if (parent_size == 0) {
                if (s.parent) throw LabelSpaceError("level-1 sense '" + s.name + "' has a parent");
            } else if (!s.parent || *s.parent >= parent_size) {
                throw LabelSpaceError("sense '" + s.name + "' has no valid parent");
            }
        }
    };
    check(level1_, 0, "level-1");
    check(level2_, level1_.size(), "level-2");
    check(level3_, level2_.size(), "level-3");
    for (std::size_t l2 = 0; l2 < level2_.size(); ++l2) {
        if (children(Level::Two, l2).empty()) {
            throw LabelSpaceError("level-2 sense '" + level2_[l2].name + "' has no level-3 member");
        }
    }
    for (const auto& s : level3_) {
        if (s.is_fallback && s.name != level2_[*s.parent].name) {
            throw LabelSpaceError("fallback sense '" + s.name + "' must carry its level-2 parent's name");
        }
    }
}

const std::vector<Sense>& SenseHierarchy::senses(Level level) const {
    switch (level) {
        case Level::One: return level1_;
        case Level::Two: return level2_;
        case Level::Three: return level3_;
    }
    throw LabelSpaceError("bad level");
}

const Sense& SenseHierarchy::sense(Level level, std::size_t index) const {
    const auto& space = senses(level);
    if (index >= space.size()) {
        throw LabelSpaceError("sense index " + std::to_string(index) + " out of range for level " +
                              std::to_string(level_number(level)));
    }
    return space[index];
}

std::optional<std::size_t> SenseHierarchy::find(Level level, std::string_view name) const {
    const std::string key = to_lower(name);
    for (const auto& s : senses(level)) {
        if (to_lower(s.name) == key) return s.index;
    }
    if (auto entry = lookup_catalog(name); entry && entry->level == level) {
        for (const auto& s : senses(level)) {
            if (s.name == entry->name) return s.index;
        }
    }
    return std::nullopt;
}

std::size_t SenseHierarchy::index_of(Level level, std::string_view name) const {
    if (auto idx = find(level, name)) return *idx;
    throw LabelSpaceError("unknown level-" + std::to_string(level_number(level)) + " sense '" + std::string(name) + "'");
}

std::size_t SenseHierarchy::parent_of(Level level, std::size_t index) const {
    if (level == Level::One) throw LabelSpaceError("level-1 senses have no parent");
    return *sense(level, index).parent;
}

const std::string& SenseHierarchy::parent_of(std::string_view level2_name) const {
    return level1_[parent_of(Level::Two, index_of(Level::Two, level2_name))].name;
}

std::size_t SenseHierarchy::level1_ancestor(std::size_t level3_index) const {
    return parent_of(Level::Two, parent_of(Level::Three, level3_index));
}

bool SenseHierarchy::is_coherent(std::size_t level1_index, std::size_t level2_index) const {
    sense(Level::One, level1_index);
    return parent_of(Level::Two, level2_index) == level1_index;
}

bool SenseHierarchy::is_coherent(std::string_view level1_name, std::string_view level2_name) const {
    return is_coherent(index_of(Level::One, level1_name), index_of(Level::Two, level2_name));
}

std::vector<std::size_t> SenseHierarchy::children(Level parent_level, std::size_t index) const {
    if (parent_level == Level::Three) return {};
    const auto& below = parent_level == Level::One ? level2_ : level3_;
    std::vector<std::size_t> out;
    for (const auto& s : below) {
        if (s.parent == index) out.push_back(s.index);
    }
    return out;
}

std::string SenseHierarchy::to_schema() const {
    std::ostringstream os;
    os << kSchemaMagic << "\n";
    os << "version\t" << kSchemaVersion << "\n";
    os << "level\tname\tparent\tis_fallback\n";
    for (const auto& s : level1_) os << "1\t" << s.name << "\t-\t0\n";
    for (const auto& s : level2_) os << "2\t" << s.name << "\t" << level1_[*s.parent].name << "\t0\n";
    for (const auto& s : level3_) {
        os << "3\t" << s.name << "\t" << level2_[*s.parent].name << "\t" << (s.is_fallback ? 1 : 0) << "\n";
    }
    return os.str();
}

SenseHierarchy SenseHierarchy::parse_schema(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        return SchemaError("hierarchy schema line " + std::to_string(line_no) + ": " + msg);
    };

    if (!std::getline(is, line) || line != kSchemaMagic) {
        line_no = 1;
        throw fail("missing '" + std::string(kSchemaMagic) + "' header");
    }
    ++line_no;
    if (!std::getline(is, line)) throw fail("missing version line");
    ++line_no;
    if (line != "version\t" + std::to_string(kSchemaVersion)) throw fail("unsupported version '" + line + "'");
    if (!std::getline(is, line) || line != "level\tname\tparent\tis_fallback") {
        ++line_no;
        throw fail("missing column header");
    }
    ++line_no;

    SenseHierarchy h;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, '\t')) fields.push_back(field);
        if (fields.size() != 4) throw fail("expected 4 tab-separated fields");
        if (fields[0] != "1" && fields[0] != "2" && fields[0] != "3") throw fail("bad level '" + fields[0] + "'");
        if (fields[3] != "0" && fields[3] != "1") throw fail("bad is_fallback '" + fields[3] + "'");
        const bool fallback = fields[3] == "1";
        auto parent_index = [&](const std::vector<Sense>& above) -> std::size_t {
            for (const auto& s : above) {
                if (s.name == fields[2]) return s.index;
            }
            throw fail("unknown parent '" + fields[2] + "'");
        };
        if (fields[0] == "1") {
            if (fields[2] != "-") throw fail("level-1 parent must be '-'");
            h.level1_.push_back(Sense{fields[1], h.level1_.size(), std::nullopt, false});
        } else if (fields[0] == "2") {
            h.level2_.push_back(Sense{fields[1], h.level2_.size(), parent_index(h.level1_), false});
        } else {
            h.level3_.push_back(Sense{fields[1], h.level3_.size(), parent_index(h.level2_), fallback});
        }
    }
    h.validate();
    return h;
}

SenseHierarchy SenseHierarchy::load_schema_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open hierarchy schema file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schema(buf.str());
}

}  // namespace idrr
