#include "idrr/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "idrr/delimited.hpp"
#include "idrr/errors.hpp"
#include "idrr/random.hpp"

namespace idrr {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

bool parse_double(std::string_view text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::vector<RawRelation> parse_discogem(std::string_view text, const DiscogemColumns& columns,
                                        Diagnostics* diagnostics) {
    const DelimitedTable table = parse_delimited(text, columns.delimiter);
    if (table.header.empty()) return {};

    const std::set<std::string> meta = {columns.id, columns.arg1, columns.arg2, columns.genre};
    std::vector<std::pair<std::string, std::string>> sense_columns = columns.sense_columns;
    if (sense_columns.empty()) {
        const std::set<std::string> ignored(columns.ignored.begin(), columns.ignored.end());
        for (const auto& h : table.header) {
            if (!meta.count(h) && !ignored.count(h)) sense_columns.emplace_back(h, h);
        }
    }

    std::vector<std::string> missing;
    auto require = [&](const std::string& name) {
        const std::size_t c = table.column(name);
        if (c == std::string::npos) missing.push_back(name);
        return c;
    };
    const std::size_t id_col = require(columns.id);
    const std::size_t arg1_col = require(columns.arg1);
    const std::size_t arg2_col = require(columns.arg2);
    const std::size_t genre_col = columns.genre.empty() ? std::string::npos : require(columns.genre);
    std::vector<std::size_t> sense_cols;
    for (const auto& [column, sense] : sense_columns) sense_cols.push_back(require(column));
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
        throw SchemaError("corpus is missing mapped column(s): " + names);
    }

    std::vector<RawRelation> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string line = std::to_string(table.row_lines[r]);
        if (row.size() != table.header.size()) {
            throw ParseError("line " + line + ": expected " + std::to_string(table.header.size()) + " fields, found " +
                             std::to_string(row.size()));
        }
        RawRelation rel;
        rel.id = trim(row[id_col]);
        if (rel.id.empty()) rel.id = "row-" + line;
        rel.arg1 = trim(row[arg1_col]);
        rel.arg2 = trim(row[arg2_col]);
        if (genre_col != std::string::npos) rel.genre = trim(row[genre_col]);
        if (rel.arg1.empty() || rel.arg2.empty()) {
            if (diagnostics) diagnostics->warn("relation '" + rel.id + "' (line " + line + ") rejected: missing argument text");
            continue;
        }
        for (std::size_t k = 0; k < sense_cols.size(); ++k) {
            double p = 0.0;
            if (!parse_double(row[sense_cols[k]], p)) {
                throw ParseError("relation '" + rel.id + "' (line " + line + "): non-numeric probability '" +
                                 row[sense_cols[k]] + "' in column '" + sense_columns[k].first + "'");
            }
            if (p < 0.0) {
                throw ParseError("relation '" + rel.id + "' (line " + line + "): negative probability in column '" +
                                 sense_columns[k].first + "'");
            }
            rel.mass.emplace_back(sense_columns[k].second, p);
        }
        out.push_back(std::move(rel));
    }
    return out;
}

std::vector<RawRelation> load_discogem(const std::string& path, const DiscogemColumns& columns,
                                       Diagnostics* diagnostics) {
    return parse_discogem(read_text_file(path), columns, diagnostics);
}

std::array<LabelDistribution, 3> adapt_label_space(const std::vector<std::pair<std::string, double>>& raw,
                                                   const SenseHierarchy& hierarchy) {
    const std::size_t n3 = hierarchy.size(Level::Three);
    std::vector<double> leaf(n3, 0.0);
    for (const auto& [name, p] : raw) {
        if (!std::isfinite(p) || p < 0.0) throw DataError("invalid probability for sense '" + name + "'");
        if (p == 0.0) continue;
        const auto entry = lookup_catalog(name);
        if (!entry || !entry->adapted || entry->level == Level::One) continue;
        if (entry->level == Level::Three) {
            const auto idx = hierarchy.find(Level::Three, entry->name);
            if (!idx) throw LabelSpaceError("level-3 sense '" + name + "' is not in the level-3 label space");
            leaf[*idx] += p;
        } else {
            // Mass annotated only at level 2 is spread evenly over its level-3 members.
            const auto children = hierarchy.children(Level::Two, hierarchy.index_of(Level::Two, entry->name));
            for (std::size_t c : children) leaf[c] += p / static_cast<double>(children.size());
        }
    }
    double total = 0.0;
    for (double v : leaf) total += v;
    if (!(total > 0.0)) throw DegenerateInstanceError("no probability mass left after label-space adaptation");

    std::array<LabelDistribution, 3> out{LabelDistribution{Level::One, std::vector<double>(hierarchy.size(Level::One), 0.0)},
                                         LabelDistribution{Level::Two, std::vector<double>(hierarchy.size(Level::Two), 0.0)},
                                         LabelDistribution{Level::Three, std::vector<double>(n3, 0.0)}};
    for (std::size_t i = 0; i < n3; ++i) {
        const double v = leaf[i] / total;
        out[2].values[i] = v;
        const std::size_t l2 = hierarchy.parent_of(Level::Three, i);
        out[1].values[l2] += v;
        out[0].values[hierarchy.parent_of(Level::Two, l2)] += v;
    }
    return out;
}

RelationInstance make_instance(std::string id, std::string arg1, std::string arg2, std::string genre,
                               std::string source, std::array<LabelDistribution, 3> dist) {
    RelationInstance inst;
    inst.id = std::move(id);
    inst.arg1 = std::move(arg1);
    inst.arg2 = std::move(arg2);
    inst.genre = std::move(genre);
    inst.source = std::move(source);
    inst.dist = std::move(dist);
    for (std::size_t l = 0; l < 3; ++l) inst.majority[l] = majority_label(inst.dist[l]);
    return inst;
}

std::vector<RelationInstance> adapt_corpus(const std::vector<RawRelation>& raw, const SenseHierarchy& hierarchy,
                                           const std::string& source, Diagnostics* diagnostics) {
    std::vector<RelationInstance> out;
    out.reserve(raw.size());
    for (const auto& rel : raw) {
        try {
            out.push_back(make_instance(rel.id, rel.arg1, rel.arg2, rel.genre, source,
                                        adapt_label_space(rel.mass, hierarchy)));
        } catch (const DegenerateInstanceError& e) {
            if (diagnostics) diagnostics->warn("relation '" + rel.id + "' excluded: " + e.what());
        }
    }
    return out;
}

std::array<std::vector<double>, 3> sense_mass_sums(const std::vector<RelationInstance>& instances,
                                                   const SenseHierarchy& hierarchy) {
    std::array<std::vector<double>, 3> sums;
    for (std::size_t l = 0; l < 3; ++l) sums[l].assign(hierarchy.size(kLevels[l]), 0.0);
    for (const auto& inst : instances) {
        for (std::size_t l = 0; l < 3; ++l) {
            for (std::size_t i = 0; i < sums[l].size(); ++i) sums[l][i] += inst.dist[l].values.at(i);
        }
    }
    return sums;
}

// ---- splits ----

const char* split_name(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "?";
}

Split parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "validation") return Split::Validation;
    if (name == "test") return Split::Test;
    throw DataError("unknown split name '" + std::string(name) + "'");
}

Split SplitAssignment::of(const std::string& id) const {
    for (const auto& [entry_id, split] : entries) {
        if (entry_id == id) return split;
    }
    throw DataError("instance '" + id + "' has no split assignment");
}

std::vector<std::string> SplitAssignment::ids(Split split) const {
    std::vector<std::string> out;
    for (const auto& [id, s] : entries) {
        if (s == split) out.push_back(id);
    }
    return out;
}

std::array<std::size_t, 3> stratum_counts(std::size_t n, const SplitRatios& ratios) {
    if (n < 3) {
        // train, then test, then validation
        return {n >= 1 ? 1u : 0u, 0u, n >= 2 ? 1u : 0u};
    }
    const std::array<double, 3> r = {ratios.train, ratios.validation, ratios.test};
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < 3; ++s) {
        const double quota = r[s] * static_cast<double>(n);
        const double base = std::floor(quota + 1e-9);
        counts[s] = static_cast<std::size_t>(base);
        remainder[s] = quota - base;
        assigned += counts[s];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % 3]];
    return counts;
}

SplitAssignment stratified_split(const std::vector<RelationInstance>& instances, const SplitRatios& ratios,
                                 std::uint64_t seed) {
    const double sum = ratios.train + ratios.validation + ratios.test;
    if (std::abs(sum - 1.0) > 1e-9 || ratios.train < 0 || ratios.validation < 0 || ratios.test < 0) {
        throw ConfigError("split ratios must be non-negative and sum to 1");
    }
    std::map<std::size_t, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < instances.size(); ++i) by_class[instances[i].majority_at(Level::Two)].push_back(i);

    std::vector<Split> assigned(instances.size(), Split::Train);
    Rng rng(seed);
    for (auto& [label, members] : by_class) {
        rng.shuffle(members);
        const auto counts = stratum_counts(members.size(), ratios);
        std::size_t k = 0;
        for (std::size_t c = 0; c < counts[0]; ++c) assigned[members[k++]] = Split::Train;
        for (std::size_t c = 0; c < counts[1]; ++c) assigned[members[k++]] = Split::Validation;
        for (std::size_t c = 0; c < counts[2]; ++c) assigned[members[k++]] = Split::Test;
    }

    SplitAssignment out;
    out.seed = seed;
    out.ratios = ratios;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (!seen.insert(instances[i].id).second) throw DataError("duplicate instance id '" + instances[i].id + "'");
        out.entries.emplace_back(instances[i].id, assigned[i]);
    }
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string format_split_file(const SplitAssignment& split) {
    std::string out = "# idrr split v1\n";
    out += "seed\t" + std::to_string(split.seed) + "\n";
    out += "ratios\t" + format_double(split.ratios.train) + "\t" + format_double(split.ratios.validation) + "\t" +
           format_double(split.ratios.test) + "\n";
    for (const auto& [id, s] : split.entries) out += id + "\t" + split_name(s) + "\n";
    return out;
}

SplitAssignment parse_split_file(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != "# idrr split v1") throw SchemaError("split file: missing header");
    SplitAssignment out;
    auto fields = [](const std::string& l) {
        std::vector<std::string> f;
        std::string x;
        std::istringstream ls(l);
        while (std::getline(ls, x, '\t')) f.push_back(x);
        return f;
    };
    if (!std::getline(is, line)) throw SchemaError("split file: missing seed line");
    auto f = fields(line);
    if (f.size() != 2 || f[0] != "seed") throw SchemaError("split file: bad seed line");
    out.seed = std::stoull(f[1]);
    if (!std::getline(is, line)) throw SchemaError("split file: missing ratios line");
    f = fields(line);
    if (f.size() != 4 || f[0] != "ratios") throw SchemaError("split file: bad ratios line");
    out.ratios = {std::stod(f[1]), std::stod(f[2]), std::stod(f[3])};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        f = fields(line);
        if (f.size() != 2) throw SchemaError("split file: bad entry '" + line + "'");
        out.entries.emplace_back(f[0], parse_split(f[1]));
    }
    return out;
}

std::vector<RelationInstance> select_split(const std::vector<RelationInstance>& instances,
                                           const SplitAssignment& split, Split which) {
    std::map<std::string, Split> lookup(split.entries.begin(), split.entries.end());
    std::vector<RelationInstance> out;
    for (const auto& inst : instances) {
        auto it = lookup.find(inst.id);
        if (it == lookup.end()) throw DataError("instance '" + inst.id + "' has no split assignment");
        if (it->second == which) out.push_back(inst);
    }
    return out;
}

std::vector<std::array<std::size_t, 3>> majority_counts_by_split(const std::vector<RelationInstance>& instances,
                                                                 const SplitAssignment& split,
                                                                 const SenseHierarchy& hierarchy) {
    std::map<std::string, Split> lookup(split.entries.begin(), split.entries.end());
    std::vector<std::array<std::size_t, 3>> counts(hierarchy.size(Level::Two), {0, 0, 0});
    for (const auto& inst : instances) {
        auto it = lookup.find(inst.id);
        if (it == lookup.end()) throw DataError("instance '" + inst.id + "' has no split assignment");
        ++counts.at(inst.majority_at(Level::Two))[static_cast<std::size_t>(it->second)];
    }
    return counts;
}

// ---- PDTB ----

PdtbScheme parse_pdtb_scheme(std::string_view name) {
    const std::string n = to_lower(name);
    if (n == "lin") return PdtbScheme::Lin;
    if (n == "ji") return PdtbScheme::Ji;
    if (n == "cross") return PdtbScheme::Cross;
    throw ConfigError("unknown PDTB test scheme '" + std::string(name) + "' (expected lin, ji or cross)");
}

namespace {

// "Contingency.Cause.Reason" -> "Cause"; "Cause" -> "Cause".
std::string level2_component(const std::string& label) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream is(label);
    while (std::getline(is, part, '.')) parts.push_back(trim(part));
    if (parts.size() >= 2) return parts[1];
    return parts.empty() ? std::string() : parts[0];
}

std::string first_sense(const std::string& field) {
    const auto cut = field.find_first_of("|;");
    return trim(cut == std::string::npos ? field : field.substr(0, cut));
}

}  // namespace

std::vector<SingleLabelInstance> parse_pdtb_relations(std::string_view text, const SenseHierarchy& hierarchy,
                                                      char delimiter, Diagnostics* diagnostics) {
    const DelimitedTable table = parse_delimited(text, delimiter);
    if (table.header.empty()) return {};
    std::vector<std::string> missing;
    auto require = [&](const char* name) {
        const std::size_t c = table.column(name);
        if (c == std::string::npos) missing.emplace_back(name);
        return c;
    };
    const std::size_t section_col = require("section");
    const std::size_t arg1_col = require("arg1");
    const std::size_t arg2_col = require("arg2");
    const std::size_t l1_col = require("level1");
    const std::size_t l2_col = require("level2");
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
        throw SchemaError("PDTB file is missing column(s): " + names);
    }
    const std::size_t id_col = table.column("id");

    std::vector<SingleLabelInstance> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string line = std::to_string(table.row_lines[r]);
        if (row.size() != table.header.size()) throw ParseError("PDTB line " + line + ": wrong number of fields");
        SingleLabelInstance inst;
        inst.id = id_col != std::string::npos && !trim(row[id_col]).empty() ? trim(row[id_col]) : "pdtb-" + line;
        const std::string section = trim(row[section_col]);
        if (section.empty()) throw SchemaError("PDTB line " + line + ": section field missing");
        double section_value = 0.0;
        if (!parse_double(section, section_value) || section_value < 0 || section_value != std::floor(section_value)) {
            throw ParseError("PDTB line " + line + ": bad section '" + section + "'");
        }
        inst.section = static_cast<int>(section_value);
        inst.arg1 = trim(row[arg1_col]);
        inst.arg2 = trim(row[arg2_col]);
        if (inst.arg1.empty() || inst.arg2.empty()) {
            if (diagnostics) diagnostics->warn("PDTB line " + line + " dropped: missing argument text");
            continue;
        }
        const std::string l2_name = level2_component(first_sense(row[l2_col]));
        const auto entry = lookup_catalog(l2_name);
        if (l2_name.empty() || !entry || entry->level != Level::Two || !entry->adapted) {
            if (diagnostics) diagnostics->warn("PDTB line " + line + " dropped: level-2 sense '" + l2_name + "' outside the label set");
            continue;
        }
        inst.level2 = hierarchy.index_of(Level::Two, entry->name);
        const std::string l1_field = first_sense(row[l1_col]);
        const std::string l1_name = l1_field.substr(0, l1_field.find('.'));
        inst.level1 = l1_name.empty() ? hierarchy.parent_of(Level::Two, inst.level2)
                                      : hierarchy.index_of(Level::One, l1_name);
        out.push_back(std::move(inst));
    }
    return out;
}

std::array<int, 2> cross_fold_test_sections(int fold) {
    if (fold < 0 || fold >= kCrossValidationFolds) throw ConfigError("cross-validation fold out of range");
    return {2 * fold, 2 * fold + 1};
}

std::vector<SingleLabelTestSet> build_pdtb_test_sets(const std::vector<SingleLabelInstance>& relations,
                                                     PdtbScheme scheme) {
    if (relations.empty()) throw DataError("PDTB input has no relations: no sections found");
    auto collect = [&](std::string name, std::initializer_list<int> sections) {
        SingleLabelTestSet set{std::move(name), {}};
        for (const auto& r : relations) {
            if (std::find(sections.begin(), sections.end(), r.section) != sections.end()) set.instances.push_back(r);
        }
        return set;
    };
    std::vector<SingleLabelTestSet> out;
    switch (scheme) {
        case PdtbScheme::Lin: out.push_back(collect("Lin", {23})); break;
        case PdtbScheme::Ji: out.push_back(collect("Ji", {21, 22})); break;
        case PdtbScheme::Cross:
            for (int k = 0; k < kCrossValidationFolds; ++k) {
                const auto s = cross_fold_test_sections(k);
                out.push_back(collect("Cross-" + std::to_string(k), {s[0], s[1]}));
            }
            break;
    }
    return out;
}

std::vector<SingleLabelTestSet> load_pdtb_splits(const std::string& path, PdtbScheme scheme,
                                                 const SenseHierarchy& hierarchy, char delimiter,
                                                 Diagnostics* diagnostics) {
    return build_pdtb_test_sets(parse_pdtb_relations(read_text_file(path), hierarchy, delimiter, diagnostics), scheme);
}

// ---- cache ----

std::string instances_to_jsonl(const std::vector<RelationInstance>& instances, const SenseHierarchy& hierarchy) {
    std::string out;
    for (const auto& inst : instances) {
        nlohmann::ordered_json j;
        j["id"] = inst.id;
        j["arg1"] = inst.arg1;
        j["arg2"] = inst.arg2;
        j["genre"] = inst.genre;
        j["source"] = inst.source;
        for (std::size_t l = 0; l < 3; ++l) {
            j["dist" + std::to_string(l + 1)] = inst.dist[l].values;
            j["label" + std::to_string(l + 1)] = hierarchy.name(kLevels[l], inst.majority[l]);
        }
        out += j.dump() + "\n";
    }
    return out;
}

std::vector<RelationInstance> instances_from_jsonl(std::string_view text, const SenseHierarchy& hierarchy) {
    std::vector<RelationInstance> out;
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            std::array<LabelDistribution, 3> dist;
            for (std::size_t l = 0; l < 3; ++l) {
                dist[l] = LabelDistribution{kLevels[l], j.at("dist" + std::to_string(l + 1)).get<std::vector<double>>()};
                validate_distribution(dist[l], hierarchy);
            }
            out.push_back(make_instance(j.at("id"), j.at("arg1"), j.at("arg2"), j.value("genre", ""),
                                        j.value("source", ""), std::move(dist)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("instance cache line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace idrr
