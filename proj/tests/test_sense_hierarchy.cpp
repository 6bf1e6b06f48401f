#include <doctest.h>

#include "idrr/delimited.hpp"
#include "idrr/errors.hpp"
#include "idrr/sense_hierarchy.hpp"
#include "support.hpp"

using namespace idrr;

TEST_CASE("standard hierarchy sizes and order") {
    const auto& h = SenseHierarchy::standard();
    CHECK(h.size(Level::One) == 4);
    CHECK(h.size(Level::Two) == 14);
    CHECK(h.size(Level::Three) == 24);
    CHECK(h.name(Level::One, 0) == "Temporal");
    CHECK(h.name(Level::Two, 2) == "Cause");
    CHECK(h.name(Level::Two, 13) == "Substitution");
    CHECK(h.name(Level::Three, 0) == "Synchronous");
    CHECK(h.sense(Level::Three, 0).is_fallback);
    CHECK_FALSE(h.sense(Level::Three, 1).is_fallback);
}

TEST_CASE("parent_of") {
    const auto& h = SenseHierarchy::standard();
    CHECK(h.parent_of("Cause") == "Contingency");
    CHECK(h.parent_of("Asynchronous") == "Temporal");
    CHECK(h.parent_of("Similarity") == "Comparison");
    CHECK(h.parent_of("level-of-detail") == "Expansion");
    CHECK_THROWS_AS(h.parent_of("Disjunction"), LabelSpaceError);
    CHECK_THROWS_AS(h.parent_of(Level::One, 0), LabelSpaceError);
}

TEST_CASE("is_coherent") {
    const auto& h = SenseHierarchy::standard();
    CHECK(h.is_coherent("Temporal", "Asynchronous"));
    CHECK_FALSE(h.is_coherent("Expansion", "Cause"));
    CHECK(h.is_coherent("Comparison", "Contrast"));
    for (std::size_t s = 0; s < h.size(Level::Two); ++s) CHECK(h.is_coherent(h.parent_of(Level::Two, s), s));
}

TEST_CASE("build_level3_space") {
    SUBCASE("two non-fallback members under Asynchronous") {
        const auto space = build_level3_space({"Precedence", "Succession", "Conjunction"});
        std::size_t async_children = 0;
        for (const auto& s : space) {
            if (s.parent == 1u) {
                CHECK_FALSE(s.is_fallback);
                ++async_children;
            }
        }
        CHECK(async_children == 2);
    }
    SUBCASE("childless sense contributes a fallback") {
        const auto space = build_level3_space({"Conjunction"});
        bool found = false;
        for (const auto& s : space) {
            if (s.name == "Conjunction") {
                found = true;
                CHECK(s.is_fallback);
            }
        }
        CHECK(found);
    }
    SUBCASE("no children anywhere gives 14 fallbacks") {
        const auto space = build_level3_space({});
        REQUIRE(space.size() == 14);
        for (std::size_t i = 0; i < space.size(); ++i) {
            CHECK(space[i].is_fallback);
            CHECK(space[i].parent == i);
        }
    }
    SUBCASE("bad names") {
        CHECK_THROWS_AS(build_level3_space({"Arg1-as-NegCond"}), LabelSpaceError);
        CHECK_THROWS_AS(build_level3_space({"Frobnication"}), LabelSpaceError);
    }
}

TEST_CASE("every level-3 sense reaches exactly one level-1 sense") {
    const auto& h = SenseHierarchy::standard();
    std::size_t covered = 0;
    for (std::size_t l1 = 0; l1 < h.size(Level::One); ++l1) {
        for (std::size_t l2 : h.children(Level::One, l1)) covered += h.children(Level::Two, l2).size();
    }
    CHECK(covered == h.size(Level::Three));
    for (std::size_t s = 0; s < h.size(Level::Three); ++s) CHECK(h.level1_ancestor(s) < 4);
}

TEST_CASE("schema round trip and the checked-in file") {
    const auto& h = SenseHierarchy::standard();
    const std::string schema = h.to_schema();
    CHECK(SenseHierarchy::parse_schema(schema) == h);
    CHECK(SenseHierarchy::parse_schema(schema).to_schema() == schema);
    CHECK(read_text_file(testing::source_path("data/sense_hierarchy.tsv")) == schema);
}

TEST_CASE("schema rejects malformed input") {
    CHECK_THROWS_AS(SenseHierarchy::parse_schema("nonsense"), Error);
    std::string schema = SenseHierarchy::standard().to_schema();
    const std::string row = "3\tPrecedence\tAsynchronous\t0\n";
    std::string broken = schema;
    broken.replace(schema.find(row), row.size(), "3\tPrecedence\tNowhere\t0\n");
    CHECK_THROWS_AS(SenseHierarchy::parse_schema(broken), Error);
}

TEST_CASE("lookup accepts aliases and dotted labels") {
    CHECK(lookup_catalog("Contingency.Cause.Reason")->name == "Reason");
    CHECK(lookup_catalog("arg1-as-subst")->name == "Arg1-as-Substitution");
    CHECK_FALSE(lookup_catalog("Disjunction")->adapted);
    CHECK_FALSE(lookup_catalog("norel").has_value());
    const auto& h = SenseHierarchy::standard();
    CHECK(h.index_of(Level::Two, "cause") == 2);
    CHECK_THROWS_AS(h.index_of(Level::Two, "Belief"), LabelSpaceError);
}
