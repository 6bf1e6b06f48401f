#pragma once
// Shared helpers for the test binaries.

#include <filesystem>
#include <string>
#include <vector>

#include "idrr/corpus.hpp"
#include "idrr/random.hpp"

namespace idrr::testing {

inline std::string fixture(const std::string& name) {
    return std::string(IDRR_SOURCE_DIR) + "/tests/fixtures/" + name;
}

inline std::string source_path(const std::string& relative) { return std::string(IDRR_SOURCE_DIR) + "/" + relative; }

// Fresh, empty scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

// Separable toy corpus: instance i gets a one-hot target on level-3 sense (i mod |level3|)
// and both arguments carry a keyword unique to that sense, followed by `filler_words` random
// words from a small shared vocabulary.
std::vector<RelationInstance> separable_corpus(std::size_t n, std::uint64_t seed = 5, int filler_words = 1);

// Random distribution over `size` senses; roughly a third of the entries are zero.
std::vector<double> random_distribution(Rng& rng, std::size_t size, bool allow_zeros = true);

// Random instance whose level-3 distribution is random and whose upper levels are summed up.
RelationInstance random_instance(Rng& rng, const std::string& id);

}  // namespace idrr::testing
