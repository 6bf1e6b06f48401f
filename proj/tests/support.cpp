#include "support.hpp"

#include <unistd.h>

#include <array>

#include "idrr/sense_hierarchy.hpp"

namespace idrr::testing {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& tag) {
    static Rng rng(fnv1a64(tag) ^ static_cast<std::uint64_t>(::getpid()));
    const fs::path dir = fs::temp_directory_path() / ("idrr-test-" + tag + "-" + std::to_string(rng.next() % 1000000007));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<RelationInstance> separable_corpus(std::size_t n, std::uint64_t seed, int filler_words) {
    const auto& h = SenseHierarchy::standard();
    static const char* filler[] = {"the", "market", "said", "river", "after", "year", "people", "report"};
    Rng rng(seed);
    std::vector<RelationInstance> out;
    const std::size_t n3 = h.size(Level::Three);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s3 = i % n3;
        const std::size_t s2 = h.parent_of(Level::Three, s3);
        const std::size_t s1 = h.parent_of(Level::Two, s2);
        const std::string key = "kw" + std::to_string(s3);
        std::string a = key, b = key + "x";
        for (int w = 0; w < filler_words; ++w) {
            a += std::string(" ") + filler[rng.below(8)];
            b += std::string(" ") + filler[rng.below(8)];
        }
        std::array<LabelDistribution, 3> dist{one_hot(Level::One, h.size(Level::One), s1),
                                              one_hot(Level::Two, h.size(Level::Two), s2),
                                              one_hot(Level::Three, n3, s3)};
        out.push_back(make_instance("syn" + std::to_string(i), a, b, "synthetic", "synthetic", dist));
    }
    return out;
}

std::vector<double> random_distribution(Rng& rng, std::size_t size, bool allow_zeros) {
    std::vector<double> v(size);
    double total = 0.0;
    for (auto& x : v) {
        x = (allow_zeros && rng.unit() < 0.33) ? 0.0 : rng.unit() + 1e-3;
        total += x;
    }
    if (total == 0.0) {
        v[rng.below(size)] = 1.0;
        return v;
    }
    for (auto& x : v) x /= total;
    return v;
}

RelationInstance random_instance(Rng& rng, const std::string& id) {
    const auto& h = SenseHierarchy::standard();
    const auto leaf = random_distribution(rng, h.size(Level::Three));
    std::array<LabelDistribution, 3> dist{LabelDistribution{Level::One, std::vector<double>(4, 0.0)},
                                          LabelDistribution{Level::Two, std::vector<double>(14, 0.0)},
                                          LabelDistribution{Level::Three, leaf}};
    for (std::size_t i = 0; i < leaf.size(); ++i) {
        const std::size_t p2 = h.parent_of(Level::Three, i);
        dist[1].values[p2] += leaf[i];
        dist[0].values[h.parent_of(Level::Two, p2)] += leaf[i];
    }
    return make_instance(id, "first argument " + id, "second argument " + id, "synthetic", "synthetic", dist);
}

}  // namespace idrr::testing
