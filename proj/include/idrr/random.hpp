#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace idrr {

// Platform-independent draws on top of std::mt19937_64, whose output sequence is fixed by the
// standard. The <random> distributions are not, so they are avoided wherever a result is
// persisted or compared across runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, 1) with 53 bits of resolution.
    double unit();
    // Uniform integer in [0, bound), rejection sampled.
    std::uint64_t below(std::uint64_t bound);
    double normal();
    // Index drawn proportionally to `weights` (need not be normalized).
    std::size_t categorical(std::span<const double> weights);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
// Mixes two values into a new seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace idrr
