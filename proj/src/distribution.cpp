#include "idrr/distribution.hpp"

#include <cmath>
#include <string>

#include "idrr/errors.hpp"

namespace idrr {

void validate_distribution(std::span<const double> values, double tolerance) {
    if (values.empty()) throw DataError("empty distribution");
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0 + tolerance) {
            throw DataError("distribution entry " + std::to_string(v) + " outside [0,1]");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) throw DataError("distribution sums to " + std::to_string(sum) + ", not 1");
}

void validate_distribution(const LabelDistribution& dist, const SenseHierarchy& hierarchy, double tolerance) {
    if (dist.size() != hierarchy.size(dist.level)) {
        throw LabelSpaceError("level-" + std::to_string(level_number(dist.level)) + " distribution has " +
                              std::to_string(dist.size()) + " entries, label space has " +
                              std::to_string(hierarchy.size(dist.level)));
    }
    validate_distribution(dist.values, tolerance);
}

std::size_t argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

std::size_t majority_label(const LabelDistribution& dist) { return argmax_lowest(dist.values); }

LabelDistribution one_hot(Level level, std::size_t size, std::size_t index) {
    LabelDistribution d{level, std::vector<double>(size, 0.0)};
    d.values.at(index) = 1.0;
    return d;
}

}  // namespace idrr
