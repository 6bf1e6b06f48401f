#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "idrr/sense_hierarchy.hpp"

namespace idrr {

inline constexpr double kDistributionTolerance = 1e-9;

// Probability vector over one level's senses, indexed in canonical order.
struct LabelDistribution {
    Level level = Level::One;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    bool operator==(const LabelDistribution&) const = default;
};

// Throws DataError unless entries are in [0,1] and sum to 1 within `tolerance`.
void validate_distribution(std::span<const double> values, double tolerance = kDistributionTolerance);
void validate_distribution(const LabelDistribution& dist, const SenseHierarchy& hierarchy,
                           double tolerance = kDistributionTolerance);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_lowest(std::span<const double> values);

// Majority label of a distribution (argmax with lowest-index tie-break).
std::size_t majority_label(const LabelDistribution& dist);

LabelDistribution one_hot(Level level, std::size_t size, std::size_t index);

}  // namespace idrr
