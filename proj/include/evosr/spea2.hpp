#pragma once

#include "evosr/fitness.hpp"

#include <span>
#include <vector>

namespace evosr {

struct Spea2Fitness {
    std::vector<int> strength;   // individuals dominated
    std::vector<double> raw;     // sum of dominators' strengths
    std::vector<double> density; // 1 / (sigma_k + 2)
    std::vector<double> fitness; // raw + density; < 1 iff non-dominated
};

// k = floor(sqrt(n)); sigma_k is the Euclidean distance to the k-th nearest
// other point in objective space.
Spea2Fitness spea2_fitness(std::span<const ObjectiveVector> points);

// Non-dominated points first; over capacity they are truncated by repeated
// removal of the point with the lexicographically smallest sorted distance
// list, under capacity the best dominated points by fitness pad the set.
// Returns indices in ascending order.
std::vector<std::size_t> spea2_environmental_selection(std::span<const ObjectiveVector> points,
                                                       std::span<const double> fitness, std::size_t capacity);

} // namespace evosr
