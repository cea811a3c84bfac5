#pragma once

#include "evosr/individual.hpp"

#include <span>

namespace evosr {

enum class AlphaSchedule { Linear, Cosine, Sigmoid, Adaptive };

struct AlphaState {
    double alpha = 0.0;
    AlphaSchedule schedule = AlphaSchedule::Linear;
    int generation = 0;
    int horizon = 1;
    double step = 0.01; // adaptive only
};

// linear t/T, cosine (1 - cos(pi t/T)) / 2, sigmoid 1 / (1 + exp(-10 (t/T - 0.5))),
// adaptive: the stored value. Clamped to [0, 1].
double alpha_value(const AlphaState& state);

// Moves alpha toward accuracy (+step) when more individuals count as small
// (size <= median size) than as accurate (error <= median error), else -step.
AlphaState alpha_adapt(AlphaState state, std::span<const Individual> population);

// (error, alpha * error + (1 - alpha) * size_norm), stored in the same fields.
constexpr ObjectiveVector alpha_transform(const ObjectiveVector& obj, double alpha) noexcept
{
    return ObjectiveVector{obj.error, alpha * obj.error + (1.0 - alpha) * obj.size_norm};
}

} // namespace evosr
