#pragma once

#include "evosr/fitness.hpp"

#include <span>

namespace evosr {

// Exact 2-D hypervolume of minimized points against (reference, reference).
// Coordinates are clamped into [0, reference] first, so points outside the
// box contribute nothing.
double hypervolume_2d(std::span<const ObjectiveVector> points, double reference = kReferenceCoordinate);

} // namespace evosr
