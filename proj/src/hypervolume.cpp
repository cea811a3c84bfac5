#include "evosr/hypervolume.hpp"

#include <algorithm>
#include <vector>

namespace evosr {

double hypervolume_2d(std::span<const ObjectiveVector> points, double reference)
{
    std::vector<ObjectiveVector> pts;
    pts.reserve(points.size());
    for (const auto& p : points) {
        pts.push_back(ObjectiveVector{std::clamp(p.error, 0.0, reference), std::clamp(p.size_norm, 0.0, reference)});
    }
    std::sort(pts.begin(), pts.end(), [](const ObjectiveVector& a, const ObjectiveVector& b) {
        return a.error != b.error ? a.error < b.error : a.size_norm < b.size_norm;
    });

    // Staircase sweep: each point that lowers the size boundary adds a slab.
    double volume = 0.0;
    double boundary = reference;
    for (const auto& p : pts) {
        if (p.size_norm < boundary) {
            volume += (boundary - p.size_norm) * (reference - p.error);
            boundary = p.size_norm;
        }
    }
    return volume;
}

} // namespace evosr
