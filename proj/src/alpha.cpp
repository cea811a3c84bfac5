#include "evosr/alpha.hpp"

#include "evosr/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace evosr {

double alpha_value(const AlphaState& state)
{
    const double t = state.horizon > 0 ? static_cast<double>(state.generation) / state.horizon : 1.0;
    double a = 0.0;
    switch (state.schedule) {
    case AlphaSchedule::Linear:
        a = t;
        break;
    case AlphaSchedule::Cosine:
        a = 0.5 * (1.0 - std::cos(std::numbers::pi * t));
        break;
    case AlphaSchedule::Sigmoid:
        a = 1.0 / (1.0 + std::exp(-10.0 * (t - 0.5)));
        break;
    case AlphaSchedule::Adaptive:
        a = state.alpha;
        break;
    }
    return std::clamp(a, 0.0, 1.0);
}

AlphaState alpha_adapt(AlphaState state, std::span<const Individual> population)
{
    if (population.empty()) {
        return state;
    }
    std::vector<double> sizes;
    std::vector<double> errors;
    for (const auto& ind : population) {
        sizes.push_back(ind.size());
        errors.push_back(ind.error());
    }
    const double size_median = median(sizes);
    const double error_median = median(errors);
    std::size_t small = 0;
    std::size_t accurate = 0;
    for (const auto& ind : population) {
        small += ind.size() <= size_median ? 1U : 0U;
        accurate += ind.error() <= error_median ? 1U : 0U;
    }
    state.alpha = std::clamp(state.alpha + (small > accurate ? state.step : -state.step), 0.0, 1.0);
    return state;
}

} // namespace evosr
