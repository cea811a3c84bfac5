#pragma once

#include "evosr/expr.hpp"
#include "evosr/fitness.hpp"

#include <limits>
#include <optional>

namespace evosr {

enum class Origin : std::uint8_t { Initial, Crossover, Mutation };

struct Individual {
    ExpressionTree tree;
    ObjectiveVector objectives;
    ScaledModel model;
    bool evaluated = false;
    // Size of the recipient parent at variation time; empty for the initial population.
    std::optional<int> parent_size;
    Origin origin = Origin::Initial;
    // Variation overshot the size cap and the recipient parent was copied.
    bool cloned = false;
    int rank = 0;
    double crowding = 0.0;

    [[nodiscard]] int size() const noexcept { return tree.size(); }
    [[nodiscard]] double error() const noexcept { return objectives.error; }
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Fills objectives and model unless already cached.
inline void evaluate(Individual& ind, const Partition& train)
{
    if (ind.evaluated) {
        return;
    }
    const auto e = evaluate_objectives(ind.tree, train);
    ind.objectives = e.objectives;
    ind.model = e.model;
    ind.evaluated = true;
}

} // namespace evosr
