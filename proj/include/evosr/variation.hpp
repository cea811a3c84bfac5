#pragma once

#include "evosr/individual.hpp"
#include "evosr/rng.hpp"

#include <functional>
#include <span>
#include <vector>

namespace evosr {

// Function set {+, -, *, /*, sqrt*, log*}; terminals x0..x(d-1) and ERCs.
class PrimitiveSet {
public:
    // ERCs are drawn from U(-5, 5) * erc_scale.
    PrimitiveSet(std::size_t num_features, double erc_scale);

    // From the largest absolute standardized training feature value.
    static PrimitiveSet for_features(const Matrix& standardized_train);

    [[nodiscard]] std::size_t num_features() const noexcept { return num_features_; }
    [[nodiscard]] double erc_scale() const noexcept { return erc_scale_; }

    Node random_function(Rng& rng) const;
    // Uniform over the d variables plus one ERC slot.
    Node random_terminal(Rng& rng) const;

    // Depth counts edges, so full(2) with binary draws has 7 nodes.
    ExpressionTree full(int depth, Rng& rng) const;
    ExpressionTree grow(int depth, Rng& rng) const;

private:
    void build(std::vector<Node>& out, int depth, bool full, Rng& rng) const;

    std::size_t num_features_;
    double erc_scale_;
};

struct VariationLimits {
    int max_size = kMaxTreeSize;
    int min_depth = 2;
    int max_depth = 6;
};

// Depths cycle over min..max; each depth alternates full and grow. Trees
// larger than limits.max_size are redrawn.
std::vector<Individual> ramped_half_and_half(std::size_t count, const PrimitiveSet& primitives, Rng& rng,
                                             const VariationLimits& limits = {});

// Copy of `parent` with a uniformly chosen subtree replaced by a uniformly
// chosen subtree of `donor`. Oversized results become a clone of `parent`.
Individual subtree_crossover(const Individual& parent, const Individual& donor, Rng& rng,
                             const VariationLimits& limits = {});

// Replaces a uniformly chosen subtree with grow(U{min_depth..max_depth}).
Individual subtree_mutation(const Individual& parent, const PrimitiveSet& primitives, Rng& rng,
                            const VariationLimits& limits = {});

// Picks a parent from the population with the given random stream.
using ParentSelector = std::function<const Individual&(Rng&)>;

// k-way tournament on (rank, crowding); k = 1 is uniform random choice.
ParentSelector tournament_selector(std::span<const Individual> pop, int tournament_size);

// `count` offspring; offspring i draws from its own stream derive_seed(stream_seed, "offspring", i).
std::vector<Individual> make_offspring_population(const ParentSelector& select, std::size_t count,
                                                  double crossover_prob, const PrimitiveSet& primitives,
                                                  std::uint64_t stream_seed, const VariationLimits& limits = {});

} // namespace evosr
