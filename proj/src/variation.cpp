#include "evosr/variation.hpp"

#include "evosr/pareto.hpp"

#include <algorithm>
#include <cmath>

namespace evosr {

namespace {
constexpr Op kFunctions[] = {Op::Add, Op::Sub, Op::Mul, Op::ProtDiv, Op::ProtSqrt, Op::ProtLog};
constexpr int kMaxRedraws = 1000;
} // namespace

PrimitiveSet::PrimitiveSet(std::size_t num_features, double erc_scale)
    : num_features_(num_features), erc_scale_(erc_scale)
{
}

PrimitiveSet PrimitiveSet::for_features(const Matrix& standardized_train)
{
    double largest = 0.0;
    for (std::size_t c = 0; c < standardized_train.cols(); ++c) {
        for (double v : standardized_train.column(c)) {
            largest = std::max(largest, std::abs(v));
        }
    }
    return PrimitiveSet(standardized_train.cols(), largest);
}

Node PrimitiveSet::random_function(Rng& rng) const
{
    return Node{kFunctions[rng.index(std::size(kFunctions))], 0, 0.0};
}

Node PrimitiveSet::random_terminal(Rng& rng) const
{
    const std::size_t pick = rng.index(num_features_ + 1);
    if (pick < num_features_) {
        return Node{Op::Variable, static_cast<std::uint32_t>(pick), 0.0};
    }
    return Node{Op::Constant, 0, quantize_constant(rng.uniform(-5.0, 5.0) * erc_scale_)};
}

void PrimitiveSet::build(std::vector<Node>& out, int depth, bool full, Rng& rng) const
{
    const bool function = depth > 0 && (full || rng.bernoulli(0.5));
    if (!function) {
        out.push_back(random_terminal(rng));
        return;
    }
    const Node f = random_function(rng);
    out.push_back(f);
    for (int k = 0; k < arity(f.op); ++k) {
        build(out, depth - 1, full, rng);
    }
}

ExpressionTree PrimitiveSet::full(int depth, Rng& rng) const
{
    std::vector<Node> nodes;
    build(nodes, depth, true, rng);
    return ExpressionTree(std::move(nodes));
}

ExpressionTree PrimitiveSet::grow(int depth, Rng& rng) const
{
    std::vector<Node> nodes;
    build(nodes, depth, false, rng);
    return ExpressionTree(std::move(nodes));
}

std::vector<Individual> ramped_half_and_half(std::size_t count, const PrimitiveSet& primitives, Rng& rng,
                                             const VariationLimits& limits)
{
    const int levels = limits.max_depth - limits.min_depth + 1;
    std::vector<Individual> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Pairs (full, grow) per depth: 0,1 -> min_depth; 2,3 -> min_depth + 1; ...
        const int depth = limits.min_depth + static_cast<int>((i / 2) % static_cast<std::size_t>(levels));
        const bool use_full = i % 2 == 0;
        ExpressionTree tree;
        int attempt = 0;
        do {
            // Shrink the depth if redraws keep overshooting a small cap.
            const int d = std::max(0, depth - attempt / 10);
            tree = use_full ? primitives.full(d, rng) : primitives.grow(d, rng);
            ++attempt;
        } while (tree.size() > limits.max_size && attempt < kMaxRedraws);
        if (tree.size() > limits.max_size) {
            tree = ExpressionTree({primitives.random_terminal(rng)});
        }
        Individual ind;
        ind.tree = std::move(tree);
        out.push_back(std::move(ind));
    }
    return out;
}

namespace {

Individual clone_of(const Individual& parent, Origin origin)
{
    Individual child = parent;
    child.parent_size = parent.size();
    child.origin = origin;
    child.cloned = true;
    child.rank = 0;
    child.crowding = 0.0;
    return child;
}

Individual offspring_with(ExpressionTree tree, const Individual& parent, Origin origin)
{
    Individual child;
    child.tree = std::move(tree);
    child.parent_size = parent.size();
    child.origin = origin;
    return child;
}

} // namespace

Individual subtree_crossover(const Individual& parent, const Individual& donor, Rng& rng, const VariationLimits& limits)
{
    const std::size_t at = random_subtree_locator(parent.tree, rng);
    const std::size_t from = random_subtree_locator(donor.tree, rng);
    const int new_size = parent.size() - parent.tree.subtree_size(at) + donor.tree.subtree_size(from);
    if (new_size > limits.max_size) {
        return clone_of(parent, Origin::Crossover);
    }
    return offspring_with(parent.tree.replace_subtree(at, donor.tree.subtree(from)), parent, Origin::Crossover);
}

Individual subtree_mutation(const Individual& parent, const PrimitiveSet& primitives, Rng& rng,
                            const VariationLimits& limits)
{
    const std::size_t at = random_subtree_locator(parent.tree, rng);
    const int depth = rng.uniform_int(limits.min_depth, limits.max_depth);
    const ExpressionTree fresh = primitives.grow(depth, rng);
    const int new_size = parent.size() - parent.tree.subtree_size(at) + fresh.size();
    if (new_size > limits.max_size) {
        return clone_of(parent, Origin::Mutation);
    }
    return offspring_with(parent.tree.replace_subtree(at, fresh), parent, Origin::Mutation);
}

ParentSelector tournament_selector(std::span<const Individual> pop, int tournament_size)
{
    return [pop, k = std::max(1, tournament_size)](Rng& rng) -> const Individual& {
        const Individual* best = &pop[rng.index(pop.size())];
        for (int i = 1; i < k; ++i) {
            best = &tournament_compare(*best, pop[rng.index(pop.size())], rng);
        }
        return *best;
    };
}

std::vector<Individual> make_offspring_population(const ParentSelector& select, std::size_t count,
                                                  double crossover_prob, const PrimitiveSet& primitives,
                                                  std::uint64_t stream_seed, const VariationLimits& limits)
{
    std::vector<Individual> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(stream_seed, "offspring", i));
        if (rng.bernoulli(crossover_prob)) {
            const Individual& parent = select(rng);
            const Individual& donor = select(rng);
            out.push_back(subtree_crossover(parent, donor, rng, limits));
        } else {
            out.push_back(subtree_mutation(select(rng), primitives, rng, limits));
        }
    }
    return out;
}

} // namespace evosr
