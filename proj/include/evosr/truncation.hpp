#pragma once

#include "evosr/individual.hpp"
#include "evosr/pareto.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace evosr {

class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Per-size selection budgets. Sizes run 1..max_size.
class BoundTable {
public:
    BoundTable() = default;
    explicit BoundTable(std::vector<double> by_size) : bounds_(std::move(by_size)) {}

    // Same budget for every size in 1..max_size.
    static BoundTable uniform(int max_size, double bound);

    [[nodiscard]] int max_size() const noexcept { return static_cast<int>(bounds_.size()); }
    // 0 for sizes outside the table.
    [[nodiscard]] double operator[](int size) const noexcept
    {
        return size >= 1 && size <= max_size() ? bounds_[static_cast<std::size_t>(size - 1)] : 0.0;
    }
    [[nodiscard]] double sum() const noexcept;
    [[nodiscard]] const std::vector<double>& values() const noexcept { return bounds_; }

private:
    std::vector<double> bounds_;
};

// Evolvability ratios per parent size, before filling and normalizing.
struct SuccessRatios {
    int max_size = 0;
    double median_error = 0.0;
    std::vector<int> attempts;  // index s - 1
    std::vector<int> successes; // index s - 1
    std::vector<std::optional<double>> ratio;
};

// Median of the values; mean of the two middle values for even counts.
double median(std::vector<double> values);

// Attempts / successes per parent size: an offspring succeeds when its error
// is strictly below the median error of `parents`.
SuccessRatios success_ratios(std::span<const Individual> parents, std::span<const Individual> offspring);

// Interior gaps: linear interpolation between the nearest observed sizes.
// Gaps below the smallest or above the largest observed size copy it.
std::vector<double> fill_missing_sizes(const std::vector<std::optional<double>>& ratios);

// Rescales to sum to `total`; an all-zero table becomes uniform.
BoundTable normalize_bounds(const std::vector<double>& ratios, double total);

// success_ratios -> fill_missing_sizes -> normalize to |parents|.
BoundTable build_bounds(std::span<const Individual> parents, std::span<const Individual> offspring);

// Whole fronts in rank order, then the overflowing front by crowding.
// Returns `target` indices in priority order.
std::vector<std::size_t> nsga2_truncation(std::span<const int> rank, std::span<const double> crowding,
                                          std::size_t target);

// Bounded truncation over priority order: an individual of size s is taken
// while count[s] < bounds[s]. Short passes reset the counters and traverse
// again; a pass that adds nothing falls back to plain priority order.
// Returns `target` indices in priority order.
std::vector<std::size_t> evo_truncation(std::span<const int> rank, std::span<const double> crowding,
                                        std::span<const int> sizes, const BoundTable& bounds, std::size_t target);

// Duplicate trees keep one representative at its true rank; the rest move to
// a final front with rank (fronts + 1). Returns the adjusted partition.
struct DuplicateAdjustment {
    FrontPartition partition;
    std::vector<bool> demoted;
};
DuplicateAdjustment pd_rank_adjust(std::span<const ExpressionTree> trees, const FrontPartition& partition);

} // namespace evosr
