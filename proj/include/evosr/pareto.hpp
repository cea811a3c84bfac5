#pragma once

#include "evosr/individual.hpp"
#include "evosr/rng.hpp"

#include <span>
#include <string>
#include <vector>

namespace evosr {

// Both coordinates minimized.
constexpr bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept
{
    return a.error <= b.error && a.size_norm <= b.size_norm && (a.error < b.error || a.size_norm < b.size_norm);
}

struct FrontPartition {
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<int> rank; // 1-based, per input index

    [[nodiscard]] std::size_t count() const noexcept { return fronts.size(); }
};

FrontPartition fast_non_dominated_sort(std::span<const ObjectiveVector> points);

// Crowding distance for the members of one front (indices into `points`),
// returned in the order of `front`. Extremes per objective get infinity;
// ties are broken by position in `front`.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> points, std::span<const std::size_t> front);

// Crowding for every index of every front, laid out per input index.
std::vector<double> crowding_all(std::span<const ObjectiveVector> points, const FrontPartition& partition);

// Lower rank wins, then larger crowding, then a fair coin.
const Individual& tournament_compare(const Individual& a, const Individual& b, Rng& rng);

// Indices sorted by (rank asc, crowding desc, index asc).
std::vector<std::size_t> priority_order(std::span<const int> rank, std::span<const double> crowding);

struct ArchiveEntry {
    ExpressionTree tree;
    std::string text;
    ObjectiveVector objectives;
    ScaledModel model;
    double test_error = 0.0; // filled by the owner after insertion
};

// Best-ever non-dominated set of one run, on training objectives.
class Archive {
public:
    // True when the candidate was added.
    bool insert(const Individual& candidate);

    // The most recently added entry.
    ArchiveEntry& newest() { return entries_.back(); }

    [[nodiscard]] const std::vector<ArchiveEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::vector<ObjectiveVector> points() const;

private:
    std::vector<ArchiveEntry> entries_;
};

} // namespace evosr
