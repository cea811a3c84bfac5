#include "evosr/spea2.hpp"

#include "evosr/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace evosr {

namespace {

double distance(const ObjectiveVector& a, const ObjectiveVector& b)
{
    return std::hypot(a.error - b.error, a.size_norm - b.size_norm);
}

// Points sharing one objective vector. Distances between members are 0, so
// every member sees the same sorted distance list and groups can stand in
// for individuals.
struct Groups {
    std::vector<ObjectiveVector> value;
    std::vector<std::vector<std::size_t>> members; // ascending input index
    std::vector<std::size_t> group_of;             // per input index
};

Groups group_points(std::span<const ObjectiveVector> points, std::span<const std::size_t> subset)
{
    Groups g;
    std::map<std::pair<double, double>, std::size_t> lookup;
    g.group_of.assign(points.size(), 0);
    for (auto i : subset) {
        const auto key = std::make_pair(points[i].error, points[i].size_norm);
        auto [it, fresh] = lookup.emplace(key, g.value.size());
        if (fresh) {
            g.value.push_back(points[i]);
            g.members.emplace_back();
        }
        g.members[it->second].push_back(i);
        g.group_of[i] = it->second;
    }
    return g;
}

// Other groups ordered by distance from each group.
std::vector<std::vector<std::pair<double, std::size_t>>> neighbour_order(const Groups& g)
{
    const std::size_t n = g.value.size();
    std::vector<std::vector<std::pair<double, std::size_t>>> out(n);
    for (std::size_t a = 0; a < n; ++a) {
        out[a].reserve(n - 1);
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b) {
                out[a].emplace_back(distance(g.value[a], g.value[b]), b);
            }
        }
        std::sort(out[a].begin(), out[a].end());
    }
    return out;
}

} // namespace

Spea2Fitness spea2_fitness(std::span<const ObjectiveVector> points)
{
    const std::size_t n = points.size();
    Spea2Fitness f;
    f.strength.assign(n, 0);
    f.raw.assign(n, 0.0);
    f.density.assign(n, 0.0);
    f.fitness.assign(n, 0.0);
    if (n == 0) {
        return f;
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (dominates(points[i], points[j])) {
                ++f.strength[i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (dominates(points[j], points[i])) {
                f.raw[i] += f.strength[j];
            }
        }
    }

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto groups = group_points(points, all);
    const auto order = neighbour_order(groups);
    const auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    for (std::size_t gi = 0; gi < groups.value.size(); ++gi) {
        // k-th entry of the sorted distance list to the other n - 1 points.
        double sigma = 0.0;
        const std::size_t zeros = groups.members[gi].size() - 1;
        if (k > zeros && n > 1) {
            std::size_t seen = zeros;
            const std::size_t want = std::min(k, n - 1);
            for (const auto& [d, other] : order[gi]) {
                seen += groups.members[other].size();
                sigma = d;
                if (seen >= want) {
                    break;
                }
            }
        }
        for (auto i : groups.members[gi]) {
            f.density[i] = 1.0 / (sigma + 2.0);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        f.fitness[i] = f.raw[i] + f.density[i];
    }
    return f;
}

std::vector<std::size_t> spea2_environmental_selection(std::span<const ObjectiveVector> points,
                                                       std::span<const double> fitness, std::size_t capacity)
{
    const std::size_t n = points.size();
    std::vector<std::size_t> selected;
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
        (fitness[i] < 1.0 ? selected : rest).push_back(i);
    }

    if (selected.size() < capacity) {
        std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
        const std::size_t missing = std::min(capacity - selected.size(), rest.size());
        selected.insert(selected.end(), rest.begin(), rest.begin() + static_cast<long>(missing));
        std::sort(selected.begin(), selected.end());
        return selected;
    }
    if (selected.size() == capacity) {
        return selected;
    }

    auto groups = group_points(points, selected);
    const auto order = neighbour_order(groups);
    std::vector<std::size_t> count(groups.value.size());
    for (std::size_t g = 0; g < count.size(); ++g) {
        count[g] = groups.members[g].size();
    }

    // Sorted distance list of a member of group g, as (value, multiplicity) runs.
    auto runs_of = [&](std::size_t g, std::vector<std::pair<double, std::size_t>>& runs) {
        runs.clear();
        if (count[g] > 1) {
            runs.emplace_back(0.0, count[g] - 1);
        }
        for (const auto& [d, other] : order[g]) {
            if (count[other] > 0) {
                runs.emplace_back(d, count[other]);
            }
        }
    };
    // -1 / 0 / +1 lexicographic comparison of the expanded sequences.
    auto compare = [](const std::vector<std::pair<double, std::size_t>>& a,
                      const std::vector<std::pair<double, std::size_t>>& b) {
        std::size_t ia = 0;
        std::size_t ib = 0;
        std::size_t left_a = a.empty() ? 0 : a[0].second;
        std::size_t left_b = b.empty() ? 0 : b[0].second;
        while (ia < a.size() && ib < b.size()) {
            if (a[ia].first != b[ib].first) {
                return a[ia].first < b[ib].first ? -1 : 1;
            }
            const std::size_t step = std::min(left_a, left_b);
            left_a -= step;
            left_b -= step;
            if (left_a == 0 && ++ia < a.size()) {
                left_a = a[ia].second;
            }
            if (left_b == 0 && ++ib < b.size()) {
                left_b = b[ib].second;
            }
        }
        return 0;
    };

    std::size_t remaining = selected.size();
    std::vector<std::pair<double, std::size_t>> best_runs;
    std::vector<std::pair<double, std::size_t>> runs;
    while (remaining > capacity) {
        std::size_t best = count.size();
        for (std::size_t g = 0; g < count.size(); ++g) {
            if (count[g] == 0) {
                continue;
            }
            runs_of(g, runs);
            if (best == count.size() || compare(runs, best_runs) < 0) {
                best = g;
                std::swap(best_runs, runs);
            }
        }
        // Drop the member with the largest input index.
        --count[best];
        --remaining;
    }

    std::vector<std::size_t> out;
    out.reserve(capacity);
    for (std::size_t g = 0; g < count.size(); ++g) {
        out.insert(out.end(), groups.members[g].begin(), groups.members[g].begin() + static_cast<long>(count[g]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace evosr
