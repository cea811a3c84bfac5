#include "evosr/pareto.hpp"

#include <algorithm>
#include <numeric>

namespace evosr {

FrontPartition fast_non_dominated_sort(std::span<const ObjectiveVector> points)
{
    const std::size_t n = points.size();
    FrontPartition out;
    out.rank.assign(n, 0);
    if (n == 0) {
        return out;
    }

    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> dominator_count(n, 0);
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(points[p], points[q])) {
                dominated[p].push_back(q);
                ++dominator_count[q];
            } else if (dominates(points[q], points[p])) {
                dominated[q].push_back(p);
                ++dominator_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (dominator_count[p] == 0) {
            current.push_back(p);
        }
    }

    int rank = 1;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            out.rank[p] = rank;
            for (auto q : dominated[p]) {
                if (--dominator_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        out.fronts.push_back(std::move(current));
        current = std::move(next);
        ++rank;
    }
    return out;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> points, std::span<const std::size_t> front)
{
    const std::size_t m = front.size();
    std::vector<double> dist(m, 0.0);
    if (m <= 2) {
        std::fill(dist.begin(), dist.end(), kInfinity);
        return dist;
    }

    std::vector<std::size_t> order(m);
    for (int objective = 0; objective < 2; ++objective) {
        auto value = [&](std::size_t k) {
            const auto& p = points[front[k]];
            return objective == 0 ? p.error : p.size_norm;
        };
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });

        dist[order.front()] = kInfinity;
        dist[order.back()] = kInfinity;
        const double range = value(order.back()) - value(order.front());
        if (!(range > 0.0)) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < m; ++k) {
            dist[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / range;
        }
    }
    return dist;
}

std::vector<double> crowding_all(std::span<const ObjectiveVector> points, const FrontPartition& partition)
{
    std::vector<double> out(points.size(), 0.0);
    for (const auto& front : partition.fronts) {
        const auto d = crowding_distance(points, front);
        for (std::size_t k = 0; k < front.size(); ++k) {
            out[front[k]] = d[k];
        }
    }
    return out;
}

const Individual& tournament_compare(const Individual& a, const Individual& b, Rng& rng)
{
    if (a.rank != b.rank) {
        return a.rank < b.rank ? a : b;
    }
    if (a.crowding != b.crowding) {
        return a.crowding > b.crowding ? a : b;
    }
    return rng.bernoulli(0.5) ? a : b;
}

std::vector<std::size_t> priority_order(std::span<const int> rank, std::span<const double> crowding)
{
    std::vector<std::size_t> order(rank.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b]) {
            return rank[a] < rank[b];
        }
        return crowding[a] > crowding[b];
    });
    return order;
}

bool Archive::insert(const Individual& candidate)
{
    const auto& obj = candidate.objectives;
    std::string text;
    for (const auto& e : entries_) {
        if (dominates(e.objectives, obj)) {
            return false;
        }
        if (e.objectives == obj) {
            if (text.empty()) {
                text = to_string(candidate.tree);
            }
            if (e.text == text) {
                return false;
            }
        }
    }
    std::erase_if(entries_, [&](const ArchiveEntry& e) { return dominates(obj, e.objectives); });
    if (text.empty()) {
        text = to_string(candidate.tree);
    }
    entries_.push_back(ArchiveEntry{candidate.tree, std::move(text), obj, candidate.model});
    return true;
}

std::vector<ObjectiveVector> Archive::points() const
{
    std::vector<ObjectiveVector> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
        out.push_back(e.objectives);
    }
    return out;
}

} // namespace evosr
