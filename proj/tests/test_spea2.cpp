#include "evosr/pareto.hpp"
#include "evosr/spea2.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace evosr;

namespace {

// Iteratively drop the individual with the lexicographically smallest sorted
// distance list; among identical lists the highest index goes first.
std::vector<std::size_t> truncation_oracle(const std::vector<ObjectiveVector>& pts, std::vector<std::size_t> keep,
                                           std::size_t capacity)
{
    while (keep.size() > capacity) {
        std::vector<std::vector<double>> lists;
        for (auto i : keep) {
            std::vector<double> d;
            for (auto j : keep) {
                if (i != j) d.push_back(std::hypot(pts[i].error - pts[j].error, pts[i].size_norm - pts[j].size_norm));
            }
            std::sort(d.begin(), d.end());
            lists.push_back(d);
        }
        std::size_t victim = 0;
        for (std::size_t a = 1; a < keep.size(); ++a) {
            if (lists[a] < lists[victim] || (lists[a] == lists[victim] && pts[keep[a]] == pts[keep[victim]])) {
                victim = a;
            }
        }
        keep.erase(keep.begin() + long(victim));
    }
    return keep;
}

} // namespace

TEST_SUITE("spea2")
{
    const std::vector<ObjectiveVector> toy{{0.1, 0.5}, {0.2, 0.3}, {0.3, 0.4}, {0.4, 0.1}, {0.5, 0.5}};

    TEST_CASE("five-point fitness table")
    {
        const auto f = spea2_fitness(toy);
        CHECK(f.strength == std::vector<int>{1, 2, 1, 1, 0});
        CHECK(f.raw == std::vector<double>{0, 0, 2, 0, 5});
        const std::vector<double> density{0.44971979803797996, 0.44971979803797996, 0.44971979803797996,
                                          0.43173647025209283, 0.42362916600868245};
        for (std::size_t i = 0; i < toy.size(); ++i) {
            CHECK(f.density[i] == doctest::Approx(density[i]).epsilon(1e-12));
            CHECK(f.fitness[i] == doctest::Approx(f.raw[i] + density[i]).epsilon(1e-12));
        }
    }

    TEST_CASE("non-dominated points have fitness below one")
    {
        Rng rng(3);
        for (int k = 0; k < 50; ++k) {
            std::vector<ObjectiveVector> pts;
            for (int i = 0; i < 30; ++i) pts.push_back({rng.uniform(), rng.uniform_int(1, 20) / 100.0});
            const auto f = spea2_fitness(pts);
            const auto rank = fast_non_dominated_sort(pts).rank;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                CHECK((f.fitness[i] < 1.0) == (rank[i] == 1));
                // Strength counts exactly the dominated points.
                int s = 0;
                for (const auto& q : pts) s += dominates(pts[i], q) ? 1 : 0;
                CHECK(f.strength[i] == s);
            }
        }
    }

    TEST_CASE("selection pads with the best dominated points")
    {
        const auto f = spea2_fitness(toy);
        const auto sel = spea2_environmental_selection(toy, f.fitness, 4);
        CHECK(sel == std::vector<std::size_t>{0, 1, 2, 3});
        const auto exact = spea2_environmental_selection(toy, f.fitness, 3);
        CHECK(exact == std::vector<std::size_t>{0, 1, 3});
    }

    TEST_CASE("truncation matches iterative nearest-neighbour removal")
    {
        Rng rng(17);
        for (int k = 0; k < 60; ++k) {
            // A random non-dominated front, with some exact duplicates.
            std::vector<ObjectiveVector> pts;
            for (int i = 0; i < 25; ++i) {
                const double e = rng.uniform();
                pts.push_back({e, std::pow(1.0 - e, 1.0 + rng.uniform())});
            }
            std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.error < b.error; });
            for (std::size_t i = 1; i < pts.size(); ++i) pts[i].size_norm = std::min(pts[i].size_norm, pts[i - 1].size_norm);
            for (int d = 0; d < 5; ++d) pts.push_back(pts[rng.index(pts.size())]);
            std::shuffle(pts.begin(), pts.end(), rng);

            const auto f = spea2_fitness(pts);
            std::vector<std::size_t> front;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (f.fitness[i] < 1.0) front.push_back(i);
            }
            const std::size_t capacity = 5 + rng.index(15);
            if (front.size() <= capacity) continue;
            CHECK(spea2_environmental_selection(pts, f.fitness, capacity) == truncation_oracle(pts, front, capacity));
        }
    }
}
