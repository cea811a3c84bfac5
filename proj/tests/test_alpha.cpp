#include "evosr/alpha.hpp"

#include <doctest.h>

#include <cmath>

using namespace evosr;

namespace {

AlphaState at(AlphaSchedule s, int t, int horizon = 100)
{
    AlphaState st;
    st.schedule = s;
    st.generation = t;
    st.horizon = horizon;
    return st;
}

std::vector<Individual> population(const std::vector<std::pair<double, int>>& error_size)
{
    std::vector<Individual> pop;
    for (const auto& [e, s] : error_size) {
        Individual ind;
        auto t = ExpressionTree::variable(0);
        while (t.size() < s) t = ExpressionTree::unary(Op::ProtLog, t);
        ind.tree = t;
        ind.objectives = {e, s / 100.0};
        ind.evaluated = true;
        pop.push_back(ind);
    }
    return pop;
}

} // namespace

TEST_SUITE("alpha")
{
    TEST_CASE("schedules")
    {
        CHECK(alpha_value(at(AlphaSchedule::Linear, 0)) == 0.0);
        CHECK(alpha_value(at(AlphaSchedule::Linear, 100)) == 1.0);
        CHECK(alpha_value(at(AlphaSchedule::Linear, 25)) == doctest::Approx(0.25));
        CHECK(alpha_value(at(AlphaSchedule::Cosine, 50)) == doctest::Approx(0.5));
        CHECK(alpha_value(at(AlphaSchedule::Cosine, 0)) == doctest::Approx(0.0));
        CHECK(alpha_value(at(AlphaSchedule::Cosine, 100)) == doctest::Approx(1.0));
        CHECK(alpha_value(at(AlphaSchedule::Sigmoid, 50)) == doctest::Approx(0.5));
        CHECK(alpha_value(at(AlphaSchedule::Sigmoid, 100)) == doctest::Approx(1.0 / (1.0 + std::exp(-5.0))));
        auto adaptive = at(AlphaSchedule::Adaptive, 10);
        adaptive.alpha = 0.37;
        CHECK(alpha_value(adaptive) == 0.37);
    }

    TEST_CASE("schedules stay in [0, 1] and are monotone")
    {
        for (auto s : {AlphaSchedule::Linear, AlphaSchedule::Cosine, AlphaSchedule::Sigmoid}) {
            double prev = -1.0;
            for (int t = 0; t <= 40; ++t) {
                const double a = alpha_value(at(s, t, 40));
                CHECK(a >= 0.0);
                CHECK(a <= 1.0);
                CHECK(a >= prev);
                prev = a;
            }
        }
    }

    TEST_CASE("adaptive rule")
    {
        // Tiny and inaccurate: sizes all 1 (all small), errors spread (half accurate).
        auto st = at(AlphaSchedule::Adaptive, 1);
        st.alpha = 0.5;
        const auto tiny = population({{0.9, 1}, {0.8, 1}, {0.95, 1}, {0.85, 1}});
        CHECK(alpha_adapt(st, tiny).alpha == doctest::Approx(0.51));

        // Balanced counts: strict rule lowers alpha.
        const auto balanced = population({{0.1, 1}, {0.2, 2}, {0.3, 3}, {0.4, 4}});
        CHECK(alpha_adapt(st, balanced).alpha == doctest::Approx(0.49));

        st.alpha = 1.0;
        CHECK(alpha_adapt(st, tiny).alpha == 1.0);
        st.alpha = 0.0;
        CHECK(alpha_adapt(st, balanced).alpha == 0.0);
    }

    TEST_CASE("transform")
    {
        CHECK(alpha_transform({0.2, 0.6}, 0.0) == ObjectiveVector{0.2, 0.6});
        CHECK(alpha_transform({0.2, 0.6}, 1.0) == ObjectiveVector{0.2, 0.2});
        const auto half = alpha_transform({0.2, 0.6}, 0.5);
        CHECK(half.error == 0.2);
        CHECK(half.size_norm == doctest::Approx(0.4));
    }
}
