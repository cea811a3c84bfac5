#include "evosr/stats.hpp"
#include "evosr/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace evosr;

namespace {

double u_of(std::span<const double> a, std::span<const double> b)
{
    double u = 0.0;
    for (double x : a) {
        for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    }
    return u;
}

// Every way of assigning |a| of the pooled values to the first sample.
ExactTails enumerate_tails(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const double observed = u_of(a, b);
    const std::size_t n = pooled.size();
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + long(a.size()), true);
    double total = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    do {
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 0; i < n; ++i) (pick[i] ? x : y).push_back(pooled[i]);
        const double u = u_of(x, y);
        total += 1.0;
        lower += u <= observed + 1e-9 ? 1.0 : 0.0;
        upper += u >= observed - 1e-9 ? 1.0 : 0.0;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return {lower / total, upper / total};
}

} // namespace

TEST_SUITE("stats")
{
    TEST_CASE("U statistic examples")
    {
        const std::vector<double> a{1, 2};
        const std::vector<double> b{3, 4};
        CHECK(mann_whitney_u(a, b).u_statistic == 0.0);

        const std::vector<double> a3{1, 2, 3};
        const std::vector<double> b3{4, 5, 6};
        const auto less = mann_whitney_u(a3, b3, Alternative::Less);
        CHECK(less.u_statistic == 0.0);
        CHECK(less.p_value == doctest::Approx(0.05));

        const auto same = mann_whitney_u(a3, a3);
        CHECK(same.p_value == doctest::Approx(1.0));
        CHECK_FALSE(same.significant);
    }

    TEST_CASE("exact values match the reference statistics package")
    {
        struct Case {
            std::vector<double> a, b;
            double u, two, greater, less;
        };
        const std::vector<Case> cases{
            {{1, 2, 3}, {4, 5, 6}, 0.0, 0.1, 1.0, 0.05},
            {{0.3, 0.9, 0.1, 0.5}, {0.2, 0.8, 0.7}, 5.0, 0.8571428571428571, 0.6857142857142857, 0.42857142857142855},
            {{5.1, 4.2, 6.3, 7.4, 3.5, 2.6, 8.7},
             {1.8, 2.9, 3.1, 4.4, 5.5, 6.6, 0.7},
             35.0,
             0.20862470862470864,
             0.10431235431235432,
             0.9175407925407926},
        };
        for (const auto& c : cases) {
            CHECK(mann_whitney_u(c.a, c.b).u_statistic == c.u);
            CHECK(mann_whitney_u(c.a, c.b).p_value == doctest::Approx(c.two).epsilon(1e-12));
            CHECK(mann_whitney_u(c.a, c.b, Alternative::Greater).p_value == doctest::Approx(c.greater).epsilon(1e-12));
            CHECK(mann_whitney_u(c.a, c.b, Alternative::Less).p_value == doctest::Approx(c.less).epsilon(1e-12));
        }
    }

    TEST_CASE("normal approximation matches the reference statistics package")
    {
        const std::vector<double> a{0.80, 0.79, 0.82, 0.81, 0.80, 0.78, 0.83, 0.80, 0.79, 0.81};
        const std::vector<double> b{0.65, 0.66, 0.64, 0.80, 0.63, 0.67, 0.66, 0.62, 0.65, 0.64};
        CHECK(mann_whitney_u(a, b).u_statistic == 95.5);
        CHECK(mann_whitney_u(a, b).p_value == doctest::Approx(0.0006238526187973427).epsilon(1e-9));
        CHECK(mann_whitney_u(a, b, Alternative::Greater).p_value == doctest::Approx(0.00031192630939867136).epsilon(1e-9));
        CHECK(mann_whitney_u(a, b, Alternative::Less).p_value == doctest::Approx(0.9997647825327739).epsilon(1e-9));

        const std::vector<double> c{1, 2, 2, 3, 3, 3, 4, 4, 5, 6, 7};
        const std::vector<double> d{2, 3, 3, 4, 5, 5, 6, 6, 7, 8, 9, 9};
        CHECK(mann_whitney_u(c, d).u_statistic == 34.5);
        CHECK(mann_whitney_u(c, d).p_value == doctest::Approx(0.054093809239012414).epsilon(1e-9));
        CHECK(mann_whitney_u(c, d, Alternative::Greater).p_value == doctest::Approx(0.9766061177807909).epsilon(1e-9));
        CHECK(mann_whitney_u(c, d, Alternative::Less).p_value == doctest::Approx(0.027046904619506207).epsilon(1e-9));
    }

    TEST_CASE("exact tails equal brute-force enumeration, ties included")
    {
        Rng rng(7);
        for (std::size_t n = 1; n <= 5; ++n) {
            for (std::size_t m = 1; m <= 5; ++m) {
                for (int rep = 0; rep < 3; ++rep) {
                    std::vector<double> a(n);
                    std::vector<double> b(m);
                    for (auto& v : a) v = rng.uniform_int(0, 4);
                    for (auto& v : b) v = rng.uniform_int(0, 4);
                    const auto got = mann_whitney_exact_tails(a, b);
                    const auto want = enumerate_tails(a, b);
                    CHECK(got.lower == doctest::Approx(want.lower).epsilon(1e-12));
                    CHECK(got.upper == doctest::Approx(want.upper).epsilon(1e-12));
                }
            }
        }
    }

    TEST_CASE("U_a + U_b = n m without ties")
    {
        Rng rng(9);
        for (int k = 0; k < 100; ++k) {
            std::vector<double> a(1 + rng.index(12));
            std::vector<double> b(1 + rng.index(12));
            for (auto& v : a) v = rng.uniform();
            for (auto& v : b) v = rng.uniform();
            CHECK(mann_whitney_u(a, b).u_statistic + mann_whitney_u(b, a).u_statistic == double(a.size() * b.size()));
        }
    }

    TEST_CASE("bonferroni")
    {
        std::vector<double> ten(10, 0.5);
        ten[3] = 0.004;
        const auto r = bonferroni(ten);
        for (const auto& t : r) CHECK(t.adjusted_threshold == 0.005);
        CHECK(r[3].significant);
        CHECK_FALSE(r[0].significant);
        const std::vector<double> one{0.04};
        CHECK(bonferroni(one)[0].adjusted_threshold == 0.05);
        CHECK(bonferroni(one)[0].significant);
    }

    TEST_CASE("summaries and marks")
    {
        const auto s = summarize(std::vector<double>{1, 2, 3, 4});
        CHECK(s.mean == 2.5);
        CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));

        std::vector<double> ref;
        std::vector<double> low;
        Rng rng(1);
        for (int i = 0; i < 30; ++i) {
            ref.push_back(0.8 + rng.normal(0, 0.02));
            low.push_back(0.65 + rng.normal(0, 0.03));
        }
        const std::vector<AlgorithmSamples> samples{{"evonsga2", ref}, {"nsga2", low}, {"copy", ref}};
        const auto cells = summarize_runs(samples, "evonsga2", 0.05, 10);
        REQUIRE(cells.size() == 3);
        CHECK(cells[0].mark == ' ');
        CHECK(cells[1].mark == '+');
        CHECK(cells[2].mark == '=');
        CHECK(cells[1].test.adjusted_threshold == doctest::Approx(0.005));

        const std::vector<AlgorithmSamples> flipped{{"nsga2", low}, {"evonsga2", ref}};
        CHECK(summarize_runs(flipped, "nsga2")[1].mark == '-');

        ComparisonCell cell{"x", {0.799, 0.021}, '-', {}};
        CHECK(format_cell(cell) == "0.799(0.021)-");
    }

    TEST_CASE("average configuration")
    {
        // Three configurations over four datasets; the middle one is average.
        const std::vector<std::vector<double>> hv{
            {0.9, 0.8, 0.95, 0.7},
            {0.5, 0.6, 0.55, 0.5},
            {0.1, 0.2, 0.15, 0.1},
        };
        CHECK(average_configuration(hv) == 1);
        const std::vector<std::vector<double>> ties{{0.5, 0.5}, {0.5, 0.5}, {0.9, 0.1}};
        CHECK(average_configuration(ties) == 0);
    }
}
