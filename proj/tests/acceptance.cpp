// Acceptance checks, one line per criterion. Optional argument: substring
// filter on the criterion names.
#include "evosr/engine.hpp"
#include "evosr/evolvability.hpp"
#include "evosr/hypervolume.hpp"
#include "evosr/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace evosr;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<std::vector<std::size_t>> peel(const std::vector<ObjectiveVector>& pts)
{
    std::vector<std::size_t> left(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) left[i] = i;
    std::vector<std::vector<std::size_t>> layers;
    while (!left.empty()) {
        std::vector<std::size_t> layer;
        std::vector<std::size_t> rest;
        for (auto i : left) {
            bool dominated = false;
            for (auto j : left) {
                if (dominates(pts[j], pts[i])) {
                    dominated = true;
                    break;
                }
            }
            (dominated ? rest : layer).push_back(i);
        }
        layers.push_back(std::move(layer));
        left = std::move(rest);
    }
    return layers;
}

Outcome nds_oracle()
{
    Rng rng(500);
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = 1 + rng.index(200);
        std::vector<ObjectiveVector> pts(n);
        const bool grid = k % 2 == 0;
        for (auto& p : pts) {
            p = grid ? ObjectiveVector{rng.uniform_int(0, 20) / 20.0, rng.uniform_int(1, 30) / 100.0}
                     : ObjectiveVector{rng.uniform(), rng.uniform()};
        }
        auto fronts = fast_non_dominated_sort(pts).fronts;
        for (auto& f : fronts) std::sort(f.begin(), f.end());
        if (fronts != peel(pts)) return {false, fmt("population %d (n=%zu) differs from peeling", k, n)};
    }
    return {true, "500 populations identical to layered peeling"};
}

Outcome hv_oracle()
{
    const std::vector<ObjectiveVector> origin{{0.0, 0.0}};
    // 1.1 * 1.1 in binary floating point is one ulp above the double nearest 1.21.
    const double best = hypervolume_2d(origin);
    if (std::abs(best - 1.21) > 2 * std::numeric_limits<double>::epsilon()) return {false, fmt("HV({(0,0)}) = %.17g", best)};
    Rng rng(2);
    for (int k = 0; k < 1000; ++k) {
        const ObjectiveVector p{rng.uniform(0, 1.1), rng.uniform(0, 1.1)};
        const std::vector<ObjectiveVector> one{p};
        const double expect = (1.1 - p.error) * (1.1 - p.size_norm);
        if (std::abs(hypervolume_2d(one) - expect) > 1e-15) return {false, "single-point formula mismatch"};
    }

    const long samples = 10'000'000;
    double worst_z = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + rng.index(50);
        std::vector<ObjectiveVector> pts(n);
        for (auto& p : pts) p = {rng.uniform(0, 1.1), rng.uniform(0, 1.1)};
        const double exact = hypervolume_2d(pts);

        // Staircase lookup: for a sample x, the smallest size among points with error <= x.
        std::vector<ObjectiveVector> sorted = pts;
        std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.error < b.error; });
        std::vector<double> best_size(n);
        double running = 2.0;
        for (std::size_t i = 0; i < n; ++i) best_size[i] = running = std::min(running, sorted[i].size_norm);
        std::vector<double> errors(n);
        for (std::size_t i = 0; i < n; ++i) errors[i] = sorted[i].error;

        Rng mc(derive_seed(77, "mc", std::uint64_t(k)));
        long hits = 0;
        for (long s = 0; s < samples; ++s) {
            const double x = mc.uniform(0, 1.1);
            const double y = mc.uniform(0, 1.1);
            const auto it = std::upper_bound(errors.begin(), errors.end(), x);
            if (it != errors.begin() && best_size[std::size_t(it - errors.begin()) - 1] <= y) ++hits;
        }
        const double p = double(hits) / double(samples);
        const double estimate = 1.21 * p;
        const double se = 1.21 * std::sqrt(p * (1.0 - p) / double(samples));
        const double z = se > 0 ? std::abs(estimate - exact) / se : (estimate == exact ? 0.0 : 1e9);
        worst_z = std::max(worst_z, z);
        if (z > 3.0) return {false, fmt("front %d: exact %.6f vs MC %.6f (%.2f SE)", k, exact, estimate, z)};
    }
    return {true, fmt("100 fronts within 3 SE of 1e7-sample Monte Carlo (worst %.2f SE); HV({(0,0)}) = %.17g", worst_z, best)};
}

Individual synthetic(double error, int size, std::optional<int> parent_size = std::nullopt)
{
    Individual ind;
    auto t = ExpressionTree::variable(0);
    while (t.size() < size) t = ExpressionTree::unary(Op::ProtSqrt, t);
    ind.tree = std::move(t);
    ind.objectives = {error, size / 100.0};
    ind.evaluated = true;
    ind.parent_size = parent_size;
    return ind;
}

Outcome build_b_trace()
{
    const std::vector<Individual> P{synthetic(0.1, 1), synthetic(0.2, 2), synthetic(0.3, 3), synthetic(0.4, 1)};
    const std::vector<Individual> O{synthetic(0.05, 1, 1), synthetic(0.3, 1, 1), synthetic(0.1, 1, 3),
                                    synthetic(0.2, 1, 3)};
    const auto B = build_bounds(P, O);
    const double expect[] = {0.8889, 1.3333, 1.7778};
    for (int s = 1; s <= 3; ++s) {
        if (std::abs(B[s] - expect[s - 1]) > 1e-4) return {false, fmt("B[%d] = %.6f", s, B[s])};
    }
    Rng rng(1000);
    for (int k = 0; k < 1000; ++k) {
        std::vector<Individual> p;
        std::vector<Individual> o;
        const auto n = 1 + rng.index(60);
        for (std::size_t i = 0; i < n; ++i) p.push_back(synthetic(rng.uniform(), rng.uniform_int(1, 100)));
        for (std::size_t i = 0; i < n; ++i) {
            o.push_back(synthetic(rng.uniform(), rng.uniform_int(1, 100), p[rng.index(n)].size()));
        }
        const auto table = build_bounds(p, o);
        int largest = 0;
        for (const auto& i : p) largest = std::max(largest, i.size());
        for (const auto& i : o) largest = std::max(largest, i.size());
        if (table.max_size() != largest) return {false, fmt("pair %d: coverage %d of %d", k, table.max_size(), largest)};
        if (std::abs(table.sum() - double(n)) > 1e-6) return {false, fmt("pair %d: sum %.9f != %zu", k, table.sum(), n)};
        for (const auto& r : success_ratios(p, o).ratio) {
            if (r && (*r < 0.0 || *r > 1.0)) return {false, fmt("pair %d: ratio %.4f outside [0,1]", k, *r)};
        }
    }
    return {true, fmt("bounds {%.4f, %.4f, %.4f}; invariants hold on 1000 random P/O pairs", B[1], B[2], B[3])};
}

Outcome degenerate_equivalence()
{
    Rng rng(41);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 20 + rng.index(200);
        std::vector<int> rank(n);
        std::vector<double> crowd(n);
        std::vector<int> sizes(n);
        for (std::size_t i = 0; i < n; ++i) {
            rank[i] = rng.uniform_int(1, 8);
            crowd[i] = rng.bernoulli(0.1) ? kInfinity : rng.uniform(0, 3);
            sizes[i] = rng.uniform_int(1, 100);
        }
        const auto target = n / 2;
        const auto loose = BoundTable::uniform(100, double(n));
        if (evo_truncation(rank, crowd, sizes, loose, target) != nsga2_truncation(rank, crowd, target)) {
            return {false, fmt("merge %d differs under non-binding bounds", k)};
        }
    }

    const auto data = prepare(make_synthetic(400, 3, 0.05, 7), 0.75, 1);
    auto population_text = [](const Run& run) {
        std::vector<std::string> out;
        for (const auto& ind : run.population()) out.push_back(to_string(ind.tree));
        return out;
    };
    for (auto alg : {Algorithm::AlphaLinear, Algorithm::AlphaCosine, Algorithm::AlphaSigmoid, Algorithm::AlphaAdaptive}) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            EngineConfig base;
            base.population_size = 100;
            base.generations = 20;
            base.algorithm = Algorithm::Nsga2;
            auto variant = base;
            variant.algorithm = alg;
            variant.alpha_override = 0.0;
            Run a(base, data, seed);
            Run b(variant, data, seed);
            for (int g = 0; g < base.generations; ++g) {
                a.step();
                b.step();
                if (population_text(a) != population_text(b)) {
                    return {false, fmt("%s seed %llu diverges at generation %d", std::string(algorithm_name(alg)).c_str(),
                                       (unsigned long long)seed, g + 1)};
                }
            }
        }
    }
    return {true, "100 merges identical; 4 alpha variants at alpha=0 match NSGA-II populations (3 seeds x 20 generations)"};
}

Outcome size_cap_safety()
{
    const auto data = prepare(make_synthetic(400, 3, 0.05, 7), 0.75, 1);
    int largest = 0;
    for (auto alg : kAllAlgorithms) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            EngineConfig cfg;
            cfg.algorithm = alg;
            cfg.population_size = 250;
            cfg.generations = 100;
            Run run(cfg, data, seed);
            double prev = run.history().back().train_hv;
            for (int g = 0; g < cfg.generations; ++g) {
                const auto& m = run.step();
                for (const auto& ind : run.population()) largest = std::max(largest, ind.size());
                for (const auto& e : run.archive().entries()) largest = std::max(largest, e.tree.size());
                if (m.train_hv < prev - 1e-12) {
                    return {false, fmt("%s seed %llu: archive HV fell by %.3g at generation %d",
                                       std::string(algorithm_name(alg)).c_str(), (unsigned long long)seed, prev - m.train_hv, m.generation)};
                }
                prev = m.train_hv;
            }
            if (largest > kMaxTreeSize) {
                return {false, fmt("%s seed %llu: size %d", std::string(algorithm_name(alg)).c_str(),
                                   (unsigned long long)seed, largest)};
            }
        }
    }
    return {true, fmt("8 algorithms x 3 seeds x 100 generations: largest size %d, archive HV never decreased "
                      "beyond 1e-12 summation rounding",
                      largest)};
}

// Airfoil table if present in the data directory, otherwise the built-in stand-in.
const SplitStandardizedDataset& airfoil(std::uint64_t seed)
{
    static std::map<std::uint64_t, SplitStandardizedDataset> cache;
    static const RawDataset raw = [] {
        for (const auto& dir : {default_data_dir(), std::filesystem::path(EVOSR_SOURCE_DATA_DIR)}) {
            if (std::filesystem::exists(dir / "airfoil.csv")) {
                std::printf("# dataset: %s\n", (dir / "airfoil.csv").c_str());
                return load_csv(dir / "airfoil.csv");
            }
        }
        std::printf("# dataset: airfoil.csv not found, using the built-in airfoil_like stand-in\n");
        return make_airfoil_like();
    }();
    auto it = cache.find(seed);
    if (it == cache.end()) it = cache.emplace(seed, prepare(raw, 0.75, seed)).first;
    return it->second;
}

struct HeadlineRuns {
    std::vector<double> nsga2_hv, evo_hv;
    std::vector<double> nsga2_size1, evo_size1;
};

const HeadlineRuns& headline_runs()
{
    static const HeadlineRuns runs = [] {
        HeadlineRuns r;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            for (auto alg : {Algorithm::Nsga2, Algorithm::EvoNsga2}) {
                EngineConfig cfg;
                cfg.algorithm = alg;
                cfg.population_size = 500;
                cfg.tournament_size = 2;
                cfg.crossover_prob = 0.9;
                cfg.generations = 100;
                Run run(cfg, airfoil(seed), seed);
                run.run_to_completion();
                double share = 0.0;
                for (int g = 10; g <= 40; ++g) {
                    share += double(run.history()[std::size_t(g)].size_counts[1]) / double(cfg.population_size);
                }
                share /= 31.0;
                const double hv = run.history().back().train_hv;
                (alg == Algorithm::Nsga2 ? r.nsga2_hv : r.evo_hv).push_back(hv);
                (alg == Algorithm::Nsga2 ? r.nsga2_size1 : r.evo_size1).push_back(share);
            }
        }
        return r;
    }();
    return runs;
}

Outcome headline()
{
    const auto& r = headline_runs();
    const auto evo = summarize(r.evo_hv);
    const auto base = summarize(r.nsga2_hv);
    const auto test = mann_whitney_u(r.evo_hv, r.nsga2_hv, Alternative::Greater);
    const double gap = evo.mean - base.mean;
    const bool pass = test.p_value < 0.05 && gap >= 0.05;
    return {pass, fmt("train HV evoNSGA-II %.3f(%.3f) vs NSGA-II %.3f(%.3f), gap %.3f, one-sided p = %.2e", evo.mean,
                      evo.std, base.mean, base.std, gap, test.p_value)};
}

Outcome degeneration()
{
    const auto& r = headline_runs();
    int nsga_above = 0;
    int evo_below = 0;
    for (std::size_t i = 0; i < r.nsga2_size1.size(); ++i) {
        nsga_above += r.nsga2_size1[i] > 0.3 ? 1 : 0;
        evo_below += r.evo_size1[i] < 0.3 ? 1 : 0;
    }
    return {nsga_above >= 7 && evo_below >= 7,
            fmt("size-1 share over generations 10-40: NSGA-II %.3f (above 30%% in %d/10 seeds), evoNSGA-II %.3f "
                "(below 30%% in %d/10 seeds)",
                summarize(r.nsga2_size1).mean, nsga_above, summarize(r.evo_size1).mean, evo_below)};
}

Outcome heatmap_shape()
{
    LabConfig lab;
    lab.population_size = 250;
    lab.runs_per_limit = 50;
    lab.samples = 100;
    lab.generation_limits = {40};
    const auto snaps = run_evolvability_study(airfoil(1), lab, 1);
    const auto normalized = normalize_min_max(snaps.front().crossover);
    auto row_mean = [&](std::size_t r) -> std::optional<double> {
        double s = 0.0;
        int n = 0;
        for (const auto& c : normalized.cells[r]) {
            if (c) {
                s += *c;
                ++n;
            }
        }
        return n > 0 ? std::optional<double>(s / n) : std::nullopt;
    };
    const auto small = row_mean(0);
    const auto large = row_mean(normalized.cells.size() - 1);
    if (!small || !large) return {false, "size-1 or largest parent bucket is empty"};
    return {*large > *small, fmt("mean normalized crossover success: parent 64-100 %.3f vs parent 1 %.3f "
                                 "(acc90 error %.4f, pop %zu, %d runs per limit)",
                                 *large, *small, snaps.front().acc90_error, lab.population_size, lab.runs_per_limit)};
}

double u_of(const std::vector<double>& a, const std::vector<double>& b)
{
    double u = 0.0;
    for (double x : a) {
        for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    }
    return u;
}

Outcome statistics()
{
    Rng rng(314);
    int pairs = 0;
    for (std::size_t n = 1; n <= 7; ++n) {
        for (std::size_t m = 1; m <= 7; ++m) {
            for (int variant = 0; variant < 2; ++variant) {
                std::vector<double> a(n);
                std::vector<double> b(m);
                for (auto& v : a) v = variant == 0 ? rng.uniform() : double(rng.uniform_int(0, 3));
                for (auto& v : b) v = variant == 0 ? rng.uniform() : double(rng.uniform_int(0, 3));

                std::vector<double> pooled = a;
                pooled.insert(pooled.end(), b.begin(), b.end());
                const double observed = u_of(a, b);
                std::vector<bool> pick(n + m, false);
                std::fill(pick.begin(), pick.begin() + long(n), true);
                double total = 0, lower = 0, upper = 0;
                do {
                    std::vector<double> x;
                    std::vector<double> y;
                    for (std::size_t i = 0; i < pooled.size(); ++i) (pick[i] ? x : y).push_back(pooled[i]);
                    const double u = u_of(x, y);
                    total += 1;
                    lower += u <= observed + 1e-9 ? 1 : 0;
                    upper += u >= observed - 1e-9 ? 1 : 0;
                } while (std::prev_permutation(pick.begin(), pick.end()));
                const double p_less = lower / total;
                const double p_greater = upper / total;
                const double p_two = std::min(1.0, 2.0 * std::min(p_less, p_greater));

                const auto two = mann_whitney_u(a, b, Alternative::TwoSided);
                const auto gr = mann_whitney_u(a, b, Alternative::Greater);
                const auto ls = mann_whitney_u(a, b, Alternative::Less);
                if (two.u_statistic != observed || std::abs(two.p_value - p_two) > 1e-12 ||
                    std::abs(gr.p_value - p_greater) > 1e-12 || std::abs(ls.p_value - p_less) > 1e-12) {
                    return {false, fmt("n=%zu m=%zu: p %.6g/%.6g/%.6g vs enumeration %.6g/%.6g/%.6g", n, m, two.p_value,
                                       gr.p_value, ls.p_value, p_two, p_greater, p_less)};
                }
                ++pairs;
            }
        }
    }
    for (std::size_t k = 1; k <= 100; ++k) {
        std::vector<double> p(k);
        for (auto& v : p) v = rng.uniform(0, 0.01);
        const auto reports = bonferroni(p, 0.05);
        for (std::size_t i = 0; i < k; ++i) {
            if (reports[i].adjusted_threshold != 0.05 / double(k) ||
                reports[i].significant != (p[i] < 0.05 / double(k))) {
                return {false, fmt("bonferroni family %zu mismatch", k)};
            }
        }
    }
    return {true, fmt("%d sample pairs (sizes 1..7, with and without ties) match exact enumeration; Bonferroni "
                      "thresholds exact for families 1..100",
                      pairs)};
}

} // namespace

int main(int argc, char** argv)
{
    const std::string filter = argc > 1 ? argv[1] : "";
    const std::vector<Criterion> criteria{
        {"non-dominated sorting oracle", 10, nds_oracle},
        {"hypervolume oracle", 120, hv_oracle},
        {"bound table trace", 5, build_b_trace},
        {"degenerate equivalence", 30, degenerate_equivalence},
        {"size-cap safety", 600, size_cap_safety},
        {"headline reproduction", 1800, headline},
        {"evolvability degeneration signature", 1800, degeneration},
        {"evolvability heat-map shape", 1800, heatmap_shape},
        {"statistics", 60, statistics},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("[%s] %s: %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), secs,
                    in_time ? "" : ", over time budget");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
