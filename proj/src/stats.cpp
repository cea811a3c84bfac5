#include "evosr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace evosr {

namespace {

// Midranks (1-based) of the pooled sample, returned doubled so they are integers.
std::vector<long> doubled_midranks(std::span<const double> pooled)
{
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    std::vector<long> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) {
            ++j;
        }
        // Positions i..j share rank ((i+1) + (j+1)) / 2.
        const long doubled = static_cast<long>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = doubled;
        }
        i = j + 1;
    }
    return ranks;
}

double u_statistic(std::span<const double> a, std::span<const double> b)
{
    double u = 0.0;
    for (double x : a) {
        for (double y : b) {
            u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
        }
    }
    return u;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace

ExactTails mann_whitney_exact_tails(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = doubled_midranks(pooled);
    const std::size_t n = pooled.size();
    const std::size_t na = a.size();

    long observed = 0;
    for (std::size_t i = 0; i < na; ++i) {
        observed += ranks[i];
    }
    const long max_sum = std::accumulate(ranks.begin(), ranks.end(), 0L);

    // ways[j][s]: subsets of size j with doubled rank sum s.
    std::vector<std::vector<long double>> ways(na + 1, std::vector<long double>(static_cast<std::size_t>(max_sum) + 1, 0.0L));
    ways[0][0] = 1.0L;
    for (std::size_t item = 0; item < n; ++item) {
        const auto r = static_cast<std::size_t>(ranks[item]);
        for (std::size_t j = std::min(na, item + 1); j-- > 0;) {
            auto& from = ways[j];
            auto& to = ways[j + 1];
            for (std::size_t s = from.size() - r; s-- > 0;) {
                if (from[s] != 0.0L) {
                    to[s + r] += from[s];
                }
            }
        }
    }
    const auto& dist = ways[na];
    long double total = 0.0L;
    long double lower = 0.0L;
    long double upper = 0.0L;
    for (std::size_t s = 0; s < dist.size(); ++s) {
        total += dist[s];
        if (static_cast<long>(s) <= observed) lower += dist[s];
        if (static_cast<long>(s) >= observed) upper += dist[s];
    }
    return ExactTails{static_cast<double>(lower / total), static_cast<double>(upper / total)};
}

TestReport mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alternative, double threshold)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("mann_whitney_u needs two non-empty samples");
    }
    TestReport report;
    report.u_statistic = u_statistic(a, b);
    report.adjusted_threshold = threshold;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    if (a.size() < kExactCutoff || b.size() < kExactCutoff) {
        const auto tails = mann_whitney_exact_tails(a, b);
        switch (alternative) {
        case Alternative::TwoSided: report.p_value = std::min(1.0, 2.0 * std::min(tails.lower, tails.upper)); break;
        case Alternative::Greater: report.p_value = tails.upper; break;
        case Alternative::Less: report.p_value = tails.lower; break;
        }
    } else {
        std::vector<double> pooled(a.begin(), a.end());
        pooled.insert(pooled.end(), b.begin(), b.end());
        std::sort(pooled.begin(), pooled.end());
        double tie_term = 0.0;
        for (std::size_t i = 0; i < pooled.size();) {
            std::size_t j = i;
            while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
        const double n = na + nb;
        const double mu = na * nb / 2.0;
        const double sd = std::sqrt(na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0))));
        if (!(sd > 0.0)) {
            report.p_value = 1.0;
        } else {
            const double u = report.u_statistic;
            switch (alternative) {
            case Alternative::TwoSided:
                report.p_value = std::min(1.0, 2.0 * normal_sf((std::max(u, na * nb - u) - mu - 0.5) / sd));
                break;
            case Alternative::Greater: report.p_value = normal_sf((u - mu - 0.5) / sd); break;
            case Alternative::Less: report.p_value = normal_sf((na * nb - u - mu - 0.5) / sd); break;
            }
        }
    }
    report.p_value = std::clamp(report.p_value, 0.0, 1.0);
    report.significant = report.p_value < report.adjusted_threshold;
    return report;
}

std::vector<TestReport> bonferroni(std::vector<TestReport> reports, double family_alpha)
{
    if (reports.empty()) {
        throw std::invalid_argument("bonferroni needs at least one p-value");
    }
    const double threshold = family_alpha / static_cast<double>(reports.size());
    for (auto& r : reports) {
        r.adjusted_threshold = threshold;
        r.significant = r.p_value < threshold;
    }
    return reports;
}

std::vector<TestReport> bonferroni(std::span<const double> p_values, double family_alpha)
{
    std::vector<TestReport> reports;
    for (double p : p_values) {
        TestReport r;
        r.u_statistic = std::nan("");
        r.p_value = p;
        reports.push_back(r);
    }
    return bonferroni(std::move(reports), family_alpha);
}

SampleSummary summarize(std::span<const double> values)
{
    SampleSummary s;
    if (values.empty()) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

std::vector<ComparisonCell> summarize_runs(std::span<const AlgorithmSamples> samples, const std::string& reference,
                                           double family_alpha, std::size_t family_size)
{
    const auto ref = std::find_if(samples.begin(), samples.end(), [&](const auto& s) { return s.name == reference; });
    if (ref == samples.end()) {
        throw std::invalid_argument("reference algorithm '" + reference + "' has no samples");
    }
    const std::size_t comparisons = samples.size() - 1;
    const std::size_t family = family_size > 0 ? family_size : std::max<std::size_t>(1, comparisons);
    const double threshold = family_alpha / static_cast<double>(family);

    std::vector<ComparisonCell> out;
    for (const auto& s : samples) {
        ComparisonCell cell;
        cell.name = s.name;
        cell.summary = summarize(s.values);
        if (&s != &*ref) {
            cell.test = mann_whitney_u(ref->values, s.values, Alternative::TwoSided, threshold);
            const double half = 0.5 * static_cast<double>(ref->values.size() * s.values.size());
            cell.mark = !cell.test.significant ? '=' : (cell.test.u_statistic > half ? '+' : '-');
        }
        out.push_back(std::move(cell));
    }
    return out;
}

std::string format_cell(const ComparisonCell& cell, int digits)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*f(%.*f)", digits, cell.summary.mean, digits, cell.summary.std);
    std::string out = buf;
    if (cell.mark != ' ') {
        out += cell.mark;
    }
    return out;
}

std::size_t average_configuration(const std::vector<std::vector<double>>& hv)
{
    if (hv.empty() || hv.front().empty()) {
        throw std::invalid_argument("average_configuration needs a non-empty HV table");
    }
    const std::size_t configs = hv.size();
    const std::size_t datasets = hv.front().size();
    std::vector<double> overall(configs, 0.0);
    for (std::size_t d = 0; d < datasets; ++d) {
        std::vector<double> column(configs);
        for (std::size_t c = 0; c < configs; ++c) {
            column[c] = hv.at(c).at(d);
        }
        for (std::size_t c = 0; c < configs; ++c) {
            double below = 0.0;
            double equal = 0.0;
            for (std::size_t o = 0; o < configs; ++o) {
                below += column[o] < column[c] ? 1.0 : 0.0;
                equal += column[o] == column[c] ? 1.0 : 0.0;
            }
            overall[c] += below + (equal + 1.0) / 2.0;
        }
    }
    for (auto& v : overall) {
        v /= static_cast<double>(datasets);
    }
    const double target = std::accumulate(overall.begin(), overall.end(), 0.0) / static_cast<double>(configs);
    std::size_t best = 0;
    for (std::size_t c = 1; c < configs; ++c) {
        if (std::abs(overall[c] - target) < std::abs(overall[best] - target)) {
            best = c;
        }
    }
    return best;
}

} // namespace evosr
