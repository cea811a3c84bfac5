#pragma once

#include <span>
#include <string>
#include <vector>

namespace evosr {

enum class Alternative { TwoSided, Greater, Less };

struct TestReport {
    double u_statistic = 0.0; // U of the first sample
    double p_value = 1.0;
    bool significant = false;
    double adjusted_threshold = 0.05;
};

// Samples this small on either side use the exact null distribution.
inline constexpr std::size_t kExactCutoff = 8;

// U = #{(x, y) : x > y} + 0.5 #{x == y}. Exact permutation p-value (ties
// handled through midranks) when either sample has fewer than 8 values,
// otherwise the tie-corrected normal approximation with continuity correction.
// Greater tests whether `a` tends to exceed `b`.
TestReport mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alternative = Alternative::TwoSided, double threshold = 0.05);

// Exact tail probabilities of the rank-sum statistic. Exposed for testing.
struct ExactTails {
    double lower = 1.0; // P(U <= u)
    double upper = 1.0; // P(U >= u)
};
ExactTails mann_whitney_exact_tails(std::span<const double> a, std::span<const double> b);

// Threshold family_alpha / p_values.size() applied to each p.
std::vector<TestReport> bonferroni(std::span<const double> p_values, double family_alpha = 0.05);
std::vector<TestReport> bonferroni(std::vector<TestReport> reports, double family_alpha = 0.05);

struct SampleSummary {
    double mean = 0.0;
    double std = 0.0; // sample standard deviation (n - 1)
};
SampleSummary summarize(std::span<const double> values);

struct AlgorithmSamples {
    std::string name;
    std::vector<double> values; // higher is better
};

struct ComparisonCell {
    std::string name;
    SampleSummary summary;
    // '+' reference significantly better, '-' worse, '=' no difference,
    // ' ' for the reference itself.
    char mark = ' ';
    TestReport test;
};

// Reference versus every algorithm, two-sided at family_alpha / family_size.
// family_size 0 means one correction over the comparisons in this call.
std::vector<ComparisonCell> summarize_runs(std::span<const AlgorithmSamples> samples, const std::string& reference,
                                           double family_alpha = 0.05, std::size_t family_size = 0);

// "0.799(0.021)-" style cell text.
std::string format_cell(const ComparisonCell& cell, int digits = 3);

// hv[config][dataset]: per dataset, configurations are ranked by HV (1 =
// lowest, ties share the average rank); each configuration's scores are
// averaged over datasets, and the configuration closest to the mean of those
// averages is returned.
std::size_t average_configuration(const std::vector<std::vector<double>>& hv);

} // namespace evosr
