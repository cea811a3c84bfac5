#pragma once

#include "evosr/data.hpp"
#include "evosr/engine.hpp"
#include "evosr/individual.hpp"
#include "evosr/variation.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evosr {

// Contiguous size intervals covering 1..max.
class SizeBands {
public:
    explicit SizeBands(std::vector<std::pair<int, int>> bands);

    // {1}, {2-3}, {4-7}, {8-15}, {16-31}, {32-63}, {64-100}.
    static SizeBands exponential(int max_size = kMaxTreeSize);

    [[nodiscard]] std::size_t count() const noexcept { return bands_.size(); }
    [[nodiscard]] const std::pair<int, int>& band(std::size_t i) const { return bands_.at(i); }
    [[nodiscard]] std::size_t band_of(int size) const;
    [[nodiscard]] std::string label(std::size_t i) const;
    [[nodiscard]] std::vector<int> upper_edges() const;

private:
    std::vector<std::pair<int, int>> bands_;
};

struct LabConfig {
    std::size_t population_size = 500;
    int tournament_size = 2;
    double crossover_prob = 0.9;
    int runs_per_limit = 100;
    std::vector<int> generation_limits{10, 20, 30, 40};
    int samples = 100;
    SizeBands bands = SizeBands::exponential();
};

// Single-objective GP on training error with size cap `max_size`. Returns the
// best individual found by each generation in `snapshots` (ascending).
std::vector<Individual> run_size_capped_gp(const SplitStandardizedDataset& data, const LabConfig& config, int max_size,
                                           const std::vector<int>& snapshots, std::uint64_t seed);

// Best individual after `generations` (0 = best of the initial population).
Individual run_size_capped_gp(const SplitStandardizedDataset& data, const LabConfig& config, int max_size,
                              int generations, std::uint64_t seed);

// Nearest-rank percentile, p in (0, 100].
double nearest_rank_percentile(std::vector<double> values, double p);

struct Collection {
    std::vector<std::vector<Individual>> buckets; // one per band
    double acc90_error = 0.0;                     // 10th percentile of pooled errors
};

Collection collect_and_bucket(std::vector<Individual> solutions, const SizeBands& bands);

enum class Operator { Crossover, Mutation };

// Rows: parent band. Columns: donor band (crossover) or a single column
// (mutation). Absent cells come from empty buckets.
struct EvolvabilityMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<std::optional<double>>> cells;
};

// Fraction of `samples` offspring per cell whose training error beats
// acc90_error. Sample k of cell (r, c) uses derive_seed(seed, op, (r * 64 + c) * 1'000'000 + k).
EvolvabilityMatrix estimate_frequencies(const Collection& collection, const SizeBands& bands, Operator op,
                                        int samples, const SplitStandardizedDataset& data, std::uint64_t seed);

// (x - min) / (max - min) over present cells; constant matrices map to 0.
EvolvabilityMatrix normalize_min_max(const EvolvabilityMatrix& matrix);

// Per parent band: mean of the crossover row average and the mutation cell.
std::vector<std::optional<double>> marginal_evolvability(const EvolvabilityMatrix& crossover,
                                                         const EvolvabilityMatrix& mutation);

// Fraction of the population per band, one row per generation.
std::vector<std::vector<double>> size_proportion_trace(const std::vector<GenerationMetrics>& history,
                                                       const SizeBands& bands);

struct EvolvabilitySnapshot {
    int generation_limit = 0;
    double acc90_error = 0.0;
    std::vector<std::size_t> bucket_sizes;
    EvolvabilityMatrix crossover;
    EvolvabilityMatrix mutation;
};

// Collection runs (one size limit per band upper edge, runs_per_limit each)
// followed by frequency estimation at every generation limit.
std::vector<EvolvabilitySnapshot> run_evolvability_study(const SplitStandardizedDataset& data, const LabConfig& config,
                                                         std::uint64_t seed);

} // namespace evosr
