#pragma once

#include "evosr/alpha.hpp"
#include "evosr/data.hpp"
#include "evosr/pareto.hpp"
#include "evosr/truncation.hpp"
#include "evosr/variation.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evosr {

enum class Algorithm { Nsga2, EvoNsga2, Nsga2Pd, Spea2, AlphaLinear, AlphaCosine, AlphaSigmoid, AlphaAdaptive };

inline constexpr std::array kAllAlgorithms{Algorithm::Nsga2,       Algorithm::EvoNsga2,    Algorithm::Nsga2Pd,
                                           Algorithm::Spea2,       Algorithm::AlphaLinear, Algorithm::AlphaCosine,
                                           Algorithm::AlphaSigmoid, Algorithm::AlphaAdaptive};

// "nsga2", "evonsga2", "nsga2pd", "spea2", "alpha-lin", "alpha-cos", "alpha-sig", "alpha-adaptive".
std::string_view algorithm_name(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;
bool uses_alpha(Algorithm a) noexcept;

struct EngineConfig {
    Algorithm algorithm = Algorithm::EvoNsga2;
    std::size_t population_size = 1000;
    int tournament_size = 2;
    double crossover_prob = 0.9;
    int generations = 100;
    VariationLimits limits;
    double alpha_step = 0.01;
    // Diagnostics: pin alpha for the alpha variants, or replace the evolvability
    // bounds with a constant per-size budget.
    std::optional<double> alpha_override;
    std::optional<double> uniform_bound_override;
};

struct GenerationMetrics {
    int generation = 0;
    double train_hv = 0.0;
    double test_hv = 0.0;
    std::vector<int> size_counts; // index = size, 0..kMaxTreeSize
    double alpha = 0.0;           // NaN for algorithms without alpha
    std::size_t archive_size = 0;
};

struct ArchiveRecord {
    std::string expression;
    int size = 0;
    double train_error = 0.0;
    double test_error = 0.0;
    double a = 0.0;
    double b = 0.0;
};

// One evolutionary run: population, external archive, and per-generation metrics.
class Run {
public:
    Run(EngineConfig config, const SplitStandardizedDataset& data, std::uint64_t seed);

    // One generation of the configured algorithm.
    const GenerationMetrics& step();
    void run_to_completion();

    [[nodiscard]] const EngineConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<Individual>& population() const noexcept { return population_; }
    [[nodiscard]] const Archive& archive() const noexcept { return archive_; }
    [[nodiscard]] const std::vector<GenerationMetrics>& history() const noexcept { return history_; }
    [[nodiscard]] int generation() const noexcept { return generation_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_.alpha; }
    [[nodiscard]] const std::optional<BoundTable>& last_bounds() const noexcept { return last_bounds_; }
    [[nodiscard]] const PrimitiveSet& primitives() const noexcept { return primitives_; }
    // Archive with test errors, as exported.
    [[nodiscard]] std::vector<ArchiveRecord> archive_records() const;
    [[nodiscard]] double train_hypervolume() const;
    [[nodiscard]] double test_hypervolume() const;

private:
    void evaluate_and_archive(std::vector<Individual>& individuals);
    void assign_rank_crowding(std::vector<Individual>& pop) const;
    void nsga_family_step(std::vector<Individual> offspring);
    void spea2_step(std::vector<Individual> offspring);
    void record_metrics();
    double current_alpha() const;

    EngineConfig config_;
    const SplitStandardizedDataset* data_;
    std::uint64_t seed_;
    double train_variance_;
    PrimitiveSet primitives_;
    std::vector<Individual> population_;
    std::vector<double> spea2_fitness_;
    Archive archive_;
    AlphaState alpha_;
    std::optional<BoundTable> last_bounds_;
    std::vector<GenerationMetrics> history_;
    int generation_ = 0;
};

} // namespace evosr
