#pragma once

#include "evosr/engine.hpp"
#include "evosr/evolvability.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace evosr {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string dataset = "synthetic";
    Algorithm algorithm = Algorithm::EvoNsga2;
    std::size_t population_size = 1000;
    int tournament_size = 2;
    double crossover_prob = 0.9;
    int generations = 100;
    std::uint64_t seed = 1;
    int repetitions = 30;
    double train_fraction = 0.75;
};

// Keys mirror the field names; flag spellings with dashes are accepted too.
void apply_setting(RunConfig& config, std::string key, const std::string& value);

// One `key = value` per line; blank lines and lines starting with '#' are skipped.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

void validate(const RunConfig& config);

// Canonical text form, accepted back by parse_config.
std::string to_config_text(const RunConfig& config);

EngineConfig engine_config(const RunConfig& config);

struct RepetitionResult {
    int repetition = 0;
    std::uint64_t seed = 0;
    double final_train_hv = 0.0;
    double final_test_hv = 0.0;
    std::size_t archive_size = 0;
    double seconds = 0.0;
    std::vector<GenerationMetrics> history;
};

// Runs repetition i with seed config.seed + i; the split also uses that seed.
RepetitionResult run_repetition(const RunConfig& config, const RawDataset& raw, int repetition,
                                const std::filesystem::path& out_dir);

// Writes config.echo, run_<i>.csv, archive_<i>.csv, aggregate.csv and
// timing.csv (the only file that varies between identical invocations).
std::vector<RepetitionResult> run_experiment(const RunConfig& config, const std::filesystem::path& out_dir,
                                             const std::filesystem::path& data_dir, int jobs = 1);

struct CompareOptions {
    std::string reference = "evonsga2";
    std::string metric = "train"; // or "test"
    double family_alpha = 0.05;
    // 0 = number of datasets in the comparison.
    std::size_t family_size = 0;
};

// Table CSV: one row per dataset, one column per algorithm, "mean(std)mark" cells.
std::string compare_runs(const std::vector<std::filesystem::path>& run_dirs, const CompareOptions& options);

struct EvolvabilityOptions {
    std::string dataset = "airfoil_like";
    std::uint64_t seed = 1;
    LabConfig lab;
    double train_fraction = 0.75;
    // Run whose population is traced for the size-proportion output.
    Algorithm trace_algorithm = Algorithm::Nsga2;
    std::size_t trace_population = 500;
    int trace_generations = 40;
};

// Writes crossover_g<L>.csv, crossover_g<L>_normalized.csv, mutation_g<L>.csv,
// mutation_g<L>_normalized.csv, marginal_g<L>.csv, buckets.csv and proportions.csv.
std::vector<EvolvabilitySnapshot> run_evolvability(const EvolvabilityOptions& options,
                                                   const std::filesystem::path& out_dir,
                                                   const std::filesystem::path& data_dir);

// CSV helpers shared by the exporters.
std::string format_number(double value);
inline constexpr const char* kAbsentCell = "NA";
std::string matrix_csv(const EvolvabilityMatrix& matrix);
std::string proportions_csv(const std::vector<std::vector<double>>& trace, const SizeBands& bands);

} // namespace evosr
