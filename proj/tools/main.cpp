#include "evosr/experiment.hpp"
#include "evosr/stats.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kMissingDataset = 2;
constexpr int kInvalidConfig = 3;

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> out;
    std::istringstream in(text);
    for (std::string tok; std::getline(in, tok, ',');) {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw evosr::ConfigError("invalid value '" + tok + "'");
    }
    return out;
}

// Rows = configurations, columns = datasets, optional header row and label column.
std::vector<std::vector<double>> read_hv_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw evosr::ConfigError("cannot read " + path);
    std::vector<std::vector<double>> table;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        bool numeric = true;
        std::size_t col = 0;
        for (std::string f; std::getline(ls, f, ','); ++col) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(f, &used));
            } catch (const std::exception&) {
                if (col != 0) numeric = false;
            }
        }
        if (numeric && !row.empty()) table.push_back(std::move(row));
    }
    return table;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace evosr;
    CLI::App app{"Multi-objective genetic programming for symbolic regression"};
    app.require_subcommand(1);

    std::string data_dir = default_data_dir().string();
    app.add_option("--data-dir", data_dir, "Directory searched for <dataset>.csv");

    // run
    auto* run_cmd = app.add_subcommand("run", "Run repeated experiments of one configuration");
    std::string config_path;
    std::string out_dir = "runs/out";
    int jobs = 1;
    std::map<std::string, std::string> overrides;
    run_cmd->add_option("--config", config_path, "key = value configuration file");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--jobs", jobs, "Parallel repetitions")->check(CLI::PositiveNumber);
    for (const char* key : {"dataset", "algorithm", "population-size", "tournament-size", "crossover-prob",
                            "generations", "seed", "repetitions", "train-fraction"}) {
        run_cmd->add_option_function<std::string>(std::string("--") + key,
                                                  [&overrides, key](const std::string& v) { overrides[key] = v; });
    }

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "Tabulate final HV across run directories");
    std::vector<std::string> run_dirs;
    CompareOptions compare;
    std::string compare_out;
    compare_cmd->add_option("dirs", run_dirs, "Run output directories")->required();
    compare_cmd->add_option("--reference", compare.reference, "Reference algorithm for the marks");
    compare_cmd->add_option("--metric", compare.metric, "train or test");
    compare_cmd->add_option("--family-size", compare.family_size, "Bonferroni family size (0 = datasets)");
    compare_cmd->add_option("--out", compare_out, "Write the table here instead of stdout");

    // evolvability
    auto* evo_cmd = app.add_subcommand("evolvability", "Measure operator success per solution size");
    EvolvabilityOptions evo;
    std::string evo_out = "runs/evolvability";
    std::string trace_algorithm = "nsga2";
    evo_cmd->add_option("--dataset", evo.dataset);
    evo_cmd->add_option("--seed", evo.seed);
    evo_cmd->add_option("--population-size", evo.lab.population_size);
    evo_cmd->add_option("--runs-per-limit", evo.lab.runs_per_limit);
    evo_cmd->add_option("--samples", evo.lab.samples);
    evo_cmd->add_option("--generation-limits", evo.lab.generation_limits)->delimiter(',');
    evo_cmd->add_option("--trace-algorithm", trace_algorithm);
    evo_cmd->add_option("--trace-population", evo.trace_population);
    evo_cmd->add_option("--trace-generations", evo.trace_generations);
    evo_cmd->add_option("--out", evo_out, "Output directory");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Statistical helpers");
    stats_cmd->require_subcommand(1);
    auto* mwu_cmd = stats_cmd->add_subcommand("mwu", "Mann-Whitney U test");
    std::string sample_a;
    std::string sample_b;
    std::string alternative = "two-sided";
    double threshold = 0.05;
    mwu_cmd->add_option("--a", sample_a, "Comma-separated values")->required();
    mwu_cmd->add_option("--b", sample_b, "Comma-separated values")->required();
    mwu_cmd->add_option("--alternative", alternative)->check(CLI::IsMember({"two-sided", "greater", "less"}));
    mwu_cmd->add_option("--threshold", threshold);
    auto* score_cmd = stats_cmd->add_subcommand("score", "Average configuration of an HV table");
    std::string table_path;
    score_cmd->add_option("table", table_path, "CSV, rows = configurations, columns = datasets")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            RunConfig config;
            if (!config_path.empty()) config = load_config(config_path);
            for (const auto& [k, v] : overrides) apply_setting(config, k, v);
            const auto results = run_experiment(config, out_dir, data_dir, jobs);
            for (const auto& r : results) {
                std::cout << "repetition " << r.repetition << " seed " << r.seed << " train_hv "
                          << format_number(r.final_train_hv) << " test_hv " << format_number(r.final_test_hv) << '\n';
            }
        } else if (*compare_cmd) {
            std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
            const auto table = compare_runs(dirs, compare);
            if (compare_out.empty()) {
                std::cout << table;
            } else {
                std::ofstream(compare_out) << table;
            }
        } else if (*evo_cmd) {
            const auto a = parse_algorithm(trace_algorithm);
            if (!a) throw ConfigError("unknown algorithm '" + trace_algorithm + "'");
            evo.trace_algorithm = *a;
            const auto snaps = run_evolvability(evo, evo_out, data_dir);
            for (const auto& s : snaps) {
                std::cout << "generation limit " << s.generation_limit << " acc90_error " << format_number(s.acc90_error)
                          << '\n';
            }
        } else if (*mwu_cmd) {
            const auto alt = alternative == "greater" ? Alternative::Greater
                             : alternative == "less"  ? Alternative::Less
                                                      : Alternative::TwoSided;
            const auto a = parse_values(sample_a);
            const auto b = parse_values(sample_b);
            const auto r = mann_whitney_u(a, b, alt, threshold);
            std::cout << "U " << format_number(r.u_statistic) << " p " << format_number(r.p_value) << " significant "
                      << (r.significant ? "yes" : "no") << '\n';
        } else if (*score_cmd) {
            std::cout << "average configuration " << average_configuration(read_hv_table(table_path)) << '\n';
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMissingDataset;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
