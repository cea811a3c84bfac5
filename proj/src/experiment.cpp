#include "evosr/experiment.hpp"

#include "evosr/hypervolume.hpp"
#include "evosr/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace evosr {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value)
{
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("invalid integer for " + key + ": '" + value + "'");
    }
    return out;
}

double parse_real(const std::string& key, const std::string& value)
{
    errno = 0;
    char* end = nullptr;
    const double out = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || errno != 0 || !std::isfinite(out)) {
        throw ConfigError("invalid number for " + key + ": '" + value + "'");
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void apply_setting(RunConfig& config, std::string key, const std::string& value)
{
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "dataset") {
        if (value.empty()) throw ConfigError("dataset must not be empty");
        config.dataset = value;
    } else if (key == "algorithm") {
        const auto a = parse_algorithm(value);
        if (!a) throw ConfigError("unknown algorithm '" + value + "'");
        config.algorithm = *a;
    } else if (key == "population_size") {
        config.population_size = parse_integer<std::size_t>(key, value);
    } else if (key == "tournament_size") {
        config.tournament_size = parse_integer<int>(key, value);
    } else if (key == "crossover_prob") {
        config.crossover_prob = parse_real(key, value);
    } else if (key == "generations") {
        config.generations = parse_integer<int>(key, value);
    } else if (key == "seed") {
        config.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "repetitions") {
        config.repetitions = parse_integer<int>(key, value);
    } else if (key == "train_fraction") {
        config.train_fraction = parse_real(key, value);
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

RunConfig parse_config(const std::string& text, RunConfig base)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(base, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    }
    return base;
}

RunConfig load_config(const fs::path& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

void validate(const RunConfig& c)
{
    if (c.population_size < 2) throw ConfigError("population_size must be at least 2");
    if (c.tournament_size < 1) throw ConfigError("tournament_size must be at least 1");
    if (!(c.crossover_prob >= 0.0 && c.crossover_prob <= 1.0)) throw ConfigError("crossover_prob must lie in [0, 1]");
    if (c.generations < 0) throw ConfigError("generations must be non-negative");
    if (c.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
}

std::string to_config_text(const RunConfig& c)
{
    std::ostringstream out;
    out << "dataset = " << c.dataset << '\n'
        << "algorithm = " << algorithm_name(c.algorithm) << '\n'
        << "population_size = " << c.population_size << '\n'
        << "tournament_size = " << c.tournament_size << '\n'
        << "crossover_prob = " << format_number(c.crossover_prob) << '\n'
        << "generations = " << c.generations << '\n'
        << "seed = " << c.seed << '\n'
        << "repetitions = " << c.repetitions << '\n'
        << "train_fraction = " << format_number(c.train_fraction) << '\n';
    return out.str();
}

EngineConfig engine_config(const RunConfig& c)
{
    EngineConfig e;
    e.algorithm = c.algorithm;
    e.population_size = c.population_size;
    e.tournament_size = c.tournament_size;
    e.crossover_prob = c.crossover_prob;
    e.generations = c.generations;
    return e;
}

std::string proportions_csv(const std::vector<std::vector<double>>& trace, const SizeBands& bands)
{
    std::string out = "generation,band,proportion\n";
    for (std::size_t g = 0; g < trace.size(); ++g) {
        for (std::size_t b = 0; b < bands.count(); ++b) {
            out += std::to_string(g) + "," + bands.label(b) + "," + format_number(trace[g][b]) + "\n";
        }
    }
    return out;
}

std::string matrix_csv(const EvolvabilityMatrix& m)
{
    std::string out = "parent";
    for (const auto& c : m.col_labels) out += "," + c;
    out += "\n";
    for (std::size_t r = 0; r < m.row_labels.size(); ++r) {
        out += m.row_labels[r];
        for (const auto& cell : m.cells[r]) {
            out += ",";
            out += cell ? format_number(*cell) : kAbsentCell;
        }
        out += "\n";
    }
    return out;
}

RepetitionResult run_repetition(const RunConfig& config, const RawDataset& raw, int repetition, const fs::path& out_dir)
{
    const auto started = std::chrono::steady_clock::now();
    RepetitionResult result;
    result.repetition = repetition;
    result.seed = config.seed + static_cast<std::uint64_t>(repetition);

    const auto data = prepare(raw, config.train_fraction, result.seed);
    Run run(engine_config(config), data, result.seed);
    run.run_to_completion();

    const auto bands = SizeBands::exponential();
    const auto trace = size_proportion_trace(run.history(), bands);
    std::string rows = "generation,train_hv,test_hv";
    for (std::size_t b = 0; b < bands.count(); ++b) rows += ",band_" + bands.label(b);
    rows += ",alpha,archive_size\n";
    for (std::size_t g = 0; g < run.history().size(); ++g) {
        const auto& m = run.history()[g];
        rows += std::to_string(m.generation) + "," + format_number(m.train_hv) + "," + format_number(m.test_hv);
        for (double p : trace[g]) rows += "," + format_number(p);
        rows += "," + format_number(m.alpha) + "," + std::to_string(m.archive_size) + "\n";
    }

    std::string archive = "expression,size,train_error,test_error,a,b\n";
    for (const auto& r : run.archive_records()) {
        archive += csv_quote(r.expression) + "," + std::to_string(r.size) + "," + format_number(r.train_error) + "," +
                   format_number(r.test_error) + "," + format_number(r.a) + "," + format_number(r.b) + "\n";
    }

    const auto tag = std::to_string(repetition);
    write_file(out_dir / ("run_" + tag + ".csv"), rows);
    write_file(out_dir / ("archive_" + tag + ".csv"), archive);

    result.final_train_hv = run.history().back().train_hv;
    result.final_test_hv = run.history().back().test_hv;
    result.archive_size = run.archive().size();
    result.history = run.history();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

std::vector<RepetitionResult> run_experiment(const RunConfig& config, const fs::path& out_dir,
                                             const fs::path& data_dir, int jobs)
{
    validate(config);
    const auto raw = resolve_dataset(config.dataset, data_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "config.echo", to_config_text(config));

    const auto count = static_cast<std::size_t>(config.repetitions);
    std::vector<RepetitionResult> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = run_repetition(config, raw, static_cast<int>(i), out_dir);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(count)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::string aggregate = "repetition,seed,final_train_hv,final_test_hv,archive_size\n";
    std::string timing = "repetition,seconds\n";
    for (const auto& r : results) {
        aggregate += std::to_string(r.repetition) + "," + std::to_string(r.seed) + "," + format_number(r.final_train_hv) +
                     "," + format_number(r.final_test_hv) + "," + std::to_string(r.archive_size) + "\n";
        timing += std::to_string(r.repetition) + "," + format_number(r.seconds) + "\n";
    }
    write_file(out_dir / "aggregate.csv", aggregate);
    write_file(out_dir / "timing.csv", timing);
    return results;
}

namespace {

struct LoadedRun {
    RunConfig config;
    std::vector<double> train_hv;
    std::vector<double> test_hv;
};

LoadedRun load_run_dir(const fs::path& dir)
{
    LoadedRun run;
    run.config = load_config(dir / "config.echo");
    std::istringstream in(read_file(dir / "aggregate.csv"));
    std::string line;
    std::getline(in, line);
    if (trim(line) != "repetition,seed,final_train_hv,final_test_hv,archive_size") {
        throw std::runtime_error("unexpected aggregate header in " + dir.string());
    }
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        for (std::string f; std::getline(ls, f, ',');) fields.push_back(trim(f));
        if (fields.size() != 5) {
            throw std::runtime_error("malformed aggregate row in " + dir.string());
        }
        run.train_hv.push_back(parse_real("final_train_hv", fields[2]));
        run.test_hv.push_back(parse_real("final_test_hv", fields[3]));
    }
    return run;
}

bool same_budget(const RunConfig& a, const RunConfig& b)
{
    return a.population_size == b.population_size && a.generations == b.generations &&
           a.tournament_size == b.tournament_size && a.crossover_prob == b.crossover_prob &&
           a.repetitions == b.repetitions;
}

} // namespace

std::string compare_runs(const std::vector<fs::path>& run_dirs, const CompareOptions& options)
{
    if (run_dirs.empty()) {
        throw std::invalid_argument("no run directories to compare");
    }
    if (options.metric != "train" && options.metric != "test") {
        throw ConfigError("metric must be 'train' or 'test'");
    }
    std::vector<std::string> datasets;
    std::vector<std::string> algorithms;
    std::map<std::pair<std::string, std::string>, LoadedRun> runs;
    std::optional<RunConfig> budget;
    for (const auto& dir : run_dirs) {
        auto run = load_run_dir(dir);
        if (budget && !same_budget(*budget, run.config)) {
            throw ConfigError("mismatched budgets: " + dir.string() + " differs from " + run_dirs.front().string());
        }
        budget = run.config;
        const std::string name(algorithm_name(run.config.algorithm));
        const auto key = std::make_pair(run.config.dataset, name);
        if (runs.count(key) != 0) {
            throw ConfigError("duplicate runs for " + key.first + "/" + key.second);
        }
        if (std::find(datasets.begin(), datasets.end(), key.first) == datasets.end()) datasets.push_back(key.first);
        if (std::find(algorithms.begin(), algorithms.end(), name) == algorithms.end()) algorithms.push_back(name);
        runs.emplace(key, std::move(run));
    }
    // Reference column first, then the remaining algorithms in canonical order.
    std::stable_sort(algorithms.begin(), algorithms.end(), [&](const std::string& x, const std::string& y) {
        auto order = [&](const std::string& n) {
            if (n == options.reference) return -1;
            return static_cast<int>(*parse_algorithm(n));
        };
        return order(x) < order(y);
    });
    const std::size_t family = options.family_size != 0 ? options.family_size : datasets.size();

    std::string out = "dataset";
    for (const auto& a : algorithms) out += "," + a;
    out += "\n";
    for (const auto& d : datasets) {
        std::vector<AlgorithmSamples> samples;
        for (const auto& a : algorithms) {
            const auto it = runs.find({d, a});
            if (it == runs.end()) continue;
            samples.push_back({a, options.metric == "train" ? it->second.train_hv : it->second.test_hv});
        }
        const bool has_reference = std::any_of(samples.begin(), samples.end(),
                                               [&](const AlgorithmSamples& s) { return s.name == options.reference; });
        std::vector<ComparisonCell> cells;
        if (has_reference) {
            cells = summarize_runs(samples, options.reference, options.family_alpha, family);
        } else {
            for (const auto& s : samples) cells.push_back({s.name, summarize(s.values), ' ', {}});
        }
        out += d;
        for (const auto& a : algorithms) {
            const auto it = std::find_if(cells.begin(), cells.end(), [&](const ComparisonCell& c) { return c.name == a; });
            out += ",";
            if (it != cells.end()) out += format_cell(*it);
        }
        out += "\n";
    }
    return out;
}

std::vector<EvolvabilitySnapshot> run_evolvability(const EvolvabilityOptions& options, const fs::path& out_dir,
                                                   const fs::path& data_dir)
{
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0, 1)");
    }
    if (options.lab.population_size < 2 || options.lab.runs_per_limit < 1 || options.lab.samples < 1 ||
        options.lab.generation_limits.empty()) {
        throw ConfigError("invalid evolvability settings");
    }
    for (int g : options.lab.generation_limits) {
        if (g < 0) throw ConfigError("generation limits must be non-negative");
    }
    const auto raw = resolve_dataset(options.dataset, data_dir);
    const auto data = prepare(raw, options.train_fraction, options.seed);
    fs::create_directories(out_dir);

    auto snapshots = run_evolvability_study(data, options.lab, options.seed);
    std::string buckets = "generation_limit,band,count,acc90_error\n";
    for (const auto& s : snapshots) {
        const auto tag = "_g" + std::to_string(s.generation_limit);
        write_file(out_dir / ("crossover" + tag + ".csv"), matrix_csv(s.crossover));
        write_file(out_dir / ("crossover" + tag + "_normalized.csv"), matrix_csv(normalize_min_max(s.crossover)));
        write_file(out_dir / ("mutation" + tag + ".csv"), matrix_csv(s.mutation));
        write_file(out_dir / ("mutation" + tag + "_normalized.csv"), matrix_csv(normalize_min_max(s.mutation)));

        // Single-column view of the per-parent average, normalized like the matrices.
        EvolvabilityMatrix marginal;
        marginal.row_labels = s.crossover.row_labels;
        marginal.col_labels = {"average"};
        for (const auto& v : marginal_evolvability(s.crossover, s.mutation)) marginal.cells.push_back({v});
        const bool any = std::any_of(marginal.cells.begin(), marginal.cells.end(),
                                     [](const auto& row) { return row.front().has_value(); });
        write_file(out_dir / ("marginal" + tag + ".csv"), matrix_csv(any ? normalize_min_max(marginal) : marginal));

        for (std::size_t b = 0; b < s.bucket_sizes.size(); ++b) {
            buckets += std::to_string(s.generation_limit) + "," + options.lab.bands.label(b) + "," +
                       std::to_string(s.bucket_sizes[b]) + "," + format_number(s.acc90_error) + "\n";
        }
    }
    write_file(out_dir / "buckets.csv", buckets);

    EngineConfig trace;
    trace.algorithm = options.trace_algorithm;
    trace.population_size = options.trace_population;
    trace.tournament_size = options.lab.tournament_size;
    trace.crossover_prob = options.lab.crossover_prob;
    trace.generations = options.trace_generations;
    Run run(trace, data, options.seed);
    run.run_to_completion();
    write_file(out_dir / "proportions.csv", proportions_csv(size_proportion_trace(run.history(), options.lab.bands),
                                                            options.lab.bands));
    return snapshots;
}

} // namespace evosr
