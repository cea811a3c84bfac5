#include "evosr/evolvability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evosr {

SizeBands::SizeBands(std::vector<std::pair<int, int>> bands) : bands_(std::move(bands))
{
    if (bands_.empty()) {
        throw std::invalid_argument("size bands must not be empty");
    }
    int expected = 1;
    for (const auto& [lo, hi] : bands_) {
        if (lo != expected || hi < lo) {
            throw std::invalid_argument("size bands must be contiguous intervals starting at 1");
        }
        expected = hi + 1;
    }
}

SizeBands SizeBands::exponential(int max_size)
{
    std::vector<std::pair<int, int>> bands;
    for (int lo = 1; lo <= max_size; lo *= 2) {
        const int hi = std::min(2 * lo - 1, max_size);
        bands.emplace_back(lo, hi);
    }
    // Fold a short tail into the previous band: {64-100} rather than {64-127}.
    if (bands.size() >= 2 && bands.back().second - bands.back().first + 1 < bands.back().first / 2) {
        bands[bands.size() - 2].second = bands.back().second;
        bands.pop_back();
    }
    bands.back().second = max_size;
    return SizeBands(std::move(bands));
}

std::size_t SizeBands::band_of(int size) const
{
    for (std::size_t i = 0; i < bands_.size(); ++i) {
        if (size >= bands_[i].first && size <= bands_[i].second) {
            return i;
        }
    }
    throw std::out_of_range("size " + std::to_string(size) + " outside the size bands");
}

std::string SizeBands::label(std::size_t i) const
{
    const auto& [lo, hi] = bands_.at(i);
    return lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
}

std::vector<int> SizeBands::upper_edges() const
{
    std::vector<int> out;
    for (const auto& b : bands_) out.push_back(b.second);
    return out;
}

namespace {

const Individual& better(const Individual& a, const Individual& b)
{
    if (a.error() != b.error()) {
        return a.error() < b.error() ? a : b;
    }
    return b.size() < a.size() ? b : a;
}

} // namespace

std::vector<Individual> run_size_capped_gp(const SplitStandardizedDataset& data, const LabConfig& config, int max_size,
                                           const std::vector<int>& snapshots, std::uint64_t seed)
{
    if (max_size < 1 || max_size > kMaxTreeSize) {
        throw std::invalid_argument("size limit must lie in 1..100");
    }
    const auto primitives = PrimitiveSet::for_features(data.train.X);
    VariationLimits limits;
    limits.max_size = max_size;

    Rng init(derive_seed(seed, "init"));
    auto population = ramped_half_and_half(config.population_size, primitives, init, limits);
    for (auto& ind : population) evaluate(ind, data.train);
    Individual best = population.front();
    for (const auto& ind : population) best = better(best, ind);

    std::vector<Individual> out;
    const int horizon = snapshots.empty() ? 0 : *std::max_element(snapshots.begin(), snapshots.end());
    auto snapshot = [&](int generation) {
        for (int s : snapshots) {
            if (s == generation) out.push_back(best);
        }
    };
    snapshot(0);

    const int k = std::max(1, config.tournament_size);
    for (int g = 1; g <= horizon; ++g) {
        ParentSelector select = [&population, k](Rng& rng) -> const Individual& {
            const Individual* winner = &population[rng.index(population.size())];
            for (int i = 1; i < k; ++i) {
                const Individual& other = population[rng.index(population.size())];
                if (other.error() < winner->error() || (other.error() == winner->error() && rng.bernoulli(0.5))) {
                    winner = &other;
                }
            }
            return *winner;
        };
        auto next = make_offspring_population(select, config.population_size, config.crossover_prob, primitives,
                                              derive_seed(seed, "generation", static_cast<std::uint64_t>(g)), limits);
        for (auto& ind : next) {
            evaluate(ind, data.train);
            best = better(best, ind);
        }
        population = std::move(next);
        snapshot(g);
    }
    return out;
}

Individual run_size_capped_gp(const SplitStandardizedDataset& data, const LabConfig& config, int max_size,
                              int generations, std::uint64_t seed)
{
    return run_size_capped_gp(data, config, max_size, std::vector<int>{generations}, seed).front();
}

double nearest_rank_percentile(std::vector<double> values, double p)
{
    if (values.empty()) {
        throw std::invalid_argument("percentile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
    return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

Collection collect_and_bucket(std::vector<Individual> solutions, const SizeBands& bands)
{
    if (solutions.empty()) {
        throw std::invalid_argument("no collected solutions");
    }
    Collection out;
    out.buckets.resize(bands.count());
    std::vector<double> errors;
    for (auto& s : solutions) {
        errors.push_back(s.error());
        out.buckets[bands.band_of(s.size())].push_back(std::move(s));
    }
    // 90th percentile of accuracy = 10th percentile of error.
    out.acc90_error = nearest_rank_percentile(std::move(errors), 10.0);
    return out;
}

EvolvabilityMatrix estimate_frequencies(const Collection& collection, const SizeBands& bands, Operator op,
                                        int samples, const SplitStandardizedDataset& data, std::uint64_t seed)
{
    const auto primitives = PrimitiveSet::for_features(data.train.X);
    const std::size_t n = bands.count();
    EvolvabilityMatrix m;
    for (std::size_t i = 0; i < n; ++i) m.row_labels.push_back(bands.label(i));
    if (op == Operator::Crossover) {
        m.col_labels = m.row_labels;
    } else {
        m.col_labels = {"mutation"};
    }
    m.cells.assign(n, std::vector<std::optional<double>>(m.col_labels.size()));
    const std::string_view purpose = op == Operator::Crossover ? "crossover" : "mutation";

    for (std::size_t r = 0; r < n; ++r) {
        const auto& parents = collection.buckets[r];
        if (parents.empty()) continue;
        for (std::size_t c = 0; c < m.col_labels.size(); ++c) {
            const auto* donors = op == Operator::Crossover ? &collection.buckets[c] : nullptr;
            if (donors != nullptr && donors->empty()) continue;
            int successes = 0;
            for (int k = 0; k < samples; ++k) {
                Rng rng(derive_seed(seed, purpose, (r * 64 + c) * 1'000'000 + static_cast<std::uint64_t>(k)));
                const Individual& parent = parents[rng.index(parents.size())];
                Individual child = donors != nullptr
                                       ? subtree_crossover(parent, (*donors)[rng.index(donors->size())], rng)
                                       : subtree_mutation(parent, primitives, rng);
                evaluate(child, data.train);
                successes += child.error() < collection.acc90_error ? 1 : 0;
            }
            m.cells[r][c] = samples > 0 ? static_cast<double>(successes) / samples : 0.0;
        }
    }
    return m;
}

EvolvabilityMatrix normalize_min_max(const EvolvabilityMatrix& matrix)
{
    double lo = kInfinity;
    double hi = -kInfinity;
    for (const auto& row : matrix.cells) {
        for (const auto& cell : row) {
            if (cell) {
                lo = std::min(lo, *cell);
                hi = std::max(hi, *cell);
            }
        }
    }
    EvolvabilityMatrix out = matrix;
    for (auto& row : out.cells) {
        for (auto& cell : row) {
            if (cell) {
                cell = hi > lo ? (*cell - lo) / (hi - lo) : 0.0;
            }
        }
    }
    return out;
}

std::vector<std::optional<double>> marginal_evolvability(const EvolvabilityMatrix& crossover,
                                                         const EvolvabilityMatrix& mutation)
{
    std::vector<std::optional<double>> out(crossover.cells.size());
    for (std::size_t r = 0; r < crossover.cells.size(); ++r) {
        double sum = 0.0;
        int present = 0;
        for (const auto& cell : crossover.cells[r]) {
            if (cell) {
                sum += *cell;
                ++present;
            }
        }
        const auto& mut = mutation.cells.at(r).front();
        if (present == 0 || !mut) continue;
        out[r] = 0.5 * (sum / present + *mut);
    }
    return out;
}

std::vector<std::vector<double>> size_proportion_trace(const std::vector<GenerationMetrics>& history,
                                                       const SizeBands& bands)
{
    std::vector<std::vector<double>> out;
    for (const auto& m : history) {
        std::vector<double> row(bands.count(), 0.0);
        double total = 0.0;
        for (std::size_t s = 1; s < m.size_counts.size(); ++s) {
            if (m.size_counts[s] == 0) continue;
            row[bands.band_of(static_cast<int>(s))] += m.size_counts[s];
            total += m.size_counts[s];
        }
        if (total > 0.0) {
            for (auto& v : row) v /= total;
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<EvolvabilitySnapshot> run_evolvability_study(const SplitStandardizedDataset& data, const LabConfig& config,
                                                         std::uint64_t seed)
{
    auto limits = config.generation_limits;
    std::sort(limits.begin(), limits.end());
    limits.erase(std::unique(limits.begin(), limits.end()), limits.end());

    // collected[j]: solutions at generation limit j.
    std::vector<std::vector<Individual>> collected(limits.size());
    for (int cap : config.bands.upper_edges()) {
        for (int r = 0; r < config.runs_per_limit; ++r) {
            const auto run_seed = derive_seed(seed, "collect", static_cast<std::uint64_t>(cap) * 100'000 + static_cast<std::uint64_t>(r));
            auto best = run_size_capped_gp(data, config, cap, limits, run_seed);
            for (std::size_t j = 0; j < limits.size(); ++j) {
                collected[j].push_back(std::move(best[j]));
            }
        }
    }

    std::vector<EvolvabilitySnapshot> out;
    for (std::size_t j = 0; j < limits.size(); ++j) {
        EvolvabilitySnapshot snap;
        snap.generation_limit = limits[j];
        const auto collection = collect_and_bucket(std::move(collected[j]), config.bands);
        snap.acc90_error = collection.acc90_error;
        for (const auto& b : collection.buckets) snap.bucket_sizes.push_back(b.size());
        const auto estimate_seed = derive_seed(seed, "estimate", static_cast<std::uint64_t>(limits[j]));
        snap.crossover = estimate_frequencies(collection, config.bands, Operator::Crossover, config.samples, data, estimate_seed);
        snap.mutation = estimate_frequencies(collection, config.bands, Operator::Mutation, config.samples, data, estimate_seed);
        out.push_back(std::move(snap));
    }
    return out;
}

} // namespace evosr
