#include "evosr/engine.hpp"

#include "evosr/hypervolume.hpp"
#include "evosr/spea2.hpp"

#include <cmath>

namespace evosr {

std::string_view algorithm_name(Algorithm a) noexcept
{
    switch (a) {
    case Algorithm::Nsga2: return "nsga2";
    case Algorithm::EvoNsga2: return "evonsga2";
    case Algorithm::Nsga2Pd: return "nsga2pd";
    case Algorithm::Spea2: return "spea2";
    case Algorithm::AlphaLinear: return "alpha-lin";
    case Algorithm::AlphaCosine: return "alpha-cos";
    case Algorithm::AlphaSigmoid: return "alpha-sig";
    case Algorithm::AlphaAdaptive: return "alpha-adaptive";
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept
{
    for (auto a : kAllAlgorithms) {
        if (algorithm_name(a) == name) {
            return a;
        }
    }
    return std::nullopt;
}

bool uses_alpha(Algorithm a) noexcept
{
    return a == Algorithm::AlphaLinear || a == Algorithm::AlphaCosine || a == Algorithm::AlphaSigmoid ||
           a == Algorithm::AlphaAdaptive;
}

namespace {

AlphaSchedule schedule_of(Algorithm a)
{
    switch (a) {
    case Algorithm::AlphaCosine: return AlphaSchedule::Cosine;
    case Algorithm::AlphaSigmoid: return AlphaSchedule::Sigmoid;
    case Algorithm::AlphaAdaptive: return AlphaSchedule::Adaptive;
    default: return AlphaSchedule::Linear;
    }
}

} // namespace

Run::Run(EngineConfig config, const SplitStandardizedDataset& data, std::uint64_t seed)
    : config_(std::move(config)),
      data_(&data),
      seed_(seed),
      train_variance_(variance(data.train.y)),
      primitives_(PrimitiveSet::for_features(data.train.X))
{
    alpha_.schedule = schedule_of(config_.algorithm);
    alpha_.horizon = std::max(1, config_.generations);
    alpha_.step = config_.alpha_step;

    Rng rng(derive_seed(seed_, "init"));
    population_ = ramped_half_and_half(config_.population_size, primitives_, rng, config_.limits);
    evaluate_and_archive(population_);

    if (config_.algorithm == Algorithm::Spea2) {
        std::vector<ObjectiveVector> points;
        for (const auto& ind : population_) points.push_back(ind.objectives);
        const auto fit = spea2_fitness(points);
        const auto keep = spea2_environmental_selection(points, fit.fitness, config_.population_size);
        std::vector<Individual> next;
        for (auto i : keep) {
            next.push_back(std::move(population_[i]));
            spea2_fitness_.push_back(fit.fitness[i]);
        }
        population_ = std::move(next);
    } else {
        assign_rank_crowding(population_);
    }
    record_metrics();
}

double Run::current_alpha() const
{
    if (!uses_alpha(config_.algorithm)) {
        return 0.0;
    }
    if (config_.alpha_override) {
        return *config_.alpha_override;
    }
    return alpha_value(alpha_);
}

void Run::evaluate_and_archive(std::vector<Individual>& individuals)
{
    for (auto& ind : individuals) {
        evaluate(ind, data_->train);
        if (archive_.insert(ind)) {
            archive_.newest().test_error = test_error(ind.tree, ind.model, data_->test, train_variance_);
        }
    }
}

void Run::assign_rank_crowding(std::vector<Individual>& pop) const
{
    const double alpha = current_alpha();
    std::vector<ObjectiveVector> points;
    points.reserve(pop.size());
    for (const auto& ind : pop) {
        points.push_back(uses_alpha(config_.algorithm) ? alpha_transform(ind.objectives, alpha) : ind.objectives);
    }
    auto partition = fast_non_dominated_sort(points);
    std::vector<bool> demoted(pop.size(), false);
    if (config_.algorithm == Algorithm::Nsga2Pd) {
        std::vector<ExpressionTree> trees;
        trees.reserve(pop.size());
        for (const auto& ind : pop) trees.push_back(ind.tree);
        auto adjusted = pd_rank_adjust(trees, partition);
        partition = std::move(adjusted.partition);
        demoted = std::move(adjusted.demoted);
    }
    const auto crowding = crowding_all(points, partition);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].rank = partition.rank[i];
        pop[i].crowding = demoted[i] ? 0.0 : crowding[i];
    }
}

const GenerationMetrics& Run::step()
{
    ++generation_;
    alpha_.generation = generation_;
    const auto stream = derive_seed(seed_, "generation", static_cast<std::uint64_t>(generation_));
    const std::size_t n = config_.population_size;

    ParentSelector select;
    if (config_.algorithm == Algorithm::Spea2) {
        // Binary tournament on SPEA2 fitness (lower is better).
        select = [this](Rng& rng) -> const Individual& {
            const std::size_t a = rng.index(population_.size());
            const std::size_t b = rng.index(population_.size());
            if (spea2_fitness_[a] != spea2_fitness_[b]) {
                return population_[spea2_fitness_[a] < spea2_fitness_[b] ? a : b];
            }
            return population_[rng.bernoulli(0.5) ? a : b];
        };
    } else {
        select = tournament_selector(population_, config_.tournament_size);
    }
    auto offspring = make_offspring_population(select, n, config_.crossover_prob, primitives_, stream, config_.limits);
    evaluate_and_archive(offspring);

    if (config_.algorithm == Algorithm::AlphaAdaptive && !config_.alpha_override) {
        alpha_ = alpha_adapt(alpha_, population_);
    }
    if (config_.algorithm == Algorithm::Spea2) {
        spea2_step(std::move(offspring));
    } else {
        nsga_family_step(std::move(offspring));
    }
    record_metrics();
    return history_.back();
}

void Run::nsga_family_step(std::vector<Individual> offspring)
{
    const std::size_t n = config_.population_size;
    std::vector<Individual> merged = std::move(population_);
    const std::size_t parents = merged.size();
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    assign_rank_crowding(merged);

    std::vector<int> rank(merged.size());
    std::vector<double> crowding(merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        rank[i] = merged[i].rank;
        crowding[i] = merged[i].crowding;
    }

    std::vector<std::size_t> keep;
    if (config_.algorithm == Algorithm::EvoNsga2) {
        const std::span<const Individual> all(merged);
        std::vector<int> sizes(merged.size());
        int largest = 0;
        for (std::size_t i = 0; i < merged.size(); ++i) {
            sizes[i] = merged[i].size();
            largest = std::max(largest, sizes[i]);
        }
        last_bounds_ = config_.uniform_bound_override
                           ? BoundTable::uniform(largest, *config_.uniform_bound_override)
                           : build_bounds(all.first(parents), all.subspan(parents));
        keep = evo_truncation(rank, crowding, sizes, *last_bounds_, n);
    } else {
        keep = nsga2_truncation(rank, crowding, n);
    }

    population_.clear();
    population_.reserve(keep.size());
    for (auto i : keep) {
        population_.push_back(std::move(merged[i]));
    }
}

void Run::spea2_step(std::vector<Individual> offspring)
{
    std::vector<Individual> merged = std::move(population_);
    merged.insert(merged.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    std::vector<ObjectiveVector> points;
    points.reserve(merged.size());
    for (const auto& ind : merged) points.push_back(ind.objectives);
    const auto fit = spea2_fitness(points);
    const auto keep = spea2_environmental_selection(points, fit.fitness, config_.population_size);
    population_.clear();
    spea2_fitness_.clear();
    for (auto i : keep) {
        population_.push_back(std::move(merged[i]));
        spea2_fitness_.push_back(fit.fitness[i]);
    }
}

double Run::train_hypervolume() const
{
    return hypervolume_2d(archive_.points());
}

double Run::test_hypervolume() const
{
    std::vector<ObjectiveVector> points;
    for (const auto& e : archive_.entries()) {
        points.push_back(ObjectiveVector{e.test_error, e.objectives.size_norm});
    }
    return hypervolume_2d(points);
}

void Run::record_metrics()
{
    GenerationMetrics m;
    m.generation = generation_;
    m.train_hv = train_hypervolume();
    m.test_hv = test_hypervolume();
    m.size_counts.assign(static_cast<std::size_t>(config_.limits.max_size) + 1, 0);
    for (const auto& ind : population_) {
        ++m.size_counts[static_cast<std::size_t>(std::min(ind.size(), config_.limits.max_size))];
    }
    m.alpha = uses_alpha(config_.algorithm) ? current_alpha() : std::nan("");
    m.archive_size = archive_.size();
    history_.push_back(std::move(m));
}

void Run::run_to_completion()
{
    while (generation_ < config_.generations) {
        step();
    }
}

std::vector<ArchiveRecord> Run::archive_records() const
{
    std::vector<ArchiveRecord> out;
    for (const auto& e : archive_.entries()) {
        out.push_back(ArchiveRecord{e.text, e.tree.size(), e.objectives.error, e.test_error, e.model.a, e.model.b});
    }
    std::sort(out.begin(), out.end(), [](const ArchiveRecord& x, const ArchiveRecord& y) {
        return x.size != y.size ? x.size < y.size : x.expression < y.expression;
    });
    return out;
}

} // namespace evosr
