#include "evosr/truncation.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <unordered_map>

namespace evosr {

BoundTable BoundTable::uniform(int max_size, double bound)
{
    return BoundTable(std::vector<double>(static_cast<std::size_t>(std::max(0, max_size)), bound));
}

double BoundTable::sum() const noexcept
{
    return std::accumulate(bounds_.begin(), bounds_.end(), 0.0);
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<long>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<long>(mid));
    return 0.5 * (lower + upper);
}

SuccessRatios success_ratios(std::span<const Individual> parents, std::span<const Individual> offspring)
{
    if (parents.empty()) {
        throw ContractError("bound table needs a non-empty parent population");
    }
    SuccessRatios out;
    std::vector<double> errors;
    errors.reserve(parents.size());
    for (const auto& p : parents) {
        out.max_size = std::max(out.max_size, p.size());
        errors.push_back(p.error());
    }
    for (const auto& o : offspring) {
        out.max_size = std::max(out.max_size, o.size());
    }
    out.median_error = median(std::move(errors));

    const auto slots = static_cast<std::size_t>(out.max_size);
    out.attempts.assign(slots, 0);
    out.successes.assign(slots, 0);
    for (const auto& o : offspring) {
        if (!o.parent_size) {
            throw ContractError("offspring without a recorded parent size");
        }
        const int s = *o.parent_size;
        if (s < 1 || s > out.max_size) {
            throw ContractError("parent size outside the population size range");
        }
        const auto k = static_cast<std::size_t>(s - 1);
        ++out.attempts[k];
        if (o.error() < out.median_error) {
            ++out.successes[k];
        }
    }
    out.ratio.assign(slots, std::nullopt);
    for (std::size_t k = 0; k < slots; ++k) {
        if (out.attempts[k] != 0) {
            out.ratio[k] = static_cast<double>(out.successes[k]) / out.attempts[k];
        }
    }
    return out;
}

std::vector<double> fill_missing_sizes(const std::vector<std::optional<double>>& ratios)
{
    const std::size_t n = ratios.size();
    std::vector<double> out(n, 0.0);
    std::vector<std::size_t> observed;
    for (std::size_t k = 0; k < n; ++k) {
        if (ratios[k]) {
            observed.push_back(k);
            out[k] = *ratios[k];
        }
    }
    if (observed.empty()) {
        return out;
    }
    for (std::size_t k = 0; k < observed.front(); ++k) {
        out[k] = out[observed.front()];
    }
    for (std::size_t k = observed.back() + 1; k < n; ++k) {
        out[k] = out[observed.back()];
    }
    for (std::size_t j = 0; j + 1 < observed.size(); ++j) {
        const std::size_t lo = observed[j];
        const std::size_t hi = observed[j + 1];
        for (std::size_t k = lo + 1; k < hi; ++k) {
            const double t = static_cast<double>(k - lo) / static_cast<double>(hi - lo);
            out[k] = (1.0 - t) * out[lo] + t * out[hi];
        }
    }
    return out;
}

BoundTable normalize_bounds(const std::vector<double>& ratios, double total)
{
    const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
    std::vector<double> out(ratios.size());
    if (!(sum > 0.0)) {
        std::fill(out.begin(), out.end(), ratios.empty() ? 0.0 : total / static_cast<double>(ratios.size()));
        return BoundTable(std::move(out));
    }
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        out[k] = ratios[k] * total / sum;
    }
    return BoundTable(std::move(out));
}

BoundTable build_bounds(std::span<const Individual> parents, std::span<const Individual> offspring)
{
    const auto ratios = success_ratios(parents, offspring);
    return normalize_bounds(fill_missing_sizes(ratios.ratio), static_cast<double>(parents.size()));
}

std::vector<std::size_t> nsga2_truncation(std::span<const int> rank, std::span<const double> crowding,
                                          std::size_t target)
{
    const std::size_t n = rank.size();
    target = std::min(target, n);
    int fronts = 0;
    for (int r : rank) {
        fronts = std::max(fronts, r);
    }
    std::vector<std::vector<std::size_t>> by_rank(static_cast<std::size_t>(fronts) + 1);
    for (std::size_t i = 0; i < n; ++i) {
        by_rank[static_cast<std::size_t>(rank[i])].push_back(i);
    }

    std::vector<std::size_t> selected;
    selected.reserve(target);
    for (auto& front : by_rank) {
        if (selected.size() == target) {
            break;
        }
        if (selected.size() + front.size() <= target) {
            selected.insert(selected.end(), front.begin(), front.end());
            continue;
        }
        std::stable_sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) { return crowding[a] > crowding[b]; });
        selected.insert(selected.end(), front.begin(), front.begin() + static_cast<long>(target - selected.size()));
    }

    // Report in priority order.
    std::sort(selected.begin(), selected.end());
    std::vector<int> r(selected.size());
    std::vector<double> c(selected.size());
    for (std::size_t k = 0; k < selected.size(); ++k) {
        r[k] = rank[selected[k]];
        c[k] = crowding[selected[k]];
    }
    const auto order = priority_order(r, c);
    std::vector<std::size_t> out(selected.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        out[k] = selected[order[k]];
    }
    return out;
}

std::vector<std::size_t> evo_truncation(std::span<const int> rank, std::span<const double> crowding,
                                        std::span<const int> sizes, const BoundTable& bounds, std::size_t target)
{
    const std::size_t n = rank.size();
    target = std::min(target, n);
    const auto order = priority_order(rank, crowding);
    std::vector<bool> taken(n, false);
    std::size_t count = 0;

    int largest = bounds.max_size();
    for (int s : sizes) {
        largest = std::max(largest, s);
    }
    std::vector<int> copied(static_cast<std::size_t>(largest) + 1, 0);

    while (count < target) {
        std::fill(copied.begin(), copied.end(), 0);
        std::size_t added = 0;
        for (auto i : order) {
            if (count == target) {
                break;
            }
            if (taken[i]) {
                continue;
            }
            const int s = sizes[i];
            if (static_cast<double>(copied[static_cast<std::size_t>(s)]) < bounds[s]) {
                taken[i] = true;
                ++copied[static_cast<std::size_t>(s)];
                ++count;
                ++added;
            }
        }
        if (added == 0) {
            for (auto i : order) {
                if (count == target) {
                    break;
                }
                if (!taken[i]) {
                    taken[i] = true;
                    ++count;
                }
            }
        }
    }

    std::vector<std::size_t> out;
    out.reserve(target);
    for (auto i : order) {
        if (taken[i]) {
            out.push_back(i);
        }
    }
    return out;
}

namespace {

struct TreeHash {
    std::size_t operator()(const ExpressionTree* t) const noexcept
    {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (const auto& n : t->nodes()) {
            std::uint64_t bits = 0;
            static_assert(sizeof bits == sizeof n.value);
            std::memcpy(&bits, &n.value, sizeof bits);
            h = mix64(h ^ (static_cast<std::uint64_t>(n.op) << 32U) ^ n.var) ^ bits;
        }
        return static_cast<std::size_t>(h);
    }
};

struct TreeEq {
    bool operator()(const ExpressionTree* a, const ExpressionTree* b) const noexcept { return *a == *b; }
};

} // namespace

DuplicateAdjustment pd_rank_adjust(std::span<const ExpressionTree> trees, const FrontPartition& partition)
{
    const std::size_t n = trees.size();
    DuplicateAdjustment out;
    out.demoted.assign(n, false);
    std::unordered_map<const ExpressionTree*, std::size_t, TreeHash, TreeEq> first_seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (!first_seen.emplace(&trees[i], i).second) {
            out.demoted[i] = true;
        }
    }

    out.partition.rank = partition.rank;
    std::vector<std::size_t> worst;
    for (const auto& front : partition.fronts) {
        std::vector<std::size_t> kept;
        for (auto i : front) {
            (out.demoted[i] ? worst : kept).push_back(i);
        }
        if (!kept.empty()) {
            out.partition.fronts.push_back(std::move(kept));
        }
    }
    // Ranks are renumbered contiguously; demotion can empty a front.
    for (std::size_t f = 0; f < out.partition.fronts.size(); ++f) {
        for (auto i : out.partition.fronts[f]) {
            out.partition.rank[i] = static_cast<int>(f) + 1;
        }
    }
    if (!worst.empty()) {
        std::sort(worst.begin(), worst.end());
        const int worst_rank = static_cast<int>(partition.count()) + 1;
        for (auto i : worst) {
            out.partition.rank[i] = worst_rank;
        }
        out.partition.fronts.push_back(std::move(worst));
    }
    return out;
}

} // namespace evosr
