#include "evosr/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace evosr {

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col)
{
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    if (first == std::string::npos) {
        throw DataError("parse error: empty cell at row " + std::to_string(row) + ", column " + std::to_string(col));
    }
    const std::string trimmed = cell.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(trimmed.c_str(), &end);
    if (end != trimmed.c_str() + trimmed.size() || !std::isfinite(v)) {
        throw DataError("parse error: non-numeric cell '" + trimmed + "' at row " + std::to_string(row) +
                        ", column " + std::to_string(col));
    }
    return v;
}

} // namespace

RawDataset load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty dataset: " + path.string());
    }
    const std::size_t columns = split_fields(line).size();
    if (columns < 2) {
        throw DataError("dataset needs at least one feature and a target column: " + path.string());
    }

    // Rows are numbered from 1 for the first data line after the header.
    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != columns) {
            throw DataError("parse error: row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                            " columns, expected " + std::to_string(columns));
        }
        std::vector<double> values(columns);
        for (std::size_t c = 0; c < columns; ++c) {
            values[c] = parse_cell(fields[c], row, c + 1);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw DataError("empty dataset: " + path.string());
    }

    RawDataset ds;
    ds.name = path.stem().string();
    ds.X = Matrix(rows.size(), columns - 1);
    ds.y.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c + 1 < columns; ++c) {
            ds.X(r, c) = rows[r][c];
        }
        ds.y[r] = rows[r].back();
    }
    return ds;
}

RowSplit split(const RawDataset& raw, double train_fraction, Rng& rng)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw DataError("train fraction must lie in (0, 1)");
    }
    const std::size_t n = raw.rows();
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n) {
        throw DataError("split of " + std::to_string(n) + " rows would leave one side empty");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.index(i + 1)]);
    }
    RowSplit out;
    out.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
    out.test.assign(order.begin() + static_cast<long>(n_train), order.end());
    return out;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd population_stats(std::span<const double> values)
{
    MeanStd s;
    if (values.empty()) {
        return s;
    }
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.std = std::sqrt(ss / n);
    return s;
}

void apply(std::span<double> values, const MeanStd& s, bool constant)
{
    for (double& v : values) {
        v = constant ? 0.0 : (v - s.mean) / s.std;
    }
}

// Relative threshold: a column whose spread is pure rounding noise counts as constant.
bool is_constant(const MeanStd& s)
{
    return !(s.std > 1e-12 * std::max(1.0, std::abs(s.mean)));
}

} // namespace

SplitStandardizedDataset standardize(const RawDataset& raw, const RowSplit& rows)
{
    if (rows.train.empty()) {
        throw DataError("standardize requires a non-empty training partition");
    }
    SplitStandardizedDataset out;
    out.name = raw.name;
    out.train.X = raw.X.select_rows(rows.train);
    out.test.X = raw.X.select_rows(rows.test);
    for (auto r : rows.train) out.train.y.push_back(raw.y[r]);
    for (auto r : rows.test) out.test.y.push_back(raw.y[r]);

    for (std::size_t c = 0; c < raw.features(); ++c) {
        const auto s = population_stats(out.train.X.column(c));
        const bool constant = is_constant(s);
        out.feature_means.push_back(s.mean);
        out.feature_stds.push_back(constant ? 0.0 : s.std);
        apply(out.train.X.column(c), s, constant);
        apply(out.test.X.column(c), s, constant);
    }
    const auto ts = population_stats(out.train.y);
    const bool constant = is_constant(ts);
    out.target_mean = ts.mean;
    out.target_std = constant ? 0.0 : ts.std;
    apply(out.train.y, ts, constant);
    apply(out.test.y, ts, constant);
    return out;
}

SplitStandardizedDataset prepare(const RawDataset& raw, double train_fraction, std::uint64_t seed)
{
    Rng rng(derive_seed(seed, "split"));
    auto out = standardize(raw, split(raw, train_fraction, rng));
    out.seed = seed;
    return out;
}

RawDataset make_synthetic(std::size_t rows, std::size_t features, double noise, std::uint64_t seed)
{
    if (rows < 2 || features < 1) {
        throw DataError("synthetic dataset needs at least 2 rows and 1 feature");
    }
    Rng rng(derive_seed(seed, "synthetic"));
    RawDataset ds;
    ds.name = "synthetic";
    ds.X = Matrix(rows, features);
    for (std::size_t c = 0; c < features; ++c) {
        for (std::size_t r = 0; r < rows; ++r) {
            ds.X(r, c) = rng.uniform(-2.0, 2.0);
        }
    }

    struct Term {
        int kind;
        std::size_t i, j;
        double w;
    };
    std::vector<Term> terms;
    const std::size_t n_terms = 2 + features;
    for (std::size_t k = 0; k < n_terms; ++k) {
        terms.push_back(Term{static_cast<int>(rng.index(5)), rng.index(features), rng.index(features), rng.uniform(0.5, 2.0)});
    }
    ds.y.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double v = 0.0;
        for (const auto& t : terms) {
            const double a = ds.X(r, t.i);
            const double b = ds.X(r, t.j);
            switch (t.kind) {
            case 0: v += t.w * a * b; break;
            case 1: v += t.w * std::sin(a); break;
            case 2: v += t.w * a * a; break;
            case 3: v += t.w * std::exp(-a * a) * b; break;
            default: v += t.w * a / (1.0 + b * b); break;
            }
        }
        ds.y[r] = v + noise * rng.normal();
    }
    return ds;
}

namespace {

// Minimum-curve spectral shape of the trailing-edge noise model.
double spectral_shape(double a)
{
    a = std::abs(a);
    if (a < 0.204) {
        return std::sqrt(67.552 - 886.788 * a * a) - 8.219;
    }
    if (a < 0.244) {
        return -32.665 * a + 3.981;
    }
    return -142.795 * a * a * a + 103.656 * a * a - 57.757 * a + 6.006;
}

} // namespace

RawDataset make_airfoil_like(std::uint64_t seed)
{
    constexpr std::array<double, 21> freqs{200,  250,  315,  400,  500,  630,   800,   1000,  1250,  1600, 2000,
                                           2500, 3150, 4000, 5000, 6300, 8000, 10000, 12500, 16000, 20000};
    constexpr std::array<double, 27> angles{0.0, 1.5, 2.0, 2.7, 3.0,  3.3,  4.0,  4.2,  4.8,  5.3,  5.4,  6.7,  7.2, 7.3,
                                            8.4, 8.9, 9.5, 9.9, 11.2, 12.3, 12.6, 12.7, 15.4, 15.6, 17.4, 19.7, 22.2};
    constexpr std::array<double, 6> chords{0.0254, 0.0508, 0.1016, 0.1524, 0.2286, 0.3048};
    constexpr std::array<double, 4> speeds{31.7, 39.6, 55.5, 71.3};
    constexpr double kViscosity = 1.4529e-5;
    constexpr double kSoundSpeed = 340.46;
    constexpr double kSpan = 0.4572;
    constexpr double kObserver = 1.22;
    constexpr std::size_t kRows = 1503;

    Rng rng(derive_seed(seed, "airfoil_like"));
    RawDataset ds;
    ds.name = "airfoil_like";
    ds.X = Matrix(kRows, 5);
    ds.y.resize(kRows);
    for (std::size_t r = 0; r < kRows; ++r) {
        const double f = freqs[rng.index(freqs.size())];
        const double alpha = angles[rng.index(angles.size())];
        const double chord = chords[rng.index(chords.size())];
        const double u = speeds[rng.index(speeds.size())];

        const double rc = u * chord / kViscosity;
        const double lr = std::log10(rc);
        const double delta0 = chord * std::pow(10.0, 3.0187 - 1.5397 * lr + 0.1059 * lr * lr);
        const double growth = alpha <= 7.5 ? 0.0679 * alpha : 0.0679 * 7.5 + 0.12 * (alpha - 7.5);
        const double delta = delta0 * std::pow(10.0, growth);

        const double mach = u / kSoundSpeed;
        const double st1 = 0.02 * std::pow(mach, -0.6);
        const double st_peak =
            alpha <= 1.33 ? st1 : st1 * std::pow(10.0, 0.0054 * (std::min(alpha, 12.5) - 1.33) * (std::min(alpha, 12.5) - 1.33));
        const double st = f * delta / u;
        const double k1 = rc < 2.47e5 ? -4.31 * lr + 156.3 : (rc <= 8.0e5 ? -9.0 * lr + 181.6 : 128.5);

        const double spl = 10.0 * std::log10(delta * std::pow(mach, 5.0) * kSpan / (kObserver * kObserver)) +
                           spectral_shape(std::log10(st / st_peak)) + k1 - 3.0 + rng.normal(0.0, 1.0);

        ds.X(r, 0) = f;
        ds.X(r, 1) = alpha;
        ds.X(r, 2) = chord;
        ds.X(r, 3) = u;
        ds.X(r, 4) = std::round(delta * 1e7) / 1e7;
        ds.y[r] = spl;
    }
    return ds;
}

RawDataset resolve_dataset(const std::string& name, const std::filesystem::path& dir)
{
    const auto path = dir / (name + ".csv");
    if (std::filesystem::exists(path)) {
        return load_csv(path);
    }
    if (name == "synthetic") {
        return make_synthetic(400, 3, 0.05, 7);
    }
    if (name == "airfoil_like") {
        return make_airfoil_like();
    }
    throw DataError("unknown dataset '" + name + "' (looked for " + path.string() + ")");
}

std::filesystem::path default_data_dir()
{
    if (const char* env = std::getenv("EVOSR_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "data";
}

} // namespace evosr
