#pragma once

#include "evosr/matrix.hpp"
#include "evosr/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace evosr {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RawDataset {
    std::string name;
    Matrix X;
    std::vector<double> y;

    [[nodiscard]] std::size_t rows() const noexcept { return y.size(); }
    [[nodiscard]] std::size_t features() const noexcept { return X.cols(); }
};

struct Partition {
    Matrix X;
    std::vector<double> y;

    [[nodiscard]] std::size_t rows() const noexcept { return y.size(); }
};

struct RowSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct SplitStandardizedDataset {
    std::string name;
    Partition train;
    Partition test;
    std::vector<double> feature_means;
    std::vector<double> feature_stds;
    double target_mean = 0.0;
    double target_std = 1.0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t features() const noexcept { return train.X.cols(); }
};

// Comma-separated, one header row, last column is the target.
RawDataset load_csv(const std::filesystem::path& path);

// Uniform random partition with floor(fraction * n) training rows.
RowSplit split(const RawDataset& raw, double train_fraction, Rng& rng);

// Fits mean / population std on the training rows only and applies them to
// both sides. Zero-variance columns become all zeros.
SplitStandardizedDataset standardize(const RawDataset& raw, const RowSplit& rows);

// split + standardize, with the split stream derived from `seed`.
SplitStandardizedDataset prepare(const RawDataset& raw, double train_fraction, std::uint64_t seed);

// Sum of random smooth feature interactions plus gaussian noise.
RawDataset make_synthetic(std::size_t rows, std::size_t features, double noise, std::uint64_t seed);

// Stand-in for the UCI airfoil self-noise table: 1503 rows over the same five
// inputs (frequency, angle of attack, chord, velocity, displacement thickness)
// with a sound-pressure target from a semi-empirical trailing-edge noise model.
RawDataset make_airfoil_like(std::uint64_t seed = 1503);

// Resolves a dataset name: <dir>/<name>.csv first, then the built-in
// generators "synthetic" and "airfoil_like". Throws DataError when unknown.
RawDataset resolve_dataset(const std::string& name, const std::filesystem::path& dir);

// EVOSR_DATA_DIR if set, else "data".
std::filesystem::path default_data_dir();

} // namespace evosr
