#pragma once

#include "evosr/data.hpp"
#include "evosr/expr.hpp"

#include <span>

namespace evosr {

inline constexpr double kReferenceCoordinate = 1.1;

// Both objectives are minimized. Lower error means higher accuracy.
struct ObjectiveVector {
    double error = 1.0;     // linear-scaled MSE / var(y_train)
    double size_norm = 1.0; // node count / 100

    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

// Prediction model a + b * f(x).
struct ScaledModel {
    double a = 0.0;
    double b = 0.0;
    double mse = 0.0;
};

struct Evaluation {
    ObjectiveVector objectives;
    ScaledModel model;
};

// Least-squares intercept and slope. Non-finite or (near-)constant
// predictions fall back to b = 0, a = mean(y), mse = var(y).
ScaledModel linear_scaled_mse(std::span<const double> predictions, std::span<const double> targets);

double mean(std::span<const double> v);
// Population variance (divisor n).
double variance(std::span<const double> v);

Evaluation evaluate_objectives(const ExpressionTree& tree, const Partition& train);

// Normalized by var(y_train), clamped to [0, 1.1].
double test_error(const ExpressionTree& tree, const ScaledModel& model, const Partition& test, double train_variance);

} // namespace evosr
