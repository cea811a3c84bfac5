#include "evosr/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evosr {

namespace {
constexpr double kMinPredictionVariance = 1e-12;
}

double mean(std::span<const double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(v.size());
}

ScaledModel linear_scaled_mse(std::span<const double> predictions, std::span<const double> targets)
{
    const std::size_t n = targets.size();
    const double y_mean = mean(targets);
    const double y_var = variance(targets);
    const ScaledModel fallback{y_mean, 0.0, y_var};

    if (predictions.size() != n || n == 0) {
        return fallback;
    }
    double p_mean = 0.0;
    for (double p : predictions) {
        if (!std::isfinite(p)) {
            return fallback;
        }
        p_mean += p;
    }
    p_mean /= static_cast<double>(n);

    double cov = 0.0;
    double p_var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dp = predictions[i] - p_mean;
        cov += dp * (targets[i] - y_mean);
        p_var += dp * dp;
    }
    cov /= static_cast<double>(n);
    p_var /= static_cast<double>(n);
    if (!(p_var > kMinPredictionVariance) || !std::isfinite(p_var) || !std::isfinite(cov)) {
        return fallback;
    }

    ScaledModel m;
    m.b = cov / p_var;
    m.a = y_mean - m.b * p_mean;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = targets[i] - (m.a + m.b * predictions[i]);
        sse += r * r;
    }
    m.mse = sse / static_cast<double>(n);
    if (!std::isfinite(m.mse) || !std::isfinite(m.a) || !std::isfinite(m.b)) {
        return fallback;
    }
    // Rounding can push the fit a hair above the mean predictor.
    m.mse = std::min(m.mse, y_var);
    return m;
}

Evaluation evaluate_objectives(const ExpressionTree& tree, const Partition& train)
{
    thread_local Evaluator evaluator;
    thread_local std::vector<double> predictions;
    evaluator.evaluate_into(tree, train.X, predictions);

    Evaluation out;
    out.model = linear_scaled_mse(predictions, train.y);
    const double y_var = variance(train.y);
    out.objectives.error = y_var > 0.0 ? std::clamp(out.model.mse / y_var, 0.0, 1.0) : 0.0;
    out.objectives.size_norm = static_cast<double>(tree.size()) / kMaxTreeSize;
    return out;
}

double test_error(const ExpressionTree& tree, const ScaledModel& model, const Partition& test, double train_variance)
{
    if (test.rows() == 0) {
        return 0.0;
    }
    const auto predictions = evaluate(tree, test.X);
    double sse = 0.0;
    for (std::size_t i = 0; i < test.rows(); ++i) {
        const double r = test.y[i] - (model.a + model.b * predictions[i]);
        sse += r * r;
    }
    const double mse = sse / static_cast<double>(test.rows());
    if (!std::isfinite(mse)) {
        return kReferenceCoordinate;
    }
    const double normalized = train_variance > 0.0 ? mse / train_variance : (mse > 0.0 ? kReferenceCoordinate : 0.0);
    return std::clamp(normalized, 0.0, kReferenceCoordinate);
}

} // namespace evosr
