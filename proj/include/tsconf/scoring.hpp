#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tsconf/processes.hpp"

namespace tsconf {

/**
 * Nonconformity score with memory L. The context holds the L preceding
 * points, most recent first: eval(z, {z_{-1}, ..., z_{-L}}).
 *
 * Residual-style scores also expose the underlying point prediction via
 * predict, which is what makes an explicit y-interval available.
 */
struct ScoreFunction {
    int memory = 0;
    std::function<double(const DataPoint&, std::span<const DataPoint>)> eval;
    std::function<double(double, std::span<const DataPoint>)> predict;  // optional

    [[nodiscard]] bool is_residual() const { return static_cast<bool>(predict); }
};

/// Trains a score function from a training block (Z_1, ..., Z_{n0}).
using TrainingAlgorithm = std::function<ScoreFunction(std::span<const DataPoint>)>;

/**
 * Score series (S_{from_index}, ..., S_{n+1}) over a series given 1-based,
 * with S_i = s(Z_i; Z_{i-1}, ..., Z_{i-L}). Requires from_index >= L+1.
 */
std::vector<double> score_series(const ScoreFunction& s, std::span<const DataPoint> series,
                                 std::size_t from_index);
void score_series_into(const ScoreFunction& s, std::span<const DataPoint> series,
                       std::size_t from_index, std::vector<double>& out);

/// Memoryless absolute-residual score |y - f(x)| for a pretrained model f.
ScoreFunction residual_score_pretrained(std::function<double(double)> f);

/**
 * Memoryless score s(z_k) = k over a list of distinct points; anything
 * outside the list scores 0 (all indicators vanish).
 */
ScoreFunction rank_score(std::vector<DataPoint> z_points);

/**
 * Least-squares autoregressive residual score of memory L: regresses Y_i on
 * (1, X_i, Y_{i-1}, ..., Y_{i-L}) over the training block and scores by
 * absolute residual. Rank-deficient designs get the minimum-norm solution.
 * Requires a training block of length >= L+2.
 */
ScoreFunction fit_ar_residual_score(int memory, std::span<const DataPoint> training);

/// TrainingAlgorithm wrapper around fit_ar_residual_score.
TrainingAlgorithm ar_residual_trainer(int memory);

}  // namespace tsconf
