#include "tsconf/scoring.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace tsconf {

void score_series_into(const ScoreFunction& s, std::span<const DataPoint> series,
                       std::size_t from_index, std::vector<double>& out) {
    const auto memory = static_cast<std::size_t>(s.memory);
    if (from_index < memory + 1) {
        throw std::invalid_argument("insufficient context");
    }
    const std::size_t len = series.size();
    if (from_index > len) {
        throw std::invalid_argument("from_index beyond end of series");
    }
    out.clear();
    out.reserve(len - from_index + 1);
    std::vector<DataPoint> context(memory);
    for (std::size_t i = from_index; i <= len; ++i) {
        // Context is most recent first: (Z_{i-1}, ..., Z_{i-L}).
        for (std::size_t j = 0; j < memory; ++j) {
            context[j] = series[i - 2 - j];
        }
        out.push_back(s.eval(series[i - 1], context));
    }
}

std::vector<double> score_series(const ScoreFunction& s, std::span<const DataPoint> series,
                                 std::size_t from_index) {
    std::vector<double> out;
    score_series_into(s, series, from_index, out);
    return out;
}

ScoreFunction residual_score_pretrained(std::function<double(double)> f) {
    ScoreFunction s;
    s.memory = 0;
    s.predict = [f](double x, std::span<const DataPoint>) { return f(x); };
    s.eval = [f = std::move(f)](const DataPoint& z, std::span<const DataPoint>) {
        return std::abs(z.y - f(z.x));
    };
    return s;
}

ScoreFunction rank_score(std::vector<DataPoint> z_points) {
    for (std::size_t i = 0; i < z_points.size(); ++i) {
        for (std::size_t j = i + 1; j < z_points.size(); ++j) {
            if (z_points[i] == z_points[j]) {
                throw std::invalid_argument("rank score points must be distinct");
            }
        }
    }
    ScoreFunction s;
    s.memory = 0;
    s.eval = [points = std::move(z_points)](const DataPoint& z, std::span<const DataPoint>) {
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (points[k] == z) return static_cast<double>(k);
        }
        return 0.0;
    };
    return s;
}

ScoreFunction fit_ar_residual_score(int memory, std::span<const DataPoint> training) {
    if (memory < 0) {
        throw std::invalid_argument("memory must be nonnegative");
    }
    const auto L = static_cast<std::size_t>(memory);
    const std::size_t n0 = training.size();
    if (n0 < L + 2) {
        throw std::invalid_argument("training block too short");
    }
    const std::size_t rows = n0 - L;
    const std::size_t cols = 2 + L;  // intercept, x, L lagged responses
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = r + L;  // 0-based index into the block
        design(r, 0) = 1.0;
        design(r, 1) = training[i].x;
        for (std::size_t j = 0; j < L; ++j) {
            design(r, 2 + j) = training[i - 1 - j].y;
        }
        target(r) = training[i].y;
    }
    // Complete orthogonal decomposition yields the minimum-norm solution
    // when the design is rank-deficient.
    Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(target);
    std::vector<double> weights(coef.data(), coef.data() + coef.size());

    auto predict = [weights, L](double x, std::span<const DataPoint> context) {
        double yhat = weights[0] + weights[1] * x;
        for (std::size_t j = 0; j < L; ++j) {
            yhat += weights[2 + j] * context[j].y;
        }
        return yhat;
    };
    ScoreFunction s;
    s.memory = memory;
    s.predict = predict;
    s.eval = [predict](const DataPoint& z, std::span<const DataPoint> context) {
        return std::abs(z.y - predict(z.x, context));
    };
    return s;
}

TrainingAlgorithm ar_residual_trainer(int memory) {
    return [memory](std::span<const DataPoint> training) {
        return fit_ar_residual_score(memory, training);
    };
}

}  // namespace tsconf
