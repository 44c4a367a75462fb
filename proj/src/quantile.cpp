#include "tsconf/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tsconf {

std::size_t quantile_rank(std::size_t m, double b) {
    const auto r = static_cast<std::size_t>(std::ceil(b * static_cast<double>(m)));
    return std::clamp<std::size_t>(r, 1, m);
}

double quantile(std::span<const double> v, double b) {
    if (v.empty()) {
        throw std::invalid_argument("empty score list");
    }
    if (b > 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (b <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const std::size_t rank = quantile_rank(v.size(), b);
    std::vector<double> scratch(v.begin(), v.end());
    std::nth_element(scratch.begin(), scratch.begin() + (rank - 1), scratch.end());
    return scratch[rank - 1];
}

double conformal_level(double alpha, std::size_t m_cal) {
    if (m_cal == 0) {
        throw std::invalid_argument("calibration set is empty");
    }
    return (1.0 - alpha) * (1.0 + 1.0 / static_cast<double>(m_cal));
}

}  // namespace tsconf
