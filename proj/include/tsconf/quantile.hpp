#pragma once

#include <cstddef>
#include <span>

namespace tsconf {

/**
 * Order-statistic quantile of a finite list.
 *
 * For 0 < b <= 1 returns the ceil(b*m)-th smallest entry of v (no
 * interpolation; ties kept as-is). Returns +infinity for b > 1 and
 * -infinity for b <= 0, so that threshold comparisons degrade to
 * "always covered" / "never covered".
 *
 * Throws std::invalid_argument on an empty list.
 */
double quantile(std::span<const double> v, double b);

/// Rank ceil(b*m) clamped to [1, m]; only meaningful for 0 < b <= 1.
std::size_t quantile_rank(std::size_t m, double b);

/**
 * Conformal calibration level (1-alpha)*(1 + 1/m_cal), the finite-sample
 * correction for calibrating on m_cal scores without the test point.
 */
double conformal_level(double alpha, std::size_t m_cal);

}  // namespace tsconf
