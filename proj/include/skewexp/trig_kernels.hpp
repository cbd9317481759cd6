#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace skewexp {

/// Evaluation thresholds for the sinc/cosc/cotc kernels.
struct TrigKernelConfig {
    double taylor_threshold = 1e-4; ///< below this, series; both branches agree to 1e-15 here
    double pole_tol = 1e-12;        ///< cotc rejection distance from nonzero multiples of pi
};

inline constexpr TrigKernelConfig default_trig_config{};

namespace detail {
inline void require_finite(double x, const char* who) {
    if (!std::isfinite(x)) throw domain_error(std::string(who) + ": non-finite input");
}
} // namespace detail

/// sin(x)/x with sinc(0) = 1.
inline double sinc(double x, const TrigKernelConfig& cfg = default_trig_config) {
    detail::require_finite(x, "sinc");
    const double ax = std::fabs(x);
    if (ax < cfg.taylor_threshold) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + (x2 * x2) / 120.0;
    }
    return std::sin(x) / x;
}

/// (cos(x)-1)/x with cosc(0) = 0. The direct branch uses the identity
/// cos(x)-1 = -2 sin^2(x/2), which keeps full precision for small x too.
inline double cosc(double x, const TrigKernelConfig& cfg = default_trig_config) {
    detail::require_finite(x, "cosc");
    const double ax = std::fabs(x);
    if (ax < cfg.taylor_threshold) {
        return -0.5 * x + (x * x * x) / 24.0;
    }
    const double s = std::sin(0.5 * x);
    return -2.0 * s * s / x;
}

/// x*cot(x) with cotc(0) = 1; does not exist at nonzero multiples of pi.
inline double cotc(double x, const TrigKernelConfig& cfg = default_trig_config) {
    detail::require_finite(x, "cotc");
    const double ax = std::fabs(x);
    if (ax < cfg.taylor_threshold) {
        const double x2 = x * x;
        return 1.0 - x2 / 3.0 - (x2 * x2) / 45.0;
    }
    const long l = std::lround(x / M_PI);
    if (l != 0 && std::fabs(x - static_cast<double>(l) * M_PI) <= cfg.pole_tol)
        throw pole_error("cotc: x within pole_tol of " + std::to_string(l) + "*pi");
    return x * (std::cos(x) / std::sin(x));
}

} // namespace skewexp
