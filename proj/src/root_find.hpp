#pragma once

// Bracketed root finding for the strictly monotone scalar equations of the
// design module.

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "powexp/errors.hpp"

namespace powexp::detail {

inline constexpr int kMaxRootIterations = 200;

/// Root of a strictly monotone f on the real line (increasing or not as
/// stated by the caller). The bracket is grown from
/// x0 by steps 1, 2, 4, ... in the direction of the sign change, then
/// shrunk by TOMS 748 (bisection safeguarded secant / inverse cubic steps).
template <class F>
double solve_monotone(F f, double x0, bool increasing, const char* what)
{
    double xa = x0;
    double fa = f(xa);
    if (fa == 0.0) {
        return xa;
    }
    double step = 1.0;
    double xb = xa;
    double fb = fa;
    int iterations = 0;
    const double dir = ((fa < 0.0) == increasing) ? 1.0 : -1.0;
    while ((fa < 0.0) == (fb < 0.0)) {
        if (++iterations > kMaxRootIterations || !std::isfinite(fb)) {
            throw Error(ErrorCode::Numeric, std::string(what) + ": failed to bracket root from x0=" +
                                                std::to_string(x0) + ", last x=" +
                                                std::to_string(xb) + " f=" + std::to_string(fb));
        }
        xa = xb;
        fa = fb;
        xb = xa + dir * step;
        fb = f(xb);
        step *= 2.0;
    }
    if (fb == 0.0) {
        return xb;
    }
    if (xa > xb) {
        std::swap(xa, xb);
        std::swap(fa, fb);
    }
    std::uintmax_t max_iter = kMaxRootIterations;
    const auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, xa, xb, fa, fb, tol, max_iter);
    if (max_iter >= static_cast<std::uintmax_t>(kMaxRootIterations)) {
        throw Error(ErrorCode::Numeric, std::string(what) + ": no convergence in " +
                                            std::to_string(kMaxRootIterations) +
                                            " iterations, bracket [" + std::to_string(lo) + ", " +
                                            std::to_string(hi) + "]");
    }
    return 0.5 * (lo + hi);
}

} // namespace powexp::detail
