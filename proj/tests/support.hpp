#pragma once

// Shared fixtures for the unit tests: the worked configurations used across
// modules and high-precision reference evaluations.

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "powexp/design.hpp"
#include "powexp/exp_sum.hpp"
#include "powexp/gen_bm.hpp"
#include "powexp/gen_de.hpp"
#include "powexp/prony.hpp"

namespace powexp::test {

using mp50 = boost::multiprecision::cpp_bin_float_50;

inline constexpr double kBeta = 0.75;
inline constexpr double kDelta = 1e-6;
inline constexpr double kT = 10.0;

inline Tolerances example_tolerances() { return Tolerances{1e-8, 0.9e-8, 0.05e-8}; }

inline const BmResult& example1()
{
    static const BmResult r = generate_bm(kBeta, kDelta, kT, example_tolerances());
    return r;
}

inline const std::vector<double>& example_grid()
{
    static const std::vector<double> g = geometric_grid(kDelta, kT, 751);
    return g;
}

inline const ExpSum& example1_reduced()
{
    static const ExpSum s = [] {
        const auto& sum = example1().sum;
        const auto r = prony::prony_reduce(sum.terms().first(65), 6);
        return prony::splice(sum, 65, r);
    }();
    return s;
}

/// sum w e^{-a t} in 50-digit arithmetic.
inline double mp_sum_exponentials(std::span<const Term> terms, double t)
{
    mp50 acc = 0;
    for (const auto& term : terms) {
        acc += mp50(term.w) * boost::multiprecision::exp(-mp50(term.a) * mp50(t));
    }
    return static_cast<double>(acc);
}

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240611u);
    return gen;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline double log_uniform(double lo, double hi)
{
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

inline double rel_diff(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

} // namespace powexp::test
