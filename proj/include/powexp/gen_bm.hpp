#pragma once

#include "powexp/design.hpp"
#include "powexp/exp_sum.hpp"

namespace powexp {

/// Inputs and solved parameters behind a generate_bm() result.
struct BmRecipe {
    double beta = 0.0;
    double delta = 0.0;
    double T = 0.0;
    Tolerances tol;
    DesignParams params;
};

struct BmResult {
    ExpSum sum;
    BmRecipe recipe;
};

/// Truncated trapezoid rule for t^{-beta} = (1/Gamma(beta)) int exp(-t e^x + beta x) dx:
/// a_n = e^{nh}, w_n = h e^{beta n h} for n = -M..N. On [delta, T] the
/// relative error is bounded by tol.eps_rd + 2 tol.eps_rt.
BmResult generate_bm(double beta, double delta, double T, const Tolerances& tol);

/// Terms for explicit (h, M, N), without any design step.
std::vector<Term> bm_terms(double beta, double h, int M, int N);

} // namespace powexp
