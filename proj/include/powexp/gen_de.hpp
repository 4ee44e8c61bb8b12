#pragma once

#include "powexp/design.hpp"
#include "powexp/exp_sum.hpp"

namespace powexp {

struct DeRecipe {
    double beta = 0.0;
    double delta = 0.0;
    double T = 0.0;
    double headroom = 10.0;
    Tolerances tol;
    double h = 0.0;
    int M = 0;
    int N = 0;
};

struct DeResult {
    ExpSum sum;
    DeRecipe recipe;
};

/// 2e / Gamma(beta + 1): constant in the left-tail bound
/// C2 exp(-beta e^{Mh}) for the substitution p = exp(x - e^{-x}).
double de_left_tail_constant(double beta);

/// Smallest M >= 0 with C2 exp(-beta e^{Mh}) <= eps_rt, raised if needed so
/// that M h >= log(1/beta - 1) when beta < 1/2.
int de_left_cutoff(double beta, double h, double eps_rt);

/// Terms of the trapezoid rule after p = exp(x - e^{-x}), valid on (0, 1]:
/// a_n = exp(nh - e^{-nh}), w_n = h (1 + e^{-nh}) exp(beta (nh - e^{-nh})).
std::vector<Term> de_terms(double beta, double h, int M, int N);

/// Builds the sum on [delta / T', 1] with T' = headroom * T, rescales it by T',
/// and returns it with validity interval [delta, T]. h comes from the
/// discretization equation, N from the right-tail equation on the normalized
/// interval, M from de_left_cutoff().
DeResult generate_de(double beta, double delta, double T, const Tolerances& tol,
                     double headroom = 10.0);

} // namespace powexp
