#include "powexp/gen_de.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "powexp/errors.hpp"
#include "powexp/specfun.hpp"

namespace powexp {

double de_left_tail_constant(double beta)
{
    return 2.0 * std::numbers::e / specfun::gamma(beta + 1.0);
}

int de_left_cutoff(double beta, double h, double eps_rt)
{
    if (!(h > 0.0) || !(eps_rt > 0.0 && eps_rt < 1.0)) {
        throw Error(ErrorCode::Domain, "de_left_cutoff: h > 0 and eps_rt in (0,1) required");
    }
    const double log_c2 = std::log(de_left_tail_constant(beta));
    const double log_eps = std::log(eps_rt);
    auto satisfied = [&](int M) { return log_c2 - beta * std::exp(M * h) <= log_eps; };

    const double need = (log_c2 - log_eps) / beta; // e^{Mh} >= need
    int M = need > 1.0 ? static_cast<int>(std::ceil(std::log(need) / h)) : 0;
    while (!satisfied(M)) {
        ++M;
    }
    while (M > 0 && satisfied(M - 1)) {
        --M;
    }
    if (beta < 0.5) {
        // The left-tail bound only holds once the dominating integrand decreases.
        const double min_mh = std::log(1.0 / beta - 1.0);
        while (M * h < min_mh) {
            ++M;
        }
    }
    return M;
}

std::vector<Term> de_terms(double beta, double h, int M, int N)
{
    if (!(h > 0.0) || M < 0 || N < 0) {
        throw Error(ErrorCode::Domain, "de_terms: h > 0, M >= 0, N >= 0 required");
    }
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(M + 1 + N));
    for (int n = -M; n <= N; ++n) {
        const double nh = n * h;
        const double e = std::exp(-nh);
        const double x = nh - e;
        terms.push_back({std::exp(x), h * (1.0 + e) * std::exp(beta * x)});
    }
    return terms;
}

DeResult generate_de(double beta, double delta, double T, const Tolerances& tol, double headroom)
{
    if (!(delta > 0.0) || !(delta < T)) {
        throw Error(ErrorCode::Domain, "generate_de: 0 < delta < T required");
    }
    if (!(headroom >= 1.0) || !std::isfinite(headroom)) {
        throw Error(ErrorCode::Domain, "generate_de: headroom >= 1 required");
    }
    tol.validate();

    DeRecipe recipe;
    recipe.beta = beta;
    recipe.delta = delta;
    recipe.T = T;
    recipe.headroom = headroom;
    recipe.tol = tol;

    const double T_prime = headroom * T;
    const double delta_normalized = delta / T_prime;
    recipe.h = design::solve_step(beta, tol.eps_rd);
    const double x_delta = design::solve_upper_cutoff(beta, delta_normalized, tol.eps_rt);
    recipe.N = std::max(0, static_cast<int>(std::ceil(x_delta / recipe.h)));
    recipe.M = de_left_cutoff(beta, recipe.h, tol.eps_rt);

    const ExpSum normalized(beta, de_terms(beta, recipe.h, recipe.M, recipe.N), delta_normalized,
                            1.0, Provenance::De);
    ExpSum sum = rescale(normalized, T_prime).with_interval(delta, T);
    return {std::move(sum), recipe};
}

} // namespace powexp
