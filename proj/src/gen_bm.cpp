#include "powexp/gen_bm.hpp"

#include <cmath>

#include "powexp/errors.hpp"

namespace powexp {

std::vector<Term> bm_terms(double beta, double h, int M, int N)
{
    if (!(h > 0.0) || M < 0 || N < 0) {
        throw Error(ErrorCode::Domain, "bm_terms: h > 0, M >= 0, N >= 0 required");
    }
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(M + 1 + N));
    for (int n = -M; n <= N; ++n) {
        const double nh = n * h;
        terms.push_back({std::exp(nh), h * std::exp(beta * nh)});
    }
    return terms;
}

BmResult generate_bm(double beta, double delta, double T, const Tolerances& tol)
{
    BmRecipe recipe{beta, delta, T, tol, design::design_bm(beta, delta, T, tol)};
    const auto& p = recipe.params;
    ExpSum sum(beta, bm_terms(beta, p.h, p.M, p.N), delta, T, Provenance::Bm);
    return {std::move(sum), recipe};
}

} // namespace powexp
