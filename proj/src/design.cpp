#include "powexp/design.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "powexp/errors.hpp"
#include "powexp/specfun.hpp"
#include "root_find.hpp"

namespace powexp {

void Tolerances::validate() const
{
    auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_unit(eps) || !in_unit(eps_rd) || !in_unit(eps_rt)) {
        throw Error(ErrorCode::Domain, "tolerances must lie in (0,1)");
    }
    // 0.9e-8 + 2 * 0.05e-8 rounds a few ulps above 1e-8.
    if (eps_rd + 2.0 * eps_rt > eps * (1.0 + 1e-12)) {
        throw Error(ErrorCode::Domain, "eps_rd + 2 eps_rt exceeds eps");
    }
}

Tolerances split_tolerance(double eps, ToleranceSplit split)
{
    Tolerances tol;
    tol.eps = eps;
    switch (split) {
    case ToleranceSplit::PaperEx1:
        tol.eps_rd = 0.9 * eps;
        tol.eps_rt = 0.05 * eps;
        break;
    case ToleranceSplit::Thirds:
        tol.eps_rd = eps / 3.0;
        tol.eps_rt = eps / 3.0;
        break;
    }
    tol.validate();
    return tol;
}

namespace design {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxAliasTerms = 100000;

// log of 2 sum_{n>=1} |Gamma(beta + 2 pi i n / h)| / Gamma(beta), summed until
// a term drops below `floor_ratio` (relative to Gamma(beta)) or stops
// contributing to the partial sum.
double log_discretization_bound(double beta, double h, double floor_ratio)
{
    const double log_gamma_beta = specfun::log_gamma(beta);
    const double log_floor = std::log(floor_ratio);
    double log_first = 0.0;
    double rel_sum = 0.0; // sum of terms divided by the first term
    for (int n = 1; n <= kMaxAliasTerms; ++n) {
        const double log_term =
            specfun::log_abs_gamma_complex(beta, kTwoPi * n / h) - log_gamma_beta;
        if (n == 1) {
            log_first = log_term;
            rel_sum = 1.0;
        } else {
            const double rel = std::exp(log_term - log_first);
            rel_sum += rel;
            if (rel < 1e-17 * rel_sum) {
                break;
            }
        }
        if (log_term < log_floor) {
            break;
        }
    }
    return std::log(2.0) + log_first + std::log(rel_sum);
}

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::Domain, std::string(name) + " must be positive and finite");
    }
}

void require_unit(double v, const char* name)
{
    if (!(v > 0.0 && v < 1.0)) {
        throw Error(ErrorCode::Domain, std::string(name) + " must lie in (0,1)");
    }
}

int ceil_nonneg(double x)
{
    return std::max(0, static_cast<int>(std::ceil(x)));
}

} // namespace

double discretization_bound(double beta, double h)
{
    require_positive(beta, "beta");
    require_positive(h, "h");
    return std::exp(log_discretization_bound(beta, h, std::numeric_limits<double>::min()));
}

double solve_step(double beta, double eps_rd)
{
    require_positive(beta, "beta");
    require_unit(eps_rd, "eps_rd");
    const double floor_ratio = 1e-4 * eps_rd;
    const double log_target = std::log(eps_rd);
    // Solved in log h; the bound increases with h.
    auto f = [&](double log_h) {
        return log_discretization_bound(beta, std::exp(log_h), floor_ratio) - log_target;
    };
    return std::exp(detail::solve_monotone(f, 0.0, true, "solve_step"));
}

double solve_upper_cutoff(double beta, double delta, double eps_rt)
{
    require_positive(beta, "beta");
    require_positive(delta, "delta");
    require_unit(eps_rt, "eps_rt");
    const double log_target = std::log(eps_rt) + specfun::log_gamma(beta);
    // Unknown v = log u with u = delta e^{x_delta}; Gamma(beta, u) decreases in u.
    auto f = [&](double v) { return specfun::log_upper_inc_gamma(beta, std::exp(v)) - log_target; };
    const double v_beta = std::log(beta);
    if (f(v_beta) < 0.0) {
        throw Error(ErrorCode::TailProvisoViolated,
                    "solve_upper_cutoff: eps_rt too large, the right-tail bound needs "
                    "delta e^{x_delta} >= beta");
    }
    const double v = detail::solve_monotone(f, v_beta, false, "solve_upper_cutoff");
    return v - std::log(delta);
}

double solve_lower_cutoff(double beta, double T, double eps_rt)
{
    require_positive(beta, "beta");
    require_positive(T, "T");
    require_unit(eps_rt, "eps_rt");
    const double log_target = std::log(eps_rt) + specfun::log_gamma(beta);
    // Unknown v = log u with u = T e^{-X_T}; the lower incomplete gamma increases in u.
    auto f = [&](double v) { return specfun::log_lower_inc_gamma(beta, std::exp(v)) - log_target; };
    const double v_beta = std::log(beta);
    if (f(v_beta) < 0.0) {
        throw Error(ErrorCode::TailProvisoViolated,
                    "solve_lower_cutoff: eps_rt too large, the left-tail bound needs "
                    "T e^{-X_T} <= beta");
    }
    const double v = detail::solve_monotone(f, v_beta, true, "solve_lower_cutoff");
    return std::log(T) - v;
}

DesignParams design_bm(double beta, double delta, double T, const Tolerances& tol)
{
    require_positive(beta, "beta");
    require_positive(delta, "delta");
    require_positive(T, "T");
    if (!(delta < T)) {
        throw Error(ErrorCode::Domain, "delta < T required");
    }
    tol.validate();
    DesignParams p;
    p.h = solve_step(beta, tol.eps_rd);
    p.x_delta = solve_upper_cutoff(beta, delta, tol.eps_rt);
    p.X_T = solve_lower_cutoff(beta, T, tol.eps_rt);
    p.M = ceil_nonneg(p.X_T / p.h);
    p.N = ceil_nonneg(p.x_delta / p.h);
    return p;
}

std::vector<SweepRow> design_sweep(double beta, double delta, double T,
                                   const std::vector<double>& eps_list, ToleranceSplit split)
{
    if (!(delta < T)) {
        throw Error(ErrorCode::Domain, "design_sweep: delta < T required");
    }
    if (!std::is_sorted(eps_list.begin(), eps_list.end(), std::greater<>())) {
        throw Error(ErrorCode::Domain, "design_sweep: eps_list must be sorted descending");
    }
    std::vector<SweepRow> rows;
    rows.reserve(eps_list.size());
    for (double eps : eps_list) {
        const DesignParams p = design_bm(beta, delta, T, split_tolerance(eps, split));
        rows.push_back({eps, p.h, p.M, p.N});
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    const auto old_precision = out.precision(17);
    out << "eps,h,M,N\n";
    for (const auto& r : rows) {
        out << r.eps << ',' << r.h << ',' << r.M << ',' << r.N << '\n';
    }
    out.precision(old_precision);
}

} // namespace design
} // namespace powexp
