#include "powexp/exp_sum.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "powexp/errors.hpp"
#include "powexp/specfun.hpp"

namespace powexp {

namespace {

// e^{-x} is below the smallest subnormal for x > 745.
constexpr double kUnderflowArg = 745.0;

void check_finite_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::InvalidSum, std::string(what) + " must be positive and finite");
    }
}

} // namespace

const char* to_string(Provenance p) noexcept
{
    switch (p) {
    case Provenance::Bm: return "bm";
    case Provenance::De: return "de";
    case Provenance::PronyReduced: return "prony-reduced";
    case Provenance::File: return "file";
    }
    return "file";
}

Provenance provenance_from_string(const std::string& s)
{
    if (s == "bm") return Provenance::Bm;
    if (s == "de") return Provenance::De;
    if (s == "prony-reduced") return Provenance::PronyReduced;
    if (s == "file") return Provenance::File;
    throw Error(ErrorCode::InvalidSum, "unknown provenance '" + s + "'");
}

ExpSum::ExpSum(double beta, std::vector<Term> terms, double t_lo, double t_hi,
               Provenance provenance)
    : beta_(beta), terms_(std::move(terms)), t_lo_(t_lo), t_hi_(t_hi), provenance_(provenance)
{
    check_finite_positive(beta_, "beta");
    check_finite_positive(t_lo_, "t_lo");
    check_finite_positive(t_hi_, "t_hi");
    if (!(t_lo_ < t_hi_)) {
        throw Error(ErrorCode::InvalidSum, "t_lo < t_hi required");
    }
    for (const auto& term : terms_) {
        check_finite_positive(term.a, "exponent");
        check_finite_positive(term.w, "weight");
    }
    std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.a < y.a; });
    const auto dup = std::adjacent_find(terms_.begin(), terms_.end(),
                                        [](const Term& x, const Term& y) { return x.a == y.a; });
    if (dup != terms_.end()) {
        throw Error(ErrorCode::InvalidSum, "duplicate exponent " + std::to_string(dup->a));
    }
    inv_gamma_beta_ = 1.0 / specfun::gamma(beta_);
}

double sum_exponentials(std::span<const Term> terms, double t)
{
    double sum = 0.0;
    double comp = 0.0;
    for (const auto& term : terms) {
        const double x = term.a * t;
        if (x > kUnderflowArg) {
            continue;
        }
        const double v = term.w * std::exp(-x);
        const double s = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    return sum + comp;
}

double ExpSum::raw_sum(double t) const { return sum_exponentials(terms_, t); }

double ExpSum::operator()(double t) const { return inv_gamma_beta_ * raw_sum(t); }

ExpSum ExpSum::with_interval(double t_lo, double t_hi) const
{
    return ExpSum(beta_, terms_, t_lo, t_hi, provenance_);
}

ExpSum ExpSum::with_provenance(Provenance p) const
{
    return ExpSum(beta_, terms_, t_lo_, t_hi_, p);
}

Evaluation evaluate_flagged(const ExpSum& sum, double t)
{
    return {sum(t), !sum.in_interval(t)};
}

std::vector<double> geometric_grid(double t_lo, double t_hi, int P)
{
    if (!(t_lo > 0.0) || !(t_lo < t_hi) || !std::isfinite(t_hi)) {
        throw Error(ErrorCode::Domain, "geometric_grid: 0 < t_lo < t_hi required");
    }
    if (P < 2) {
        throw Error(ErrorCode::Domain, "geometric_grid: P >= 2 required");
    }
    std::vector<double> grid(static_cast<std::size_t>(P));
    const double log_lo = std::log(t_lo);
    const double log_hi = std::log(t_hi);
    const double denom = P - 1;
    for (int p = 0; p < P; ++p) {
        const double s = p / denom;
        grid[static_cast<std::size_t>(p)] = std::exp((1.0 - s) * log_lo + s * log_hi);
    }
    grid.front() = t_lo;
    grid.back() = t_hi;
    return grid;
}

ErrorReport relative_error_report(const ExpSum& sum, std::span<const double> grid)
{
    ErrorReport report;
    report.grid.assign(grid.begin(), grid.end());
    report.rho.reserve(grid.size());
    for (double t : grid) {
        if (!(t > 0.0)) {
            throw Error(ErrorCode::Domain, "relative_error_report: grid points must be positive");
        }
        const double rho = 1.0 - std::pow(t, sum.beta()) * sum(t);
        report.rho.push_back(rho);
        if (std::abs(rho) > report.max_abs || report.argmax_t == 0.0) {
            report.max_abs = std::abs(rho);
            report.argmax_t = t;
        }
    }
    return report;
}

ExpSum rescale(const ExpSum& sum, double T_prime)
{
    if (!(T_prime > 0.0) || !std::isfinite(T_prime)) {
        throw Error(ErrorCode::Domain, "rescale: T' must be positive");
    }
    const double weight_scale = std::pow(T_prime, -sum.beta());
    std::vector<Term> terms;
    terms.reserve(sum.size());
    for (const auto& term : sum.terms()) {
        terms.push_back({term.a / T_prime, term.w * weight_scale});
    }
    return ExpSum(sum.beta(), std::move(terms), sum.t_lo() * T_prime, sum.t_hi() * T_prime,
                  sum.provenance());
}

double error_model_first_term(double beta, double h, double t)
{
    if (!(h > 0.0)) {
        throw Error(ErrorCode::Domain, "error_model_first_term: h > 0 required");
    }
    const double xi = 1.0 / h;
    const double amplitude = specfun::amplitude_ratio(beta, xi);
    const double phase = specfun::arg_gamma_complex(beta, 2.0 * std::numbers::pi * xi);
    return -2.0 * amplitude * std::cos(2.0 * std::numbers::pi * xi * std::log(t) - phase);
}

void write_report_csv(std::ostream& out, const ErrorReport& report)
{
    const auto old_precision = out.precision(17);
    out << "t,rho\n";
    for (std::size_t i = 0; i < report.grid.size(); ++i) {
        out << report.grid[i] << ',' << report.rho[i] << '\n';
    }
    out.precision(old_precision);
}

} // namespace powexp
