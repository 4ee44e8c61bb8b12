#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace powexp {

struct Term {
    double a = 0.0; // exponent
    double w = 0.0; // weight
};

enum class Provenance { Bm, De, PronyReduced, File };

const char* to_string(Provenance p) noexcept;
Provenance provenance_from_string(const std::string& s);

/// Exponential sum approximation
///
///     t^{-beta} ~ (1/Gamma(beta)) sum_k w_k exp(-a_k t),   t_lo <= t <= t_hi.
///
/// Immutable after construction. The constructor sorts the terms by
/// exponent and throws Error{InvalidSum} unless every a and w is positive
/// and finite, the exponents are distinct, beta > 0 and t_lo < t_hi.
class ExpSum {
public:
    ExpSum(double beta, std::vector<Term> terms, double t_lo, double t_hi, Provenance provenance);

    double beta() const noexcept { return beta_; }
    double t_lo() const noexcept { return t_lo_; }
    double t_hi() const noexcept { return t_hi_; }
    Provenance provenance() const noexcept { return provenance_; }
    std::span<const Term> terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }

    /// (1/Gamma(beta)) sum w e^{-a t}, compensated. Terms with a t > 745
    /// underflow and are skipped. Defined for every t > 0.
    double operator()(double t) const;

    /// sum w e^{-a t} without the 1/Gamma(beta) factor.
    double raw_sum(double t) const;

    bool in_interval(double t) const noexcept { return t >= t_lo_ && t <= t_hi_; }

    /// Same terms, different validity interval.
    ExpSum with_interval(double t_lo, double t_hi) const;
    ExpSum with_provenance(Provenance p) const;

private:
    double beta_;
    std::vector<Term> terms_;
    double t_lo_;
    double t_hi_;
    Provenance provenance_;
    double inv_gamma_beta_;
};

/// Compensated (Neumaier) sum of w e^{-a t} over an arbitrary term list.
double sum_exponentials(std::span<const Term> terms, double t);

inline double evaluate(const ExpSum& sum, double t) { return sum(t); }

struct Evaluation {
    double value = 0.0;
    bool outside_interval = false;
};

/// evaluate() plus a flag for t outside [t_lo, t_hi].
Evaluation evaluate_flagged(const ExpSum& sum, double t);

/// t_p = t_hi^{(p-1)/(P-1)} t_lo^{(P-p)/(P-1)}, p = 1..P, with exact endpoints.
std::vector<double> geometric_grid(double t_lo, double t_hi, int P = 751);

struct ErrorReport {
    std::vector<double> grid;
    std::vector<double> rho; // 1 - t^beta * sum(t)
    double max_abs = 0.0;
    double argmax_t = 0.0;
};

ErrorReport relative_error_report(const ExpSum& sum, std::span<const double> grid);

/// Rescale a sum built on [t_lo, t_hi] to [t_lo T', t_hi T']: a -> a / T',
/// w -> w / T'^beta. The relative error satisfies rho'(t) = rho(t / T').
ExpSum rescale(const ExpSum& sum, double T_prime);

/// First harmonic of the aliasing error for the BM trapezoid rule with step h,
/// -2 R(1/h) cos(2 pi log(t)/h - Phi(1/h)).
double error_model_first_term(double beta, double h, double t);

/// CSV `t,rho` with 17 significant digits.
void write_report_csv(std::ostream& out, const ErrorReport& report);

} // namespace powexp
