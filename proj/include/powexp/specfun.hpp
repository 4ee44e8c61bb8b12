#pragma once

// Gamma-family special functions used throughout the library. All functions
// are pure and throw powexp::Error{ErrorCode::Domain} for beta <= 0 or q < 0.

namespace powexp::specfun {

/// Gamma(beta) for beta > 0.
double gamma(double beta);

/// log Gamma(beta) for beta > 0.
double log_gamma(double beta);

/// |Gamma(beta + i y)|. Even in y.
double abs_gamma_complex(double beta, double y);

/// log |Gamma(beta + i y)|; finite even where |Gamma| underflows.
double log_abs_gamma_complex(double beta, double y);

/// Phase Phi(y) with Gamma(beta + i y) / Gamma(beta) = R e^{i Phi}, taken on
/// the branch that is continuous in y with Phi(0) = 0. Odd in y.
double arg_gamma_complex(double beta, double y);

/// Upper incomplete gamma Gamma(beta, q) = int_q^inf e^{-p} p^{beta-1} dp.
double upper_inc_gamma(double beta, double q);

/// log Gamma(beta, q). Usable for q where Gamma(beta, q) underflows.
double log_upper_inc_gamma(double beta, double q);

/// Lower incomplete gamma Gamma(beta) - Gamma(beta, q), evaluated without
/// the subtraction for small q.
double lower_inc_gamma(double beta, double q);

/// log of lower_inc_gamma; finite for tiny q where q^beta underflows.
double log_lower_inc_gamma(double beta, double q);

struct IncGammaResult {
    double value = 0.0;
    bool underflow = false; // value is 0 because e^{-q} is below the double range
};

/// Gamma(beta, q) with an explicit underflow flag.
IncGammaResult upper_inc_gamma_checked(double beta, double q);

/// R(xi) = |Gamma(beta + 2 pi i xi)| / Gamma(beta).
double amplitude_ratio(double beta, double xi);

} // namespace powexp::specfun
