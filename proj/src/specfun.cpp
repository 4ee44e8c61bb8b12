#include "powexp/specfun.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "powexp/errors.hpp"

namespace powexp::specfun {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;

// Lanczos approximation, g = 7, n = 9 (Godfrey). Relative error of the
// resulting Gamma is about 1e-15 on the half-plane Re z >= 1/2.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

constexpr int kMaxIterations = 500;
constexpr double kSeriesTol = 1e-17;
constexpr double kFractionTol = 1e-15;
// Below this log value e^{x} is zero in double precision.
constexpr double kLogUnderflow = -745.13321910194110842;

void require_beta(double beta, const char* fn)
{
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw Error(ErrorCode::Domain,
                    std::string(fn) + ": beta must be positive and finite, got " +
                        std::to_string(beta));
    }
}

void require_q(double q, const char* fn)
{
    if (!(q >= 0.0) || std::isnan(q)) {
        throw Error(ErrorCode::Domain,
                    std::string(fn) + ": q must be nonnegative, got " + std::to_string(q));
    }
}

// Rational part of the Lanczos sum, evaluated at z (with Re z >= 1/2).
cplx lanczos_series(cplx z)
{
    const cplx zm1 = z - 1.0;
    cplx x = kLanczosCoef[0];
    for (std::size_t k = 1; k < kLanczosCoef.size(); ++k) {
        x += kLanczosCoef[k] / (zm1 + static_cast<double>(k));
    }
    return x;
}

// Continuous imaginary part of log(lanczos_series(beta + i y)), traced from
// y = 0 where the series is real and positive. Steps of 1/4 keep the phase
// change per step far below pi since Re z >= 1/2 keeps z clear of the poles.
double lanczos_series_phase(double beta, double y)
{
    const double sign = y < 0.0 ? -1.0 : 1.0;
    const double ay = std::abs(y);
    const int steps = static_cast<int>(std::ceil(ay / 0.25));
    double phase = 0.0;
    double prev = 0.0;
    for (int s = 1; s <= steps; ++s) {
        const double ys = (s == steps) ? ay : 0.25 * s;
        const double cur = std::arg(lanczos_series(cplx(beta, ys)));
        double jump = cur - prev;
        if (jump > kPi) {
            jump -= 2.0 * kPi;
        } else if (jump < -kPi) {
            jump += 2.0 * kPi;
        }
        phase += jump;
        prev = cur;
    }
    return sign * phase;
}

// log Gamma(beta + i y) on the continuous branch that is real at y = 0.
// Requires beta >= 1/2.
cplx log_gamma_lanczos(double beta, double y, bool track_phase)
{
    const cplx z(beta, y);
    const cplx zm1 = z - 1.0;
    const cplx t = zm1 + kLanczosG + 0.5;
    const cplx series = lanczos_series(z);
    const double series_phase = track_phase ? lanczos_series_phase(beta, y) : std::arg(series);
    const cplx log_series(std::log(std::abs(series)), series_phase);
    return 0.5 * std::log(2.0 * kPi) + (zm1 + 0.5) * std::log(t) - t + log_series;
}

cplx log_gamma_complex(double beta, double y, bool track_phase)
{
    if (beta >= 0.5) {
        return log_gamma_lanczos(beta, y, track_phase);
    }
    // Gamma(z) = Gamma(z + 1) / z; log z is continuous on Re z > 0.
    return log_gamma_lanczos(beta + 1.0, y, track_phase) - std::log(cplx(beta, y));
}

// Power series for the lower incomplete gamma:
// gamma(beta, q) = e^{-q} q^beta sum_n q^n / (beta (beta+1) ... (beta+n)).
// Returns the log of the sum.
double log_lower_series_sum(double beta, double q)
{
    double ap = beta;
    double term = 1.0 / beta;
    double sum = term;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= q / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kSeriesTol) {
            return std::log(sum);
        }
    }
    throw Error(ErrorCode::Numeric, "lower_inc_gamma: series did not converge");
}

// Modified Lentz evaluation of the continued fraction for Gamma(beta, q);
// returns log of the fraction so that Gamma(beta,q) = e^{-q} q^beta * cf.
double log_upper_fraction(double beta, double q)
{
    constexpr double tiny = 1e-300;
    double b = q + 1.0 - beta;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -i * (i - beta);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kFractionTol) {
            return std::log(h);
        }
    }
    throw Error(ErrorCode::Numeric, "upper_inc_gamma: continued fraction did not converge");
}

bool use_series(double beta, double q) { return q < beta + 1.0; }

// std::lgamma writes the global signgam on glibc; avoid it where tgamma is
// finite so that concurrent callers do not race.
double log_gamma_real(double beta)
{
    return beta < 170.0 ? std::log(std::tgamma(beta)) : std::lgamma(beta);
}

} // namespace

double gamma(double beta)
{
    require_beta(beta, "gamma");
    return std::tgamma(beta);
}

double log_gamma(double beta)
{
    require_beta(beta, "log_gamma");
    return log_gamma_real(beta);
}

double log_abs_gamma_complex(double beta, double y)
{
    require_beta(beta, "abs_gamma_complex");
    if (y == 0.0) {
        return log_gamma_real(beta);
    }
    return log_gamma_complex(beta, std::abs(y), false).real();
}

double abs_gamma_complex(double beta, double y)
{
    require_beta(beta, "abs_gamma_complex");
    if (y == 0.0) {
        return std::tgamma(beta);
    }
    return std::exp(log_abs_gamma_complex(beta, y));
}

double arg_gamma_complex(double beta, double y)
{
    require_beta(beta, "arg_gamma_complex");
    if (y == 0.0) {
        return 0.0;
    }
    const double phase = log_gamma_complex(beta, std::abs(y), true).imag();
    return y < 0.0 ? -phase : phase;
}

double amplitude_ratio(double beta, double xi)
{
    const double y = 2.0 * kPi * xi;
    return std::exp(log_abs_gamma_complex(beta, y) - log_gamma(beta));
}

double log_lower_inc_gamma(double beta, double q)
{
    require_beta(beta, "lower_inc_gamma");
    require_q(q, "lower_inc_gamma");
    if (q == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (use_series(beta, q)) {
        return -q + beta * std::log(q) + log_lower_series_sum(beta, q);
    }
    const double upper = std::exp(-q + beta * std::log(q) + log_upper_fraction(beta, q));
    return std::log(std::tgamma(beta) - upper);
}

double lower_inc_gamma(double beta, double q)
{
    require_beta(beta, "lower_inc_gamma");
    require_q(q, "lower_inc_gamma");
    if (q == 0.0) {
        return 0.0;
    }
    return std::exp(log_lower_inc_gamma(beta, q));
}

double log_upper_inc_gamma(double beta, double q)
{
    require_beta(beta, "upper_inc_gamma");
    require_q(q, "upper_inc_gamma");
    if (q == 0.0) {
        return log_gamma_real(beta);
    }
    if (use_series(beta, q)) {
        const double lower = std::exp(-q + beta * std::log(q) + log_lower_series_sum(beta, q));
        return std::log(std::tgamma(beta) - lower);
    }
    return -q + beta * std::log(q) + log_upper_fraction(beta, q);
}

IncGammaResult upper_inc_gamma_checked(double beta, double q)
{
    if (std::isinf(q) && q > 0.0) {
        require_beta(beta, "upper_inc_gamma");
        return {0.0, true};
    }
    const double lg = log_upper_inc_gamma(beta, q);
    if (lg < kLogUnderflow) {
        return {0.0, true};
    }
    return {std::exp(lg), false};
}

double upper_inc_gamma(double beta, double q) { return upper_inc_gamma_checked(beta, q).value; }

} // namespace powexp::specfun
