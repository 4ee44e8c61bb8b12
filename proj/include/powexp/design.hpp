#pragma once

#include <iosfwd>
#include <vector>

namespace powexp {

/// Error budget for an exponential sum approximation. The discretization
/// part eps_rd and the two truncation tails (eps_rt each) must fit in eps.
struct Tolerances {
    double eps = 1e-8;
    double eps_rd = 0.9e-8;
    double eps_rt = 0.05e-8;

    /// Throws Error{Domain} unless all fields lie in (0,1) and
    /// eps_rd + 2 eps_rt <= eps (up to rounding in the last bit).
    void validate() const;
};

enum class ToleranceSplit {
    PaperEx1, // eps_rd = 0.9 eps, eps_rt = 0.05 eps
    Thirds,   // eps_rd = eps_rt = eps / 3
};

Tolerances split_tolerance(double eps, ToleranceSplit split);

struct DesignParams {
    double h = 0.0;
    double x_delta = 0.0; // upper cutoff: delta e^{x_delta} solves the right-tail equation
    double X_T = 0.0;     // lower cutoff: T e^{-X_T} solves the left-tail equation
    int M = 0;
    int N = 0;
};

namespace design {

/// Step h at which the aliasing amplitudes sum to the discretization budget,
/// 2 sum_{n>=1} |Gamma(beta + 2 pi i n / h)| = eps_rd Gamma(beta).
double solve_step(double beta, double eps_rd);

/// Left side of the step equation divided by Gamma(beta). Exposed for
/// residual checks and the step-vs-tolerance sweep.
double discretization_bound(double beta, double h);

/// x_delta with Gamma(beta, delta e^{x_delta}) = eps_rt Gamma(beta). Throws
/// Error{TailProvisoViolated} when delta e^{x_delta} < beta.
double solve_upper_cutoff(double beta, double delta, double eps_rt);

/// X_T with Gamma(beta) - Gamma(beta, T e^{-X_T}) = eps_rt Gamma(beta).
/// Throws Error{TailProvisoViolated} when T e^{-X_T} > beta.
double solve_lower_cutoff(double beta, double T, double eps_rt);

/// h, cutoffs and M = ceil(X_T/h), N = ceil(x_delta/h) for [delta, T].
DesignParams design_bm(double beta, double delta, double T, const Tolerances& tol);

struct SweepRow {
    double eps = 0.0;
    double h = 0.0;
    int M = 0;
    int N = 0;
};

/// One design per tolerance; eps_list must be sorted descending.
std::vector<SweepRow> design_sweep(double beta, double delta, double T,
                                   const std::vector<double>& eps_list, ToleranceSplit split);

/// CSV with header `eps,h,M,N`, 17 significant digits.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace design
} // namespace powexp
