#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "powexp/exp_sum.hpp"

namespace powexp::fastconv {

/// Time levels 0 = t_0 < t_1 < ... < t_Nt.
class TimeGrid {
public:
    /// Throws Error{Domain} unless points[0] == 0, the points strictly
    /// increase and there is at least one step.
    explicit TimeGrid(std::vector<double> points);

    static TimeGrid uniform(double T, int steps);

    std::span<const double> points() const noexcept { return points_; }
    int steps() const noexcept { return static_cast<int>(points_.size()) - 1; }
    double min_step() const noexcept { return min_step_; }
    double horizon() const noexcept { return points_.back(); }

private:
    std::vector<double> points_;
    double min_step_;
};

/// U^1..U^Nt, the value of the piecewise-constant interpolant on (t_{n-1}, t_n].
using SignalHistory = std::vector<double>;

/// Riemann-Liouville fractional integral of order alpha of the
/// piecewise-constant interpolant, at t_1..t_Nt, by the O(Nt^2) sum with exact
/// weights ((t_n - t_{j-1})^alpha - (t_n - t_j)^alpha) / Gamma(alpha + 1).
std::vector<double> direct_convolve(const TimeGrid& grid, std::span<const double> u, double alpha);

/// Incremental evaluator of the same quantity in O(L) work and memory per
/// step. The newest interval uses its exact weight; older history is carried
/// by one running integral per exponential term of the kernel approximation
///   t^{alpha-1}/Gamma(alpha) ~ sum w_l e^{-a_l t} / (Gamma(alpha) Gamma(1-alpha)).
class FastConvolver {
public:
    /// `kernel` must approximate t^{-beta} with beta = 1 - alpha.
    FastConvolver(const ExpSum& kernel, double alpha);

    /// Feed time level t_n and U^n, return the convolution at t_n. Throws
    /// Error{PreconditionStep} if t_n - t_{n-1} < kernel.t_lo() (for n >= 2,
    /// where the history is used) and Error{PreconditionHorizon} if
    /// t_n > kernel.t_hi().
    double step(double t_n, double u_n);

    int steps_taken() const noexcept { return n_; }
    std::span<const double> theta() const noexcept { return theta_; }

private:
    std::vector<double> exponents_;
    std::vector<double> scaled_weights_; // w_l / (Gamma(alpha) Gamma(1-alpha) a_l)
    std::vector<double> theta_;
    double alpha_;
    double inv_gamma_alpha1_;
    double t_lo_;
    double t_hi_;
    int n_ = 0;
    double t_prev_ = 0.0;  // t_{n-1}
    double dt_prev_ = 0.0; // t_{n-1} - t_{n-2}
    double u_prev_ = 0.0;  // U^{n-1}
};

/// Batch form of FastConvolver; checks every step before doing any work.
std::vector<double> fast_convolve(const TimeGrid& grid, std::span<const double> u,
                                  const ExpSum& kernel, double alpha);

/// eps t_n^alpha / Gamma(alpha+1) max_{j<=n} |U^j|: bound on |fast - direct|
/// for a kernel with relative error at most eps.
std::vector<double> error_bound(const TimeGrid& grid, std::span<const double> u, double alpha,
                                double eps);

struct Signal {
    std::vector<double> t; // t_1..t_Nt (t_0 = 0 is implicit unless present)
    std::vector<double> u;
};

/// Reads `t,U` rows (header line required, `#` lines skipped). A leading row
/// with t = 0 is accepted and dropped.
Signal read_signal_csv(std::istream& in);

/// Writes `t,fast,direct,bound` (or `t,fast,bound` when direct is empty).
void write_convolution_csv(std::ostream& out, std::span<const double> t,
                           std::span<const double> fast, std::span<const double> direct,
                           std::span<const double> bound);

} // namespace powexp::fastconv
