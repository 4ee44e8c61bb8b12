#include "powexp/fastconv.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "powexp/errors.hpp"
#include "powexp/specfun.hpp"

namespace powexp::fastconv {

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::Domain, "alpha must lie in (0,1)");
    }
}

void check_lengths(const TimeGrid& grid, std::span<const double> u)
{
    if (static_cast<int>(u.size()) != grid.steps()) {
        throw Error(ErrorCode::Domain, "signal length " + std::to_string(u.size()) +
                                           " does not match grid steps " +
                                           std::to_string(grid.steps()));
    }
}

} // namespace

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)), min_step_(0.0)
{
    if (points_.size() < 2 || points_.front() != 0.0) {
        throw Error(ErrorCode::Domain, "time grid needs t_0 = 0 and at least one step");
    }
    min_step_ = points_[1] - points_[0];
    for (std::size_t i = 1; i < points_.size(); ++i) {
        const double dt = points_[i] - points_[i - 1];
        if (!(dt > 0.0) || !std::isfinite(points_[i])) {
            throw Error(ErrorCode::Domain, "time grid must be strictly increasing");
        }
        min_step_ = std::min(min_step_, dt);
    }
}

TimeGrid TimeGrid::uniform(double T, int steps)
{
    if (!(T > 0.0) || steps < 1) {
        throw Error(ErrorCode::Domain, "uniform grid needs T > 0 and steps >= 1");
    }
    std::vector<double> pts(static_cast<std::size_t>(steps) + 1);
    for (int n = 0; n <= steps; ++n) {
        pts[static_cast<std::size_t>(n)] = T * n / steps;
    }
    pts.back() = T;
    return TimeGrid(std::move(pts));
}

std::vector<double> direct_convolve(const TimeGrid& grid, std::span<const double> u, double alpha)
{
    check_alpha(alpha);
    check_lengths(grid, u);
    const auto t = grid.points();
    const double inv_g = 1.0 / specfun::gamma(alpha + 1.0);
    const int nt = grid.steps();
    std::vector<double> out(static_cast<std::size_t>(nt));
    for (int n = 1; n <= nt; ++n) {
        const double tn = t[static_cast<std::size_t>(n)];
        double acc = 0.0;
        double prev = std::pow(tn, alpha); // (t_n - t_0)^alpha
        for (int j = 1; j <= n; ++j) {
            const double next = (j == n) ? 0.0 : std::pow(tn - t[static_cast<std::size_t>(j)], alpha);
            acc += (prev - next) * u[static_cast<std::size_t>(j - 1)];
            prev = next;
        }
        out[static_cast<std::size_t>(n - 1)] = acc * inv_g;
    }
    return out;
}

FastConvolver::FastConvolver(const ExpSum& kernel, double alpha)
    : alpha_(alpha), t_lo_(kernel.t_lo()), t_hi_(kernel.t_hi())
{
    check_alpha(alpha);
    if (std::abs(kernel.beta() - (1.0 - alpha)) > 1e-12) {
        throw Error(ErrorCode::Domain, "kernel beta must equal 1 - alpha");
    }
    inv_gamma_alpha1_ = 1.0 / specfun::gamma(alpha + 1.0);
    const double prefactor = 1.0 / (specfun::gamma(alpha) * specfun::gamma(1.0 - alpha));
    exponents_.reserve(kernel.size());
    scaled_weights_.reserve(kernel.size());
    for (const auto& term : kernel.terms()) {
        exponents_.push_back(term.a);
        scaled_weights_.push_back(prefactor * term.w / term.a);
    }
    theta_.assign(kernel.size(), 0.0);
}

double FastConvolver::step(double t_n, double u_n)
{
    const double dt = t_n - t_prev_;
    if (!(dt > 0.0)) {
        throw Error(ErrorCode::Domain, "time levels must strictly increase");
    }
    if (t_n > t_hi_) {
        throw Error(ErrorCode::PreconditionHorizon,
                    "t_n = " + std::to_string(t_n) + " exceeds the kernel's T = " +
                        std::to_string(t_hi_));
    }
    if (n_ >= 1) {
        if (dt < t_lo_) {
            throw Error(ErrorCode::PreconditionStep,
                        "step " + std::to_string(dt) + " is shorter than the kernel's delta = " +
                            std::to_string(t_lo_));
        }
        // Theta^n = kappa U^{n-1} + e^{-a dt_n} Theta^{n-1}, with
        // kappa = (w/a) e^{-a dt_n} (1 - e^{-a dt_{n-1}}) / (Gamma(alpha) Gamma(1-alpha)).
        for (std::size_t l = 0; l < theta_.size(); ++l) {
            const double a = exponents_[l];
            const double decay = std::exp(-a * dt);
            const double kappa = scaled_weights_[l] * decay * -std::expm1(-a * dt_prev_);
            theta_[l] = kappa * u_prev_ + decay * theta_[l];
        }
    }
    double history = 0.0;
    for (double th : theta_) {
        history += th;
    }
    ++n_;
    dt_prev_ = dt;
    t_prev_ = t_n;
    u_prev_ = u_n;
    return std::pow(dt, alpha_) * inv_gamma_alpha1_ * u_n + history;
}

std::vector<double> fast_convolve(const TimeGrid& grid, std::span<const double> u,
                                  const ExpSum& kernel, double alpha)
{
    check_lengths(grid, u);
    if (grid.steps() >= 2 && grid.min_step() < kernel.t_lo()) {
        throw Error(ErrorCode::PreconditionStep,
                    "grid's smallest step " + std::to_string(grid.min_step()) +
                        " is shorter than the kernel's delta = " + std::to_string(kernel.t_lo()));
    }
    if (grid.horizon() > kernel.t_hi()) {
        throw Error(ErrorCode::PreconditionHorizon, "grid horizon exceeds the kernel's T");
    }
    FastConvolver conv(kernel, alpha);
    const auto t = grid.points();
    std::vector<double> out;
    out.reserve(u.size());
    for (std::size_t n = 1; n < t.size(); ++n) {
        out.push_back(conv.step(t[n], u[n - 1]));
    }
    return out;
}

std::vector<double> error_bound(const TimeGrid& grid, std::span<const double> u, double alpha,
                                double eps)
{
    check_alpha(alpha);
    check_lengths(grid, u);
    const auto t = grid.points();
    const double inv_g = 1.0 / specfun::gamma(alpha + 1.0);
    std::vector<double> out;
    out.reserve(u.size());
    double umax = 0.0;
    for (std::size_t n = 1; n < t.size(); ++n) {
        umax = std::max(umax, std::abs(u[n - 1]));
        out.push_back(eps * std::pow(t[n], alpha) * inv_g * umax);
    }
    return out;
}

Signal read_signal_csv(std::istream& in)
{
    Signal s;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("t,", 0) == 0) {
                continue;
            }
        }
        std::istringstream row(line);
        double t = 0.0;
        double u = 0.0;
        char comma = 0;
        if (!(row >> t >> comma >> u) || comma != ',') {
            throw Error(ErrorCode::Io, "signal csv: malformed row " + std::to_string(line_no));
        }
        if (s.t.empty() && t == 0.0) {
            continue;
        }
        s.t.push_back(t);
        s.u.push_back(u);
    }
    return s;
}

void write_convolution_csv(std::ostream& out, std::span<const double> t,
                           std::span<const double> fast, std::span<const double> direct,
                           std::span<const double> bound)
{
    const auto old_precision = out.precision(17);
    const bool with_direct = !direct.empty();
    out << (with_direct ? "t,fast,direct,bound\n" : "t,fast,bound\n");
    for (std::size_t i = 0; i < t.size(); ++i) {
        out << t[i] << ',' << fast[i];
        if (with_direct) {
            out << ',' << direct[i];
        }
        out << ',' << bound[i] << '\n';
    }
    out.precision(old_precision);
}

} // namespace powexp::fastconv
