#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "powexp/errors.hpp"
#include "powexp/fastconv.hpp"
#include "powexp/specfun.hpp"
#include "support.hpp"

using namespace powexp;
using namespace powexp::fastconv;
using powexp::test::rel_diff;

namespace {

constexpr double kAlpha = 0.25;

const ExpSum& kernel() { return test::example1_reduced(); }

std::vector<double> random_signal(std::size_t n, double lo = -1.0, double hi = 1.0)
{
    std::vector<double> u(n);
    for (auto& v : u) {
        v = test::uniform(lo, hi);
    }
    return u;
}

// Nonuniform admissible grid: steps in [delta, 1] and horizon <= T.
TimeGrid random_grid(int steps)
{
    std::vector<double> pts{0.0};
    const double room = 10.0 / steps;
    for (int i = 0; i < steps; ++i) {
        pts.push_back(pts.back() + test::log_uniform(1.001e-6, std::min(1.0, room)));
    }
    return TimeGrid(std::move(pts));
}

double scale_at(double t, double umax) { return std::pow(t, kAlpha) / specfun::gamma(kAlpha + 1.0) * umax; }

std::vector<double> mp_direct(const TimeGrid& grid, const std::vector<double>& u, double alpha)
{
    using test::mp50;
    const auto t = grid.points();
    const mp50 a(alpha);
    const mp50 g = boost::math::tgamma(a + 1);
    std::vector<double> out;
    for (std::size_t n = 1; n < t.size(); ++n) {
        mp50 acc = 0;
        const mp50 tn(t[n]);
        for (std::size_t j = 1; j <= n; ++j) {
            const mp50 left = boost::multiprecision::pow(tn - mp50(t[j - 1]), a);
            const mp50 right = j == n ? mp50(0) : boost::multiprecision::pow(tn - mp50(t[j]), a);
            acc += (left - right) * mp50(u[j - 1]);
        }
        out.push_back(static_cast<double>(acc / g));
    }
    return out;
}

} // namespace

TEST_SUITE("fastconv") {

TEST_CASE("time grid validation")
{
    CHECK_THROWS_AS(TimeGrid({0.0}), Error);
    CHECK_THROWS_AS(TimeGrid({0.1, 0.2}), Error);
    CHECK_THROWS_AS(TimeGrid({0.0, 0.2, 0.2}), Error);
    const TimeGrid g({0.0, 0.5, 0.75, 2.0});
    CHECK(g.steps() == 3);
    CHECK(g.min_step() == 0.25);
    CHECK(g.horizon() == 2.0);
    const auto u = TimeGrid::uniform(10.0, 1000);
    CHECK(u.steps() == 1000);
    CHECK(u.horizon() == 10.0);
    CHECK(u.min_step() == doctest::Approx(1e-2));
}

TEST_CASE("direct sum telescopes for a constant signal")
{
    const auto g = random_grid(300);
    const std::vector<double> one(300, 1.0);
    const auto d = direct_convolve(g, one, kAlpha);
    for (int n = 1; n <= g.steps(); ++n) {
        const double tn = g.points()[static_cast<std::size_t>(n)];
        CHECK(rel_diff(d[static_cast<std::size_t>(n - 1)], scale_at(tn, 1.0)) < 1e-13);
    }
}

TEST_CASE("alpha near one approaches the ordinary integral")
{
    const auto g = TimeGrid::uniform(10.0, 200);
    const std::vector<double> one(200, 1.0);
    const auto d = direct_convolve(g, one, 0.999);
    for (int n = 1; n <= g.steps(); ++n) {
        CHECK(rel_diff(d[static_cast<std::size_t>(n - 1)], g.points()[static_cast<std::size_t>(n)]) < 0.01);
    }
}

TEST_CASE("direct sum matches 50-digit evaluation")
{
    for (int rep = 0; rep < 10; ++rep) {
        const auto g = random_grid(20);
        const auto u = random_signal(20);
        const auto d = direct_convolve(g, u, kAlpha);
        const auto ref = mp_direct(g, u, kAlpha);
        for (std::size_t n = 0; n < d.size(); ++n) {
            const double tn = g.points()[n + 1];
            CHECK(std::abs(d[n] - ref[n]) <= 1e-13 * std::max(std::abs(ref[n]), scale_at(tn, 1.0)));
        }
    }
}

TEST_CASE("a single step has no history")
{
    const TimeGrid g({0.0, 0.3});
    const std::vector<double> u{0.7};
    CHECK(fast_convolve(g, u, kernel(), kAlpha)[0] == direct_convolve(g, u, kAlpha)[0]);
    // No history is used, so a step shorter than delta is fine here.
    const TimeGrid tiny({0.0, 1e-8});
    CHECK_NOTHROW(fast_convolve(tiny, u, kernel(), kAlpha));
}

TEST_CASE("fast matches direct within the kernel's certified error")
{
    const double eps = relative_error_report(kernel(), test::example_grid()).max_abs;
    const auto g = TimeGrid::uniform(10.0, 1000);
    for (int rep = 0; rep < 3; ++rep) {
        const auto u = random_signal(1000);
        const auto f = fast_convolve(g, u, kernel(), kAlpha);
        const auto d = direct_convolve(g, u, kAlpha);
        const auto b = error_bound(g, u, kAlpha, eps);
        for (std::size_t n = 0; n < f.size(); ++n) {
            CHECK(std::abs(f[n] - d[n]) <= b[n] + 1e-15);
        }
    }
    // The bound does not need a uniform grid.
    for (int rep = 0; rep < 20; ++rep) {
        const auto gg = random_grid(150);
        const auto u = random_signal(150);
        const auto f = fast_convolve(gg, u, kernel(), kAlpha);
        const auto d = direct_convolve(gg, u, kAlpha);
        const auto b = error_bound(gg, u, kAlpha, eps);
        for (std::size_t n = 0; n < f.size(); ++n) {
            CHECK(std::abs(f[n] - d[n]) <= b[n] + 1e-15);
        }
    }
}

TEST_CASE("linearity, positivity and streaming on random cases")
{
    for (int rep = 0; rep < 1000; ++rep) {
        const int steps = 1 + static_cast<int>(test::uniform(0.0, 60.0));
        const auto g = random_grid(steps);
        const auto u = random_signal(static_cast<std::size_t>(steps));
        const auto v = random_signal(static_cast<std::size_t>(steps));
        const double c = test::uniform(-3.0, 3.0);

        std::vector<double> w(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            w[i] = c * u[i] + v[i];
        }
        const auto fu = fast_convolve(g, u, kernel(), kAlpha);
        const auto fv = fast_convolve(g, v, kernel(), kAlpha);
        const auto fw = fast_convolve(g, w, kernel(), kAlpha);
        for (std::size_t n = 0; n < fw.size(); ++n) {
            const double scale = scale_at(g.points()[n + 1], std::abs(c) + 1.0);
            CHECK(std::abs(fw[n] - (c * fu[n] + fv[n])) <= 1e-13 * scale);
        }

        std::vector<double> pos(u.size());
        std::transform(u.begin(), u.end(), pos.begin(), [](double x) { return std::abs(x); });
        const auto fp = fast_convolve(g, pos, kernel(), kAlpha);
        CHECK(std::all_of(fp.begin(), fp.end(), [](double x) { return x >= 0.0; }));

        FastConvolver conv(kernel(), kAlpha);
        for (int n = 1; n <= steps; ++n) {
            const double y = conv.step(g.points()[static_cast<std::size_t>(n)], u[static_cast<std::size_t>(n - 1)]);
            CHECK(y == fu[static_cast<std::size_t>(n - 1)]);
        }
        CHECK(conv.steps_taken() == steps);
        CHECK(conv.theta().size() == kernel().size());
    }
}

TEST_CASE("preconditions")
{
    const std::vector<double> u(3, 1.0);
    try {
        fast_convolve(TimeGrid({0.0, 1.0, 1.0 + 1e-7, 2.0}), u, kernel(), kAlpha);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionStep);
    }
    try {
        fast_convolve(TimeGrid({0.0, 1.0, 5.0, 20.0}), u, kernel(), kAlpha);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionHorizon);
    }
    // Streaming form detects the same violations step by step.
    FastConvolver conv(kernel(), kAlpha);
    conv.step(1.0, 1.0);
    CHECK_THROWS_AS(conv.step(1.0 + 1e-8, 1.0), Error);
    CHECK_THROWS_AS(conv.step(11.0, 1.0), Error);

    CHECK_THROWS_AS(FastConvolver(kernel(), 0.3), Error);
    CHECK_THROWS_AS(direct_convolve(TimeGrid({0.0, 1.0}), u, kAlpha), Error);
    CHECK_THROWS_AS(direct_convolve(TimeGrid({0.0, 1.0}), std::vector<double>{1.0}, 1.0), Error);
}

TEST_CASE("fast cost grows linearly with the number of steps")
{
    const int sizes[] = {1000, 10000, 100000};
    double times[3];
    for (int k = 0; k < 3; ++k) {
        const auto g = TimeGrid::uniform(10.0, sizes[k]);
        const auto u = random_signal(static_cast<std::size_t>(sizes[k]));
        // Small runs are repeated so the clock resolution does not matter.
        const int reps = 100000 / sizes[k];
        double best = 1e300;
        for (int trial = 0; trial < 5; ++trial) {
            const auto start = std::chrono::steady_clock::now();
            double sink = 0.0;
            for (int r = 0; r < reps; ++r) {
                sink += fast_convolve(g, u, kernel(), kAlpha).back();
            }
            const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
            CHECK(std::isfinite(sink));
            best = std::min(best, el.count() / reps);
        }
        times[k] = best;
    }
    const double slope = std::log(times[2] / times[0]) / std::log(100.0);
    CAPTURE(times[0]);
    CAPTURE(times[2]);
    CHECK(slope >= 0.9);
    CHECK(slope <= 1.1);
}

TEST_CASE("signal CSV input and convolution CSV output")
{
    std::istringstream in("# comment\nt,U\n0,0\n0.5,1.5\n1,-2\n");
    const auto s = read_signal_csv(in);
    CHECK(s.t == std::vector<double>{0.5, 1.0});
    CHECK(s.u == std::vector<double>{1.5, -2.0});

    std::istringstream bad("t,U\n0.5;1\n");
    try {
        read_signal_csv(bad);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }

    const std::vector<double> t{0.5}, f{1.0}, b{0.25};
    std::ostringstream with, without;
    write_convolution_csv(with, t, f, f, b);
    write_convolution_csv(without, t, f, {}, b);
    CHECK(with.str() == "t,fast,direct,bound\n0.5,1,1,0.25\n");
    CHECK(without.str() == "t,fast,bound\n0.5,1,0.25\n");
}

} // TEST_SUITE
