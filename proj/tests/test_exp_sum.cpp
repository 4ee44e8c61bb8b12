#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "powexp/errors.hpp"
#include "powexp/exp_sum.hpp"
#include "powexp/specfun.hpp"
#include "support.hpp"

using namespace powexp;
using powexp::test::rel_diff;

namespace {

std::vector<Term> random_terms(int n)
{
    std::vector<Term> terms;
    for (int i = 0; i < n; ++i) {
        terms.push_back({test::log_uniform(1e-3, 1e3), test::log_uniform(1e-3, 1e2)});
    }
    return terms;
}

} // namespace

TEST_SUITE("expsum") {

TEST_CASE("construction enforces the invariants")
{
    CHECK_THROWS_AS(ExpSum(0.5, {{1.0, -1.0}}, 1e-3, 1.0, Provenance::File), Error);
    CHECK_THROWS_AS(ExpSum(0.5, {{0.0, 1.0}}, 1e-3, 1.0, Provenance::File), Error);
    CHECK_THROWS_AS(ExpSum(0.5, {{1.0, 1.0}, {1.0, 2.0}}, 1e-3, 1.0, Provenance::File), Error);
    CHECK_THROWS_AS(ExpSum(0.5, {{1.0, 1.0}}, 1.0, 1.0, Provenance::File), Error);
    CHECK_THROWS_AS(ExpSum(-0.5, {{1.0, 1.0}}, 1e-3, 1.0, Provenance::File), Error);
    try {
        ExpSum(0.5, {{1.0, std::nan("")}}, 1e-3, 1.0, Provenance::File);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidSum);
    }

    const ExpSum s(0.5, {{3.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}, 1e-3, 1.0, Provenance::Bm);
    REQUIRE(s.size() == 3);
    CHECK(s.terms()[0].a == 1.0);
    CHECK(s.terms()[1].a == 2.0);
    CHECK(s.terms()[2].a == 3.0);
    CHECK(s.terms()[0].w == 2.0);
}

TEST_CASE("provenance names round trip")
{
    for (auto p : {Provenance::Bm, Provenance::De, Provenance::PronyReduced, Provenance::File}) {
        CHECK(provenance_from_string(to_string(p)) == p);
    }
    CHECK(std::string(to_string(Provenance::PronyReduced)) == "prony-reduced");
    CHECK_THROWS_AS(provenance_from_string("gauss"), Error);
}

TEST_CASE("single term tends to one at the origin")
{
    const double b = 0.75;
    const ExpSum s(b, {{1.0, specfun::gamma(b)}}, 1e-6, 1.0, Provenance::File);
    CHECK(std::abs(evaluate(s, 1e-12) - 1.0) < 1e-11);
}

TEST_CASE("worked sum at the left endpoint")
{
    const auto& s = test::example1().sum;
    const double t = test::kDelta;
    CHECK(std::abs(1.0 - std::pow(t, 0.75) * evaluate(s, t)) <= 0.92e-8);
}

TEST_CASE("evaluation flags points outside the interval")
{
    const auto& s = test::example1().sum;
    CHECK_FALSE(evaluate_flagged(s, 1.0).outside_interval);
    CHECK(evaluate_flagged(s, 100.0).outside_interval);
    CHECK(evaluate_flagged(s, 1e-9).outside_interval);
    CHECK(evaluate_flagged(s, 100.0).value == s(100.0));
}

TEST_CASE("random sums agree with 50-digit summation")
{
    for (int i = 0; i < 200; ++i) {
        const ExpSum s(test::uniform(0.1, 2.0), random_terms(5), 1e-6, 10.0, Provenance::File);
        const double t = test::log_uniform(1e-6, 10.0);
        const double ref = test::mp_sum_exponentials(s.terms(), t);
        if (ref > 1e-300) {
            CHECK(rel_diff(s.raw_sum(t), ref) < 1e-14);
        }
    }
    // And on the worked 102-term sum, with its 12 orders of magnitude.
    const auto& s = test::example1().sum;
    for (double t : test::example_grid()) {
        CHECK(rel_diff(s.raw_sum(t), test::mp_sum_exponentials(s.terms(), t)) < 1e-14);
    }
}

TEST_CASE("evaluation ignores term order")
{
    auto terms = random_terms(40);
    const ExpSum s(0.6, terms, 1e-4, 1.0, Provenance::File);
    std::reverse(terms.begin(), terms.end());
    for (int i = 0; i < 50; ++i) {
        const double t = test::log_uniform(1e-4, 1.0);
        CHECK(rel_diff(sum_exponentials(terms, t), s.raw_sum(t)) < 1e-14);
    }
}

TEST_CASE("evaluation decreases in t")
{
    const auto& s = test::example1().sum;
    const auto& g = test::example_grid();
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(s(g[i]) < s(g[i - 1]));
    }
}

TEST_CASE("geometric grid")
{
    const auto g = geometric_grid(1e-6, 10.0, 751);
    REQUIRE(g.size() == 751);
    CHECK(g.front() == 1e-6);
    CHECK(g.back() == 10.0);
    const double ratio = std::pow(1e7, 1.0 / 750.0);
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] > g[i - 1]);
        CHECK(rel_diff(g[i] / g[i - 1], ratio) < 1e-12);
    }
    CHECK(geometric_grid(1.0, 2.0, 2) == std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(geometric_grid(1.0, 1.0, 10), Error);
    CHECK_THROWS_AS(geometric_grid(1.0, 2.0, 1), Error);
}

TEST_CASE("error report")
{
    const auto& s = test::example1().sum;
    const auto r = relative_error_report(s, test::example_grid());
    REQUIRE(r.rho.size() == r.grid.size());
    double m = 0.0;
    for (double v : r.rho) {
        m = std::max(m, std::abs(v));
    }
    CHECK(r.max_abs == m);
    CHECK(r.max_abs <= 0.92e-8);
    const auto it = std::find(r.grid.begin(), r.grid.end(), r.argmax_t);
    REQUIRE(it != r.grid.end());
    CHECK(std::abs(r.rho[static_cast<std::size_t>(it - r.grid.begin())]) == r.max_abs);

    const ExpSum empty(0.75, {}, 1e-6, 10.0, Provenance::File);
    const auto e = relative_error_report(empty, test::example_grid());
    CHECK(std::all_of(e.rho.begin(), e.rho.end(), [](double v) { return v == 1.0; }));
    CHECK(e.max_abs == 1.0);

    std::ostringstream os;
    write_report_csv(os, relative_error_report(s, std::vector<double>{1e-6, 1.0}));
    CHECK(os.str().rfind("t,rho\n9.9999999999999995e-07,", 0) == 0);
}

TEST_CASE("rescaling leaves the relative error unchanged")
{
    const auto& s = test::example1().sum;
    const auto one = rescale(s, 1.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(one.terms()[i].a == s.terms()[i].a);
        CHECK(one.terms()[i].w == s.terms()[i].w);
    }

    // Normalized [delta/T, 1] sum scaled back by T.
    const auto normalized = rescale(s, 0.1);
    CHECK(normalized.t_hi() == doctest::Approx(1.0));
    const auto back = rescale(normalized, 10.0);
    std::vector<double> scaled_grid;
    for (double t : test::example_grid()) {
        scaled_grid.push_back(0.1 * t);
    }
    const auto r0 = relative_error_report(normalized, scaled_grid);
    const auto r1 = relative_error_report(back, test::example_grid());
    for (std::size_t i = 0; i < r0.rho.size(); ++i) {
        CHECK(std::abs(r0.rho[i] - r1.rho[i]) < 1e-12);
    }

    for (double T_prime : {0.1, 7.0}) {
        const ExpSum r(0.4, random_terms(12), 1e-3, 1.0, Provenance::File);
        const auto rs = rescale(r, T_prime);
        for (int i = 0; i < 100; ++i) {
            const double t = test::log_uniform(1e-3 * T_prime, T_prime);
            const double rho_scaled = 1.0 - std::pow(t, 0.4) * rs(t);
            const double rho = 1.0 - std::pow(t / T_prime, 0.4) * r(t / T_prime);
            CHECK(std::abs(rho_scaled - rho) <= 1e-13 * std::max(1.0, std::abs(rho)));
        }
    }
}

TEST_CASE("first-term error model")
{
    const double h = 1.0 / 3.0;
    double peak = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double t = test::log_uniform(1e-6, 10.0);
        const double m = error_model_first_term(0.5, h, t);
        CHECK(std::abs(m) <= 2.0 * specfun::amplitude_ratio(0.5, 3.0) * (1.0 + 1e-15));
        peak = std::max(peak, std::abs(m));
    }
    CHECK(rel_diff(2.0 * specfun::amplitude_ratio(0.5, 3.0), 3.91384e-13) < 5e-5);
    CHECK(peak > 0.99 * 3.91384e-13);

    // The unreduced worked sum follows the model up to the truncation tails.
    const auto& s = test::example1().sum;
    const double h1 = test::example1().recipe.params.h;
    const auto r = relative_error_report(s, test::example_grid());
    double worst = 0.0;
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        worst = std::max(worst, std::abs(r.rho[i] - error_model_first_term(0.75, h1, r.grid[i])));
    }
    CHECK(worst <= 1e-9 + 5.0 * specfun::amplitude_ratio(0.75, 2.0 / h1));
}

TEST_CASE("right-tail bound on added terms")
{
    const double b = 0.75;
    const auto& recipe = test::example1().recipe;
    const double h = recipe.params.h;
    const int M = recipe.params.M;
    const int N = recipe.params.N;
    const ExpSum base(b, bm_terms(b, h, M, N), test::kDelta, test::kT, Provenance::Bm);
    const ExpSum more(b, bm_terms(b, h, M, N + 10), test::kDelta, test::kT, Provenance::Bm);
    const double gamma_b = specfun::gamma(b);
    for (double t : test::example_grid()) {
        if (t * std::exp(N * h) < b) {
            continue;
        }
        const double change = std::pow(t, b) * (more(t) - base(t));
        CHECK(change >= 0.0);
        CHECK(change <= specfun::upper_inc_gamma(b, t * std::exp(N * h)) / gamma_b + 1e-15);
    }
}

} // TEST_SUITE
