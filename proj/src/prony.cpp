#include "powexp/prony.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "powexp/errors.hpp"
#include "powexp/specfun.hpp"

namespace powexp::prony {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Neumaier accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v)
    {
        const double s = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }

    double value() const { return sum + comp; }
};

void check_head(std::span<const Term> head)
{
    if (head.empty()) {
        throw Error(ErrorCode::Domain, "prony: empty head");
    }
    for (const auto& t : head) {
        if (!(t.a > 0.0) || !(t.w > 0.0)) {
            throw Error(ErrorCode::Domain, "prony: head exponents and weights must be positive");
        }
    }
}

double one_norm(const MatrixXd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

PronyReduction reduce_general(std::span<const Term> head, int K)
{
    PronyReduction out;
    out.L = static_cast<int>(head.size());
    out.K = K;
    out.moments = moments(head, 2 * K);
    const auto& g = out.moments.g;
    const double scale = out.moments.scale;

    // Hankel system for the monic polynomial coefficients.
    MatrixXd H(K, K);
    VectorXd b(K);
    for (int j = 0; j < K; ++j) {
        for (int m = 0; m < K; ++m) {
            H(j, m) = g[static_cast<std::size_t>(j + m)];
        }
        b(j) = -g[static_cast<std::size_t>(j + K)];
    }
    const Eigen::PartialPivLU<MatrixXd> lu(H);
    VectorXd q = lu.solve(b);
    q += lu.solve(b - H * q); // one step of iterative refinement
    out.cond_estimate = one_norm(H) * one_norm(lu.inverse());
    if (!std::isfinite(out.cond_estimate)) {
        out.cond_estimate = std::numeric_limits<double>::infinity();
    }
    out.ill_conditioned = out.cond_estimate > kIllConditionedThreshold;
    out.poly.assign(q.data(), q.data() + K);
    out.poly.push_back(1.0);

    // Roots of Q from its companion matrix.
    MatrixXd C = MatrixXd::Zero(K, K);
    for (int i = 1; i < K; ++i) {
        C(i, i - 1) = 1.0;
    }
    for (int i = 0; i < K; ++i) {
        C(i, K - 1) = -q(i);
    }
    const Eigen::EigenSolver<MatrixXd> eig(C, false);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorCode::RootsNotRealPositive, "prony: companion eigen-solve failed");
    }
    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const std::complex<double> z = eig.eigenvalues()(k);
        if (std::abs(z.imag()) > kImagTolerance * std::abs(z) || !(z.real() > 0.0)) {
            throw Error(ErrorCode::RootsNotRealPositive,
                        "prony: polynomial root (" + std::to_string(z.real()) + ", " +
                            std::to_string(z.imag()) + ") is not real and positive (L=" +
                            std::to_string(out.L) + ", K=" + std::to_string(K) + ")");
        }
        roots.push_back(z.real());
    }
    std::sort(roots.begin(), roots.end());
    for (std::size_t k = 1; k < roots.size(); ++k) {
        if (roots[k] - roots[k - 1] <= 1e-14 * roots[k]) {
            throw Error(ErrorCode::RootsNotRealPositive, "prony: repeated polynomial root");
        }
    }

    // Overdetermined Vandermonde system for the weights.
    MatrixXd V(2 * K, K);
    VectorXd rhs(2 * K);
    for (int j = 0; j < 2 * K; ++j) {
        rhs(j) = g[static_cast<std::size_t>(j)];
        for (int k = 0; k < K; ++k) {
            V(j, k) = std::pow(roots[static_cast<std::size_t>(k)], j);
        }
    }
    const VectorXd w = V.colPivHouseholderQr().solve(rhs);
    out.residual = (V * w - rhs).norm() / rhs.norm();

    out.reduced.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        if (!(w(k) > 0.0)) {
            throw Error(ErrorCode::WeightsNotPositive,
                        "prony: fitted weight " + std::to_string(w(k)) + " is not positive (L=" +
                            std::to_string(out.L) + ", K=" + std::to_string(K) + ")");
        }
        out.reduced.push_back({roots[static_cast<std::size_t>(k)] * scale, w(k)});
    }
    return out;
}

PronyReduction reduce_single(std::span<const Term> head)
{
    PronyReduction out;
    out.L = static_cast<int>(head.size());
    out.K = 1;
    out.moments = moments(head, 2);
    const double g0 = out.moments.g[0];
    const double g1 = out.moments.g[1];
    out.poly = {-g1 / g0, 1.0};
    out.cond_estimate = 1.0;
    out.residual = 0.0;
    out.reduced = {{g1 / g0 * out.moments.scale, g0}};
    return out;
}

} // namespace

Moments moments(std::span<const Term> head, int J)
{
    check_head(head);
    if (J < 1) {
        throw Error(ErrorCode::Domain, "prony: moment count must be positive");
    }
    Moments m;
    m.scale = std::max_element(head.begin(), head.end(), [](const Term& x, const Term& y) {
                  return x.a < y.a;
              })->a;
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(J));
    for (const auto& t : head) {
        const double x = t.a / m.scale;
        double p = t.w;
        for (int j = 0; j < J; ++j) {
            acc[static_cast<std::size_t>(j)].add(p);
            p *= x;
        }
    }
    m.g.reserve(static_cast<std::size_t>(J));
    for (const auto& a : acc) {
        m.g.push_back(a.value());
    }
    return m;
}

PronyReduction prony_reduce(std::span<const Term> head, int K)
{
    check_head(head);
    if (K < 1 || 2 * K - 1 > static_cast<int>(head.size())) {
        throw Error(ErrorCode::Domain, "prony: 1 <= K and 2K - 1 <= L required (L=" +
                                           std::to_string(head.size()) +
                                           ", K=" + std::to_string(K) + ")");
    }
    return K == 1 ? reduce_single(head) : reduce_general(head, K);
}

PronyReduction prony_reduce_general(std::span<const Term> head, int K)
{
    check_head(head);
    if (K < 1 || 2 * K - 1 > static_cast<int>(head.size())) {
        throw Error(ErrorCode::Domain, "prony: 1 <= K and 2K - 1 <= L required");
    }
    return reduce_general(head, K);
}

double eta_error(std::span<const Term> head, std::span<const Term> reduced, double beta,
                 std::span<const double> grid)
{
    const double inv_gamma = 1.0 / specfun::gamma(beta);
    double worst = 0.0;
    for (double t : grid) {
        CompensatedSum diff;
        for (const auto& r : reduced) {
            diff.add(r.w * std::exp(-r.a * t));
        }
        for (const auto& h : head) {
            diff.add(-h.w * std::exp(-h.a * t));
        }
        worst = std::max(worst, std::abs(std::pow(t, beta) * inv_gamma * diff.value()));
    }
    return worst;
}

namespace {

// eta for the L smallest terms reduced to K; +inf if Prony fails.
double try_eta(const ExpSum& sum, int L, int K, std::span<const double> grid,
               PronyReduction* keep = nullptr)
{
    const auto head = sum.terms().first(static_cast<std::size_t>(L));
    try {
        PronyReduction r = prony_reduce(head, K);
        const double eta = eta_error(head, r.reduced, sum.beta(), grid);
        if (keep) {
            *keep = std::move(r);
        }
        return eta;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::RootsNotRealPositive ||
            e.code() == ErrorCode::WeightsNotPositive) {
            return std::numeric_limits<double>::infinity();
        }
        throw;
    }
}

} // namespace

ScanResult auto_scan(const ExpSum& sum, double budget, int K_max, std::span<const double> grid)
{
    ScanResult best;
    const int n = static_cast<int>(sum.size());
    for (int K = 1; K <= K_max; ++K) {
        for (int L = n; L > K && L >= 2 * K - 1; --L) {
            PronyReduction r;
            const double eta = try_eta(sum, L, K, grid, &r);
            if (eta < budget) {
                if (L - K > best.L - best.K) {
                    best = {L, K, std::move(r)};
                }
                break;
            }
        }
    }
    return best;
}

std::vector<ScanEntry> scan_table(const ExpSum& sum, int L_min, int L_max, int K_max,
                                  std::span<const double> grid)
{
    const int n = static_cast<int>(sum.size());
    if (L_min < 1 || L_max > n || L_min > L_max || K_max < 1) {
        throw Error(ErrorCode::Domain, "scan_table: 1 <= L_min <= L_max <= size, K_max >= 1");
    }
    std::vector<ScanEntry> rows;
    for (int L = L_max; L >= L_min; --L) {
        for (int K = 1; K <= K_max && 2 * K - 1 <= L; ++K) {
            const double eta = try_eta(sum, L, K, grid);
            rows.push_back({L, K, eta, eta < kEtaFloor});
        }
    }
    return rows;
}

ExpSum splice(const ExpSum& sum, int L, const PronyReduction& reduction)
{
    if (L == 0) {
        return sum;
    }
    if (L != reduction.L || L > static_cast<int>(sum.size())) {
        throw Error(ErrorCode::Domain, "splice: L does not match the reduction");
    }
    std::vector<Term> terms(reduction.reduced.begin(), reduction.reduced.end());
    const auto tail = sum.terms().subspan(static_cast<std::size_t>(L));
    terms.insert(terms.end(), tail.begin(), tail.end());
    return ExpSum(sum.beta(), std::move(terms), sum.t_lo(), sum.t_hi(), Provenance::PronyReduced);
}

void write_scan_csv(std::ostream& out, const std::vector<ScanEntry>& rows)
{
    const auto old_precision = out.precision(17);
    out << "L,K,eta_max\n";
    for (const auto& r : rows) {
        out << r.L << ',' << r.K << ',' << r.eta_max << '\n';
    }
    out.precision(old_precision);
}

} // namespace powexp::prony
