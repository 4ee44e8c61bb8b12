#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "powexp/exp_sum.hpp"

namespace powexp::prony {

/// Power-sum moments g_j = sum_l w_l (a_l / scale)^j, j = 0..J-1. The
/// exponents are divided by `scale` (the largest head exponent) so the
/// moments neither underflow nor overflow.
struct Moments {
    double scale = 1.0;
    std::vector<double> g;
};

Moments moments(std::span<const Term> head, int J);

/// Result of replacing L terms by K terms that match the first 2K moments.
struct PronyReduction {
    int L = 0;
    int K = 0;
    Moments moments;             // 2K scaled moments
    std::vector<double> poly;    // q_0..q_K of the scaled polynomial, q_K = 1
    std::vector<Term> reduced;   // (a~_k, w~_k) in original units, ascending a~
    double cond_estimate = 0.0;  // 1-norm condition number of the Hankel matrix
    double residual = 0.0;       // ||V w~ - g|| / ||g|| over the 2K moment equations
    bool ill_conditioned = false; // cond_estimate > 1e14; a warning, not a failure
};

inline constexpr double kIllConditionedThreshold = 1e14;
inline constexpr double kImagTolerance = 1e-8;

/// Prony's method on a head of L = head.size() terms with K output terms
/// (2K - 1 <= L, all a and w positive):
///   1. moments g_0..g_{2K-1};
///   2. solve the K x K Hankel system sum_m g_{j+m} q_m = -g_{j+K};
///   3. roots of Q(z) = sum q_k z^k from the companion matrix;
///   4. least-squares weights on the 2K x K Vandermonde system.
/// Throws Error{RootsNotRealPositive} when a root is complex (relative
/// imaginary part above 1e-8), non-positive or repeated, and
/// Error{WeightsNotPositive} when a fitted weight is not positive.
PronyReduction prony_reduce(std::span<const Term> head, int K);

/// prony_reduce() without the K = 1 shortcut a~ = g_1/g_0, w~ = g_0.
PronyReduction prony_reduce_general(std::span<const Term> head, int K);

/// max over the grid of |t^beta / Gamma(beta) (sum reduced - sum head)|.
double eta_error(std::span<const Term> head, std::span<const Term> reduced, double beta,
                 std::span<const double> grid);

/// Smallest eta the scan reports as meaningful; values below are at the
/// rounding floor of the difference of two O(1) sums.
inline constexpr double kEtaFloor = 1e-15;

struct ScanEntry {
    int L = 0;
    int K = 0;
    double eta_max = 0.0; // +inf when prony_reduce failed for this (L, K)
    bool below_floor = false;
};

struct ScanResult {
    int L = 0; // 0 when no reduction fits the budget
    int K = 0;
    PronyReduction reduction;
};

/// For each K = 1..K_max find the largest L (head = the L smallest exponents)
/// whose eta stays below `budget`, scanning L downward from sum.size(). Returns
/// the (L, K) with the largest saving L - K, ties going to the smaller K.
ScanResult auto_scan(const ExpSum& sum, double budget, int K_max, std::span<const double> grid);

/// eta for every (L, K) in the given ranges, rows ordered by descending L.
std::vector<ScanEntry> scan_table(const ExpSum& sum, int L_min, int L_max, int K_max,
                                  std::span<const double> grid);

/// Replace the L smallest-exponent terms of `sum` by the reduction's terms.
ExpSum splice(const ExpSum& sum, int L, const PronyReduction& reduction);

/// CSV `L,K,eta_max`.
void write_scan_csv(std::ostream& out, const std::vector<ScanEntry>& rows);

} // namespace powexp::prony
