#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "mclab/model.hpp"
#include "mclab/sampling.hpp"

namespace mclab {

/// Thrown when an iterative estimate fails to converge; carries the last
/// value reached so callers can still inspect it.
class NumericFailure : public std::runtime_error {
  public:
    NumericFailure(const std::string& what, double last)
        : std::runtime_error(what), last_estimate(last) {}
    double last_estimate;
};

/// One Monte-Carlo comparison of a tail bound against observed frequency.
/// theoretical_tail is clamped to [0,1] for reporting; theoretical_threshold
/// keeps the raw deviation level (or raw bound value) so ordering checks can
/// use the unclamped number.
struct BoundReport {
    std::string bound_name;
    double theoretical_tail = 0.0;
    double theoretical_threshold = 0.0;
    double empirical_exceed_frequency = 0.0;
    long trials = 0;
    double std_error = 0.0;  // sqrt(f(1-f)/trials)
    std::string params;
};

double clamp_probability(double p);

/// (d1+d2) * exp(-(tau^2/2) / (rho_sq_sum + M*tau/3)), unclamped.
double bernstein_tail(int d1, int d2, double rho_sq_sum, double M, double tau);

/// (d1+d2) * exp(-(3/8) tau^2 / rho_sq_sum); only valid (and only an upper
/// bound on bernstein_tail) for tau <= rho_sq_sum / M, else std::domain_error.
double bernstein_condensed(int d1, int d2, double rho_sq_sum, double M, double tau);

/// [[0, X], [X^T, 0]]; eigenvalues are +-sigma_i(X) padded with |d1-d2| zeros.
Matrix hermitian_dilation(const Matrix& X);

/// exp of a symmetric matrix via eigendecomposition.
Matrix sym_expm(const Matrix& A);

struct TracePair {
    double lhs = 0.0;  // tr exp(A+B)
    double rhs = 0.0;  // tr(exp(A) exp(B))
};

/// Evaluates both sides of tr exp(A+B) <= tr(exp(A) exp(B)). Throws
/// std::invalid_argument on asymmetric input and NumericFailure if the
/// inequality is violated beyond 1e-9 relative slack.
TracePair golden_thompson_check(const Matrix& A, const Matrix& B);

/// Empirical check of P[X not<= A] <= tr(E[X] A^{-1}) for a PSD ensemble.
/// The event is lambda_min(A - X) < -1e-12; the reported bound uses the
/// empirical mean of X. Trial t draws from stream (seed, t).
BoundReport operator_markov_check(const std::function<Matrix(RngStream&)>& ensemble,
                                  const Matrix& A, long trials, uint64_t seed);

/// Spectral norm of Z -> (n1 n2 / m) P_T R_Omega P_T (Z) - P_T(Z), computed
/// matrix-free by power iteration on the squared operator (tolerance 1e-8 on
/// the Rayleigh quotient, cap 10000, NumericFailure past the cap).
double superop_deviation_norm(const TangentSpace& ts, const ObservationSet& obs);

/// Spectral norm of (n1 n2 / m) R_Omega(Z) - Z for a fixed Z.
double inf_norm_deviation(const ObservationSet& obs, const Matrix& Z);

/// Entry-wise norm of (n1 n2 / m) P_T R_Omega (Z) - Z for Z in T
/// (||P_Tperp(Z)||_F <= 1e-8 ||Z||_F required).
double pt_romega_inf_deviation(const TangentSpace& ts, const ObservationSet& obs,
                               const Matrix& Z);

/// (||Z||, sqrt(n1 n2) * max|Z_ab|); the first never exceeds the second.
std::pair<double, double> spectral_vs_inf_bound_check(const Matrix& Z);

/// d * product of per-term norms ||E[exp(T X_k T^* - T A T^*)]||.
double chernoff_operator_bound(int d, std::span<const double> per_term_norms);

// Tail-bound formulas for the sampling operator, natural log throughout.
// Each bound comes with the failure probability of the event it controls
// and the sample-size proviso below which the bound is not asserted.

double near_isometry_bound(Index n1, Index n2, Index r, double mu0, Index m,
                           double beta);
double near_isometry_failure_prob(Index n2, double beta);  // 2 n2^(2-2beta)
double near_isometry_min_m(Index n1, Index n2, Index r, double mu0, double beta);

double inf_deviation_bound(Index n1, Index n2, Index m, double beta);
double inf_deviation_failure_prob(Index n1, Index n2, double beta);  // (n1+n2)^(1-beta)
double inf_deviation_min_m(Index n1, Index n2, double beta);

// Requires beta > 2.
double contraction_bound(Index n1, Index n2, Index r, double mu0, Index m, double beta);
double contraction_failure_prob(Index n2, double beta);  // 2 n2^(2-beta)
double contraction_min_m(Index n1, Index n2, Index r, double mu0, double beta);

}  // namespace mclab
