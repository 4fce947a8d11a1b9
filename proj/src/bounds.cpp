#include "mclab/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace mclab {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void require_symmetric(const Matrix& A, const char* who) {
    if (A.rows() != A.cols() || (A - A.transpose()).norm() > 1e-10)
        throw std::invalid_argument(std::string(who) + ": input must be symmetric");
}

}  // namespace

double clamp_probability(double p) { return std::min(std::max(p, 0.0), 1.0); }

double bernstein_tail(int d1, int d2, double rho_sq_sum, double M, double tau) {
    require(d1 >= 1 && d2 >= 1, "bernstein_tail: dimensions must be positive");
    require(rho_sq_sum > 0.0 && M > 0.0 && tau >= 0.0,
            "bernstein_tail: parameters must be positive");
    return double(d1 + d2) *
           std::exp(-(tau * tau / 2.0) / (rho_sq_sum + M * tau / 3.0));
}

double bernstein_condensed(int d1, int d2, double rho_sq_sum, double M, double tau) {
    require(d1 >= 1 && d2 >= 1, "bernstein_condensed: dimensions must be positive");
    require(rho_sq_sum > 0.0 && M > 0.0 && tau >= 0.0,
            "bernstein_condensed: parameters must be positive");
    if (tau > rho_sq_sum / M)
        throw std::domain_error(
            "bernstein_condensed: tau outside the validity region tau <= sum rho^2 / M");
    return double(d1 + d2) * std::exp(-(3.0 / 8.0) * tau * tau / rho_sq_sum);
}

Matrix hermitian_dilation(const Matrix& X) {
    const Index d1 = X.rows(), d2 = X.cols();
    Matrix Y = Matrix::Zero(d1 + d2, d1 + d2);
    Y.topRightCorner(d1, d2) = X;
    Y.bottomLeftCorner(d2, d1) = X.transpose();
    return Y;
}

Matrix sym_expm(const Matrix& A) {
    require_symmetric(A, "sym_expm");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
    return eig.eigenvectors() * eig.eigenvalues().array().exp().matrix().asDiagonal() *
           eig.eigenvectors().transpose();
}

TracePair golden_thompson_check(const Matrix& A, const Matrix& B) {
    require_symmetric(A, "golden_thompson_check");
    require_symmetric(B, "golden_thompson_check");
    require(A.rows() == B.rows(), "golden_thompson_check: dimension mismatch");
    TracePair t;
    t.lhs = sym_expm(A + B).trace();
    t.rhs = (sym_expm(A) * sym_expm(B)).trace();
    if (t.lhs > t.rhs + 1e-9 * std::abs(t.rhs))
        throw NumericFailure("golden_thompson_check: trace inequality violated", t.lhs);
    return t;
}

BoundReport operator_markov_check(const std::function<Matrix(RngStream&)>& ensemble,
                                  const Matrix& A, long trials, uint64_t seed) {
    require(trials >= 1, "operator_markov_check: trials must be positive");
    require_symmetric(A, "operator_markov_check");
    Eigen::SelfAdjointEigenSolver<Matrix> eigA(A);
    require(eigA.eigenvalues().minCoeff() > 0.0,
            "operator_markov_check: A must be positive definite");

    const Index d = A.rows();
    Matrix mean = Matrix::Zero(d, d);
    long exceed = 0;
    for (long t = 0; t < trials; ++t) {
        RngStream rng(seed, uint64_t(t));
        const Matrix X = ensemble(rng);
        if (X.rows() != d || X.cols() != d)
            throw std::invalid_argument("operator_markov_check: sample dimension mismatch");
        Eigen::SelfAdjointEigenSolver<Matrix> eigX(X);
        if (eigX.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument(
                "operator_markov_check: ensemble produced a non-PSD sample");
        mean += X;
        Eigen::SelfAdjointEigenSolver<Matrix> gap(A - X);
        if (gap.eigenvalues().minCoeff() < -1e-12) ++exceed;
    }
    mean /= double(trials);
    const double bound = (mean * A.inverse()).trace();

    BoundReport report;
    report.bound_name = "operator-markov";
    report.theoretical_threshold = bound;
    report.theoretical_tail = clamp_probability(bound);
    report.trials = trials;
    report.empirical_exceed_frequency = double(exceed) / double(trials);
    const double f = report.empirical_exceed_frequency;
    report.std_error = std::sqrt(f * (1.0 - f) / double(trials));
    return report;
}

double superop_deviation_norm(const TangentSpace& ts, const ObservationSet& obs) {
    if (ts.n1() != obs.n1 || ts.n2() != obs.n2)
        throw std::invalid_argument("superop_deviation_norm: dimension mismatch");
    const double scale = double(obs.n1) * double(obs.n2) / double(obs.m());
    const auto dev = [&](const Matrix& Z) -> Matrix {
        return scale * project_T(ts, apply_R_omega(obs, Z)) - project_T(ts, Z);
    };

    // Power iteration on dev^2. dev is self-adjoint, so squaring merges the
    // +-lambda eigenvalue pair into one top eigenspace and the Rayleigh
    // quotient sqrt(<X, dev^2 X>) = ||dev(X)||_F estimates |lambda|_max.
    RngStream rng(0x706f776572u);
    Matrix X = project_T(ts, gaussian_matrix(obs.n1, obs.n2, rng));
    const double nx = X.norm();
    if (nx == 0.0) return 0.0;
    X /= nx;

    double estimate = 0.0;
    for (int it = 0; it < 10000; ++it) {
        const Matrix W = dev(X);
        const double lambda = W.norm();
        if (lambda < 1e-14) return 0.0;
        const Matrix X2 = dev(W);
        const double n2norm = X2.norm();
        if (n2norm < 1e-300) return 0.0;
        if (it > 0 && std::abs(lambda - estimate) <= 1e-8 * std::max(lambda, 1e-30))
            return lambda;
        estimate = lambda;
        X = X2 / n2norm;
    }
    throw NumericFailure("superop_deviation_norm: power iteration hit the cap",
                         estimate);
}

double inf_norm_deviation(const ObservationSet& obs, const Matrix& Z) {
    if (Z.rows() != obs.n1 || Z.cols() != obs.n2)
        throw std::invalid_argument("inf_norm_deviation: dimension mismatch");
    const double scale = double(obs.n1) * double(obs.n2) / double(obs.m());
    return spectral_norm(scale * apply_R_omega(obs, Z) - Z);
}

double pt_romega_inf_deviation(const TangentSpace& ts, const ObservationSet& obs,
                               const Matrix& Z) {
    if (Z.rows() != obs.n1 || Z.cols() != obs.n2)
        throw std::invalid_argument("pt_romega_inf_deviation: dimension mismatch");
    if (project_T_perp(ts, Z).norm() > 1e-8 * Z.norm())
        throw std::invalid_argument("pt_romega_inf_deviation: Z must lie in T");
    const double scale = double(obs.n1) * double(obs.n2) / double(obs.m());
    return inf_norm(scale * project_T(ts, apply_R_omega(obs, Z)) - Z);
}

std::pair<double, double> spectral_vs_inf_bound_check(const Matrix& Z) {
    const double lhs = spectral_norm(Z);
    const double rhs = std::sqrt(double(Z.rows()) * double(Z.cols())) * inf_norm(Z);
    if (lhs > rhs + 1e-9 * std::max(rhs, 1.0))
        throw NumericFailure("spectral_vs_inf_bound_check: norm inequality violated", lhs);
    return {lhs, rhs};
}

double chernoff_operator_bound(int d, std::span<const double> per_term_norms) {
    require(d >= 1, "chernoff_operator_bound: dimension must be positive");
    double prod = double(d);
    for (const double v : per_term_norms) {
        require(v >= 0.0, "chernoff_operator_bound: norms must be nonnegative");
        prod *= v;
    }
    return prod;
}

double near_isometry_bound(Index n1, Index n2, Index r, double mu0, Index m,
                           double beta) {
    return std::sqrt(16.0 * mu0 * double(r) * double(n1 + n2) * beta *
                     std::log(double(n2)) / (3.0 * double(m)));
}

double near_isometry_failure_prob(Index n2, double beta) {
    return 2.0 * std::pow(double(n2), 2.0 - 2.0 * beta);
}

double near_isometry_min_m(Index n1, Index n2, Index r, double mu0, double beta) {
    return 16.0 / 3.0 * mu0 * double(r) * double(n1 + n2) * beta * std::log(double(n2));
}

double inf_deviation_bound(Index n1, Index n2, Index m, double beta) {
    return std::sqrt(8.0 * beta * double(n1) * double(n2) * double(n2) *
                     std::log(double(n1 + n2)) / (3.0 * double(m)));
}

double inf_deviation_failure_prob(Index n1, Index n2, double beta) {
    return std::pow(double(n1 + n2), 1.0 - beta);
}

double inf_deviation_min_m(Index n1, Index n2, double beta) {
    return 6.0 * beta * double(n1) * std::log(double(n1 + n2));
}

double contraction_bound(Index n1, Index n2, Index r, double mu0, Index m,
                         double beta) {
    require(beta > 2.0, "contraction_bound: requires beta > 2");
    return std::sqrt(8.0 * beta * mu0 * double(r) * double(n1 + n2) *
                     std::log(double(n2)) / (3.0 * double(m)));
}

double contraction_failure_prob(Index n2, double beta) {
    require(beta > 2.0, "contraction_failure_prob: requires beta > 2");
    return 2.0 * std::pow(double(n2), 2.0 - beta);
}

double contraction_min_m(Index n1, Index n2, Index r, double mu0, double beta) {
    require(beta > 2.0, "contraction_min_m: requires beta > 2");
    return 8.0 / 3.0 * beta * mu0 * double(r) * double(n1 + n2) * std::log(double(n2));
}

}  // namespace mclab
