#include "mclab/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace mclab {

Matrix sv_soft_threshold(const Matrix& Z, double tau) {
    if (tau < 0.0) throw std::invalid_argument("sv_soft_threshold: tau must be >= 0");
    if (tau == 0.0) return Z;
    Eigen::BDCSVD<Matrix> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = (svd.singularValues().array() - tau).max(0.0).matrix();
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

SolverResult solve_nuclear_min(const ObservationSet& obs, const SolverParams& params) {
    if (!obs.has_values())
        throw std::invalid_argument("solve_nuclear_min: observations carry no values");
    if (params.tol <= 0.0 || params.max_iterations < 1 || params.threshold_scale <= 0.0)
        throw std::invalid_argument("solve_nuclear_min: bad parameters");

    Matrix data = Matrix::Zero(obs.n1, obs.n2);  // zero-filled observed matrix
    for (size_t i = 0; i < obs.cells.size(); ++i)
        data(obs.cells[i].a, obs.cells[i].b) = obs.values[i];

    const double s1 = spectral_norm(data);
    const double tau = s1 > 0.0 ? params.threshold_scale * s1 : 1.0;

    Matrix Z = data;                              // always feasible
    Matrix U = Matrix::Zero(obs.n1, obs.n2);      // running dual correction
    SolverResult out;
    for (int it = 1; it <= params.max_iterations; ++it) {
        const Matrix X = sv_soft_threshold(Z - U, tau);
        Matrix Znew = X + U;
        for (size_t i = 0; i < obs.cells.size(); ++i)
            Znew(obs.cells[i].a, obs.cells[i].b) = obs.values[i];
        U += X - Znew;
        const double zn = Z.norm();
        const double change = (Znew - Z).norm();
        out.residual = zn > 0.0 ? change / zn : (change > 0.0 ? 1.0 : 0.0);
        Z = Znew;
        out.iterations = it;
        if (out.residual < params.tol) {
            out.converged = true;
            break;
        }
    }
    out.X = Z;
    out.objective = nuclear_norm(Z);
    return out;
}

bool recovery_verdict(const Matrix& X, const LowRankFactorization& f, double tol) {
    const Matrix M = f.matrix();
    if (X.rows() != M.rows() || X.cols() != M.cols())
        throw std::invalid_argument("recovery_verdict: dimension mismatch");
    return (X - M).norm() / M.norm() <= tol;
}

}  // namespace mclab
