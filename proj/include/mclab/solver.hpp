#pragma once

#include "mclab/model.hpp"
#include "mclab/sampling.hpp"

namespace mclab {

struct SolverParams {
    double tol = 1e-8;            // relative change of the feasible iterate
    int max_iterations = 5000;
    double threshold_scale = 0.1; // tau = scale * sigma_1(zero-filled data)
};

struct SolverResult {
    Matrix X;            // feasible: observed entries match the data exactly
    int iterations = 0;
    double residual = 0.0;
    double objective = 0.0;  // nuclear norm of X
    bool converged = false;
};

/// Soft-thresholds the singular values: U max(S - tau, 0) V^T. The exact
/// minimizer of (1/2)||X - Z||_F^2 + tau ||X||_*.
Matrix sv_soft_threshold(const Matrix& Z, double tau);

/// min ||X||_* subject to X agreeing with the observed entries, by an
/// alternating splitting: each iteration applies sv_soft_threshold and then
/// re-imposes the observed entries exactly, with a running dual correction
/// that steers the thresholded and feasible iterates together. Duplicate
/// observations collapse to one constraint (the cell view already is
/// deduplicated). Hitting the iteration cap returns converged=false with the
/// best iterate rather than throwing.
SolverResult solve_nuclear_min(const ObservationSet& obs, const SolverParams& params = {});

/// True iff ||X - M||_F / ||M||_F <= tol.
bool recovery_verdict(const Matrix& X, const LowRankFactorization& f, double tol = 1e-4);

}  // namespace mclab
