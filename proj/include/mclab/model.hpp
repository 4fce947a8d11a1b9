#pragma once

#include <cstdint>

#include "mclab/matrix.hpp"

namespace mclab {

/// Ground truth M = U * diag(S) * V^T with orthonormal factor columns.
struct LowRankFactorization {
    Index n1 = 0;
    Index n2 = 0;
    Index r = 0;
    Matrix U;  // n1 x r, orthonormal columns
    Vector S;  // r positive values, nonincreasing
    Matrix V;  // n2 x r, orthonormal columns

    Matrix matrix() const { return U * S.asDiagonal() * V.transpose(); }

    /// Throws std::invalid_argument when any structural invariant fails:
    /// shapes, column orthonormality to 1e-10, S positive nonincreasing,
    /// r <= n1 <= n2.
    void validate() const;
};

/// Pair of orthogonal projectors defining the subspace T spanned by
/// matrices with a factor in col(U) or col(V).
struct TangentSpace {
    Matrix PU;  // n1 x n1
    Matrix PV;  // n2 x n2

    Index n1() const { return PU.rows(); }
    Index n2() const { return PV.rows(); }

    static TangentSpace of(const LowRankFactorization& f);
};

struct CoherenceProfile {
    double mu0 = 0.0;  // max of row and column space coherences
    double mu1 = 0.0;  // tightest c with max|UV^T| <= c*sqrt(r/(n1*n2))
};

/// (n/r) * max_i ||P e_i||^2 for a rank-r orthogonal projector P.
/// Throws std::invalid_argument when P is not a projector (idempotence or
/// symmetry residual above 1e-8).
double coherence(const Matrix& P);

CoherenceProfile coherence_profile(const LowRankFactorization& f);

/// P_U Z + Z P_V - P_U Z P_V.
Matrix project_T(const TangentSpace& ts, const Matrix& Z);

/// (I - P_U) Z (I - P_V), the complement of project_T.
Matrix project_T_perp(const TangentSpace& ts, const Matrix& Z);

/// ||P_T(e_a e_b^T)||_F^2 by the closed form
/// ||P_U e_a||^2 + ||P_V e_b||^2 - ||P_U e_a||^2 * ||P_V e_b||^2.
double pt_basis_norm_sq(const TangentSpace& ts, Index a, Index b);

enum class MatrixModel { Haar, BoundedEntry, Spiky };

/// Seeded test-instance generator.
///   haar: orthonormalized Gaussian factors.
///   bounded-entry: factor columns drawn from a randomized orthonormal basis
///     whose entries are all below sqrt(2/n), so coherence stays at most 2.
///   spiky: first left factor column is e_1, forcing mu(U) = n1/r; meant for
///     negative tests, not a low-coherence model.
/// Singular values are fixed at linspace(2, 1, r) so conditioning is mild.
LowRankFactorization make_random_low_rank(Index n1, Index n2, Index r,
                                          MatrixModel model, uint64_t seed);

}  // namespace mclab
