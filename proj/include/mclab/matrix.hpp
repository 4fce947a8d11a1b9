#pragma once

#include <Eigen/Dense>

#include "mclab/rng.hpp"

namespace mclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Largest singular value (dense SVD).
inline double spectral_norm(const Matrix& Z) {
    if (Z.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(Z).singularValues()(0);
}

/// Sum of singular values.
inline double nuclear_norm(const Matrix& Z) {
    if (Z.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(Z).singularValues().sum();
}

/// Largest entry magnitude.
inline double inf_norm(const Matrix& Z) {
    if (Z.size() == 0) return 0.0;
    return Z.cwiseAbs().maxCoeff();
}

inline Matrix gaussian_matrix(Index rows, Index cols, RngStream& rng) {
    Matrix G(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) G(i, j) = rng.gaussian();
    return G;
}

}  // namespace mclab
