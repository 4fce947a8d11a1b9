#include "mclab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mclab {

namespace {

constexpr double kOrthoTol = 1e-10;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Orthonormalizes the columns of G. QR alone leaves column signs up to the
// implementation, which is fine here; callers only consume the span.
Matrix orthonormalize(const Matrix& G) {
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ() * Matrix::Identity(G.rows(), G.cols());
    return Q;
}

Vector default_spectrum(Index r) {
    Vector S(r);
    for (Index k = 0; k < r; ++k)
        S(k) = r == 1 ? 2.0 : 2.0 - double(k) / double(r - 1);
    return S;
}

// Orthonormal basis with every entry bounded by sqrt(2/n): the discrete
// Hartley frame H_ab = sqrt(2/n) cos(2 pi a b / n + pi/4), randomized by a
// per-row sign flip and a column permutation so distinct seeds give
// distinct factors.
Matrix hartley_columns(Index n, Index r, RngStream& rng) {
    const double pi = 3.14159265358979323846;
    std::vector<Index> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), Index(0));
    for (Index i = n - 1; i > 0; --i)
        std::swap(perm[size_t(i)], perm[rng.uniform_index(uint64_t(i) + 1)]);

    Matrix B(n, r);
    for (Index a = 0; a < n; ++a) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (Index j = 0; j < r; ++j) {
            const Index b = perm[size_t(j)];
            B(a, j) = sign * std::sqrt(2.0 / double(n)) *
                      std::cos(2.0 * pi * double(a) * double(b) / double(n) + pi / 4.0);
        }
    }
    return B;
}

}  // namespace

void LowRankFactorization::validate() const {
    require(n1 >= 1 && n2 >= 1 && r >= 1, "factorization: dimensions must be positive");
    require(r <= n1 && n1 <= n2, "factorization: requires r <= n1 <= n2");
    require(U.rows() == n1 && U.cols() == r, "factorization: U shape mismatch");
    require(V.rows() == n2 && V.cols() == r, "factorization: V shape mismatch");
    require(S.size() == r, "factorization: S length mismatch");
    const Matrix Ir = Matrix::Identity(r, r);
    require((U.transpose() * U - Ir).norm() <= kOrthoTol,
            "factorization: U columns not orthonormal");
    require((V.transpose() * V - Ir).norm() <= kOrthoTol,
            "factorization: V columns not orthonormal");
    for (Index k = 0; k < r; ++k) {
        require(S(k) > 0.0, "factorization: singular values must be positive");
        if (k > 0) require(S(k) <= S(k - 1), "factorization: singular values must be nonincreasing");
    }
}

TangentSpace TangentSpace::of(const LowRankFactorization& f) {
    return {f.U * f.U.transpose(), f.V * f.V.transpose()};
}

double coherence(const Matrix& P) {
    if (P.rows() != P.cols()) throw std::invalid_argument("coherence: projector must be square");
    const Index n = P.rows();
    if ((P * P - P).norm() > 1e-8 || (P - P.transpose()).norm() > 1e-8)
        throw std::invalid_argument("coherence: input is not an orthogonal projector");
    const double r = P.trace();
    if (r < 0.5) throw std::invalid_argument("coherence: projector rank must be at least 1");
    // ||P e_i||^2 = (P^T P)_ii = P_ii for an orthogonal projector
    double best = 0.0;
    for (Index i = 0; i < n; ++i) best = std::max(best, P.col(i).squaredNorm());
    return double(n) / r * best;
}

CoherenceProfile coherence_profile(const LowRankFactorization& f) {
    f.validate();
    const TangentSpace ts = TangentSpace::of(f);
    CoherenceProfile prof;
    prof.mu0 = std::max(coherence(ts.PU), coherence(ts.PV));
    const double uv_inf = inf_norm(f.U * f.V.transpose());
    prof.mu1 = uv_inf * std::sqrt(double(f.n1) * double(f.n2) / double(f.r));
    return prof;
}

Matrix project_T(const TangentSpace& ts, const Matrix& Z) {
    if (Z.rows() != ts.n1() || Z.cols() != ts.n2())
        throw std::invalid_argument("project_T: dimension mismatch");
    const Matrix PUZ = ts.PU * Z;
    return PUZ + Z * ts.PV - PUZ * ts.PV;
}

Matrix project_T_perp(const TangentSpace& ts, const Matrix& Z) {
    if (Z.rows() != ts.n1() || Z.cols() != ts.n2())
        throw std::invalid_argument("project_T_perp: dimension mismatch");
    return (Matrix::Identity(ts.n1(), ts.n1()) - ts.PU) * Z *
           (Matrix::Identity(ts.n2(), ts.n2()) - ts.PV);
}

double pt_basis_norm_sq(const TangentSpace& ts, Index a, Index b) {
    if (a < 0 || a >= ts.n1() || b < 0 || b >= ts.n2())
        throw std::invalid_argument("pt_basis_norm_sq: index out of range");
    const double pu = ts.PU.col(a).squaredNorm();
    const double pv = ts.PV.col(b).squaredNorm();
    return pu + pv - pu * pv;
}

LowRankFactorization make_random_low_rank(Index n1, Index n2, Index r,
                                          MatrixModel model, uint64_t seed) {
    if (!(1 <= r && r <= n1 && n1 <= n2))
        throw std::invalid_argument("make_random_low_rank: requires 1 <= r <= n1 <= n2");
    RngStream rng(seed);
    LowRankFactorization f;
    f.n1 = n1;
    f.n2 = n2;
    f.r = r;
    f.S = default_spectrum(r);
    switch (model) {
        case MatrixModel::Haar:
            f.U = orthonormalize(gaussian_matrix(n1, r, rng));
            f.V = orthonormalize(gaussian_matrix(n2, r, rng));
            break;
        case MatrixModel::BoundedEntry:
            f.U = hartley_columns(n1, r, rng);
            f.V = hartley_columns(n2, r, rng);
            break;
        case MatrixModel::Spiky: {
            // e_1 plus a Haar complement drawn orthogonal to it
            Matrix G = gaussian_matrix(n1, r, rng);
            G.col(0) = Vector::Unit(n1, 0);
            for (Index j = 1; j < r; ++j) G(0, j) = 0.0;
            f.U = orthonormalize(G);
            if (f.U(0, 0) < 0) f.U.col(0) *= -1.0;
            f.V = orthonormalize(gaussian_matrix(n2, r, rng));
            break;
        }
    }
    f.validate();
    return f;
}

}  // namespace mclab
