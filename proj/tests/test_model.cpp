#include <doctest.h>

#include <Eigen/QR>
#include <cmath>

#include "mclab/model.hpp"
#include "mclab/rng.hpp"

using namespace mclab;

namespace {

Matrix orthonormal_cols(Index n, Index r, uint64_t seed) {
    RngStream rng(seed);
    Matrix G = gaussian_matrix(n, r, rng);
    return Eigen::HouseholderQR<Matrix>(G).householderQ() * Matrix::Identity(n, r);
}

LowRankFactorization seeded_factorization(Index n1, Index n2, Index r, uint64_t seed) {
    return make_random_low_rank(n1, n2, r, MatrixModel::Haar, seed);
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("coherence of a flat rank-1 subspace is 1") {
    Vector u(4);
    u << 0.5, 0.5, 0.5, 0.5;
    Matrix P = u * u.transpose();
    CHECK(coherence(P) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coherence of a basis-aligned subspace attains n/r") {
    Matrix P = Matrix::Zero(4, 4);
    P(0, 0) = 1.0;
    CHECK(coherence(P) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("coherence of a seeded 6x2 subspace matches a brute-force scan") {
    Matrix Q = orthonormal_cols(6, 2, 314159);
    Matrix P = Q * Q.transpose();
    double worst = 0.0;
    for (Index i = 0; i < 6; ++i) worst = std::max(worst, P.col(i).squaredNorm());
    const double expect = (6.0 / 2.0) * worst;
    CHECK(coherence(P) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(coherence(P) > 1.0);
    CHECK(coherence(P) <= 3.0);
}

TEST_CASE("coherence rejects a non-projector") {
    Matrix P = Matrix::Identity(3, 3) * 0.5;
    CHECK_THROWS_AS(coherence(P), std::invalid_argument);
    Matrix A(2, 2);
    A << 1.0, 0.3, 0.0, 0.0;
    CHECK_THROWS_AS(coherence(A), std::invalid_argument);
}

TEST_CASE("coherence stays in [1, n/r] over random subspaces") {
    for (uint64_t s = 0; s < 50; ++s) {
        const Index n = 5 + Index(s % 7);
        const Index r = 1 + Index(s % 3);
        Matrix Q = orthonormal_cols(n, r, 1000 + s);
        const double mu = coherence(Q * Q.transpose());
        CHECK(mu >= 1.0 - 1e-12);
        CHECK(mu <= double(n) / double(r) + 1e-12);
    }
}

TEST_CASE("coherence profile of the flat rank-1 pair is (1, 1)") {
    LowRankFactorization f;
    f.n1 = 2;
    f.n2 = 2;
    f.r = 1;
    f.U = Matrix(2, 1);
    f.U << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    f.V = f.U;
    f.S = Vector::Ones(1);
    f.validate();
    auto cp = coherence_profile(f);
    CHECK(cp.mu0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cp.mu1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a factor containing e_1 forces mu0 = n1/r") {
    auto f = make_random_low_rank(10, 12, 2, MatrixModel::Spiky, 1);
    f.validate();
    auto cp = coherence_profile(f);
    CHECK(cp.mu0 == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("mu1 never exceeds mu0 sqrt(r)") {
    for (uint64_t s = 0; s < 30; ++s) {
        auto f = seeded_factorization(10, 12, 2, 40 + s);
        auto cp = coherence_profile(f);
        CHECK(cp.mu1 <= cp.mu0 * std::sqrt(2.0) + 1e-12);
        // independent recomputation of both coherences
        const double mu_u = coherence(f.U * f.U.transpose());
        const double mu_v = coherence(f.V * f.V.transpose());
        CHECK(cp.mu0 == doctest::Approx(std::max(mu_u, mu_v)).epsilon(1e-12));
    }
}

TEST_CASE("project_T fixes matrices with a column-space factor") {
    auto f = seeded_factorization(6, 8, 2, 7);
    auto ts = TangentSpace::of(f);
    RngStream rng(99);
    Vector y = gaussian_matrix(8, 1, rng).col(0);
    Matrix Z = f.U.col(0) * y.transpose();
    CHECK((project_T(ts, Z) - Z).norm() <= 1e-10 * Z.norm());
}

TEST_CASE("project_T annihilates the orthogonal corner") {
    TangentSpace ts;
    ts.PU = Matrix::Zero(2, 2);
    ts.PU(0, 0) = 1.0;
    ts.PV = ts.PU;
    Matrix Z = Matrix::Zero(2, 2);
    Z(1, 1) = 1.0;
    CHECK(project_T(ts, Z).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("project_T is idempotent and self-adjoint") {
    auto f = seeded_factorization(5, 7, 2, 21);
    auto ts = TangentSpace::of(f);
    RngStream rng(22);
    for (int t = 0; t < 100; ++t) {
        Matrix A = gaussian_matrix(5, 7, rng);
        Matrix B = gaussian_matrix(5, 7, rng);
        Matrix PA = project_T(ts, A);
        CHECK((project_T(ts, PA) - PA).norm() <= 1e-10 * std::max(1.0, PA.norm()));
        const double lhs = (PA.transpose() * B).trace();
        const double rhs = (A.transpose() * project_T(ts, B)).trace();
        CHECK(std::abs(lhs - rhs) <= 1e-10 * A.norm() * B.norm());
    }
}

TEST_CASE("project_T_perp complements project_T") {
    auto f = seeded_factorization(5, 7, 2, 33);
    auto ts = TangentSpace::of(f);
    RngStream rng(34);
    for (int t = 0; t < 100; ++t) {
        Matrix Z = gaussian_matrix(5, 7, rng);
        Matrix in_t = project_T(ts, Z);
        Matrix out_t = project_T_perp(ts, Z);
        CHECK((in_t + out_t - Z).norm() <= 1e-10 * Z.norm());
        // Pythagorean split
        const double total = Z.squaredNorm();
        CHECK(in_t.squaredNorm() + out_t.squaredNorm() ==
              doctest::Approx(total).epsilon(1e-10));
        CHECK(spectral_norm(out_t) <= spectral_norm(Z) + 1e-10);
    }
}

TEST_CASE("project_T_perp fixes fully orthogonal dyads and kills T") {
    auto f = seeded_factorization(6, 6, 2, 55);
    auto ts = TangentSpace::of(f);
    // x orthogonal to col(U), y orthogonal to col(V)
    RngStream rng(56);
    Vector x = gaussian_matrix(6, 1, rng).col(0);
    x -= ts.PU * x;
    Vector y = gaussian_matrix(6, 1, rng).col(0);
    y -= ts.PV * y;
    Matrix Z = x * y.transpose();
    CHECK((project_T_perp(ts, Z) - Z).norm() <= 1e-10 * Z.norm());

    Matrix in_t = project_T(ts, gaussian_matrix(6, 6, rng));
    CHECK(project_T_perp(ts, in_t).norm() <= 1e-10 * std::max(1.0, in_t.norm()));
}

TEST_CASE("projection operations validate dimensions") {
    auto f = seeded_factorization(5, 7, 2, 60);
    auto ts = TangentSpace::of(f);
    Matrix bad = Matrix::Zero(7, 5);
    CHECK_THROWS_AS(project_T(ts, bad), std::invalid_argument);
    CHECK_THROWS_AS(project_T_perp(ts, bad), std::invalid_argument);
}

TEST_CASE("pt_basis_norm_sq closed form") {
    // full space: P_T is the identity
    TangentSpace full;
    full.PU = Matrix::Identity(3, 3);
    full.PV = Matrix::Identity(4, 4);
    CHECK(pt_basis_norm_sq(full, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));

    // both projectors onto e_1: the (2,2) dyad is annihilated
    TangentSpace spike;
    spike.PU = Matrix::Zero(2, 2);
    spike.PU(0, 0) = 1.0;
    spike.PV = spike.PU;
    CHECK(pt_basis_norm_sq(spike, 1, 1) == doctest::Approx(0.0).epsilon(1e-14));

    CHECK_THROWS_AS(pt_basis_norm_sq(spike, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(pt_basis_norm_sq(spike, 0, -1), std::invalid_argument);
}

TEST_CASE("pt_basis_norm_sq agrees with explicit projection") {
    auto f = seeded_factorization(5, 7, 2, 77);
    auto ts = TangentSpace::of(f);
    for (Index a = 0; a < 5; ++a) {
        for (Index b = 0; b < 7; ++b) {
            Matrix E = Matrix::Zero(5, 7);
            E(a, b) = 1.0;
            const double direct = project_T(ts, E).squaredNorm();
            CHECK(pt_basis_norm_sq(ts, a, b) ==
                  doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("pt_basis_norm_sq obeys the coherence bound on every cell") {
    for (uint64_t s = 0; s < 10; ++s) {
        auto f = seeded_factorization(8, 11, 2, 200 + s);
        auto ts = TangentSpace::of(f);
        auto cp = coherence_profile(f);
        const double cap = cp.mu0 * 2.0 * (8 + 11) / (8.0 * 11.0);
        for (Index a = 0; a < 8; ++a)
            for (Index b = 0; b < 11; ++b)
                CHECK(pt_basis_norm_sq(ts, a, b) <= cap + 1e-12);
    }
}

TEST_CASE("haar generator produces valid factorizations") {
    auto f = make_random_low_rank(4, 4, 4, MatrixModel::Haar, 3);
    f.validate();
    auto cp = coherence_profile(f);
    CHECK(cp.mu0 <= 4.0 + 1e-12);
    CHECK(cp.mu0 >= 1.0 - 1e-12);  // full rank forces mu0 = 1
    CHECK(cp.mu0 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("haar mu0 at 30x30 rank 2 concentrates well below the log bound") {
    std::vector<double> mu0s;
    for (uint64_t s = 0; s < 100; ++s) {
        auto f = make_random_low_rank(30, 30, 2, MatrixModel::Haar, s);
        mu0s.push_back(coherence_profile(f).mu0);
    }
    std::sort(mu0s.begin(), mu0s.end());
    const double median = 0.5 * (mu0s[49] + mu0s[50]);
    MESSAGE("empirical median mu0 = " << median);
    CHECK(median < 6.0 * std::log(30.0));
    CHECK(median >= 1.0);
}

TEST_CASE("bounded-entry generator keeps coherence at most 2") {
    for (uint64_t s = 0; s < 20; ++s) {
        auto f = make_random_low_rank(10, 14, 3, MatrixModel::BoundedEntry, s);
        f.validate();
        auto cp = coherence_profile(f);
        CHECK(cp.mu0 <= 2.0 + 1e-9);
        CHECK(f.U.array().abs().maxCoeff() <= std::sqrt(2.0 / 10.0) + 1e-12);
        CHECK(f.V.array().abs().maxCoeff() <= std::sqrt(2.0 / 14.0) + 1e-12);
    }
}

TEST_CASE("generators are deterministic in the seed") {
    auto a = make_random_low_rank(6, 9, 2, MatrixModel::Haar, 17);
    auto b = make_random_low_rank(6, 9, 2, MatrixModel::Haar, 17);
    auto c = make_random_low_rank(6, 9, 2, MatrixModel::Haar, 18);
    CHECK((a.U - b.U).norm() == 0.0);
    CHECK((a.V - b.V).norm() == 0.0);
    CHECK((a.U - c.U).norm() > 0.0);
}

TEST_CASE("generator rejects invalid dimensions") {
    CHECK_THROWS_AS(make_random_low_rank(0, 4, 1, MatrixModel::Haar, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_random_low_rank(4, 3, 1, MatrixModel::Haar, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_random_low_rank(4, 4, 5, MatrixModel::Haar, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_random_low_rank(4, 4, 0, MatrixModel::Haar, 1),
                    std::invalid_argument);
}

TEST_CASE("validate rejects broken factorizations") {
    auto f = seeded_factorization(5, 6, 2, 90);
    f.validate();

    auto bad = f;
    bad.U(0, 0) += 0.01;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = f;
    bad.S(0) = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = f;
    bad.S(0) = 0.5;  // breaks nonincreasing order against S(1) >= 1
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = f;
    bad.n1 = 7;  // no longer matches U
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("tangent space projectors carry the right rank") {
    auto f = seeded_factorization(6, 9, 3, 101);
    auto ts = TangentSpace::of(f);
    CHECK(ts.PU.trace() == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(ts.PV.trace() == doctest::Approx(3.0).epsilon(1e-8));
    CHECK((ts.PU * ts.PU - ts.PU).norm() <= 1e-10);
    CHECK((ts.PV * ts.PV - ts.PV).norm() <= 1e-10);
    CHECK((ts.PU - ts.PU.transpose()).norm() <= 1e-10);
}

TEST_SUITE_END();
