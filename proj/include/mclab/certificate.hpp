#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mclab/bounds.hpp"
#include "mclab/model.hpp"
#include "mclab/sampling.hpp"

namespace mclab {

/// Thrown by golfing_parameters when m cannot satisfy the block-size lower
/// bound; minimal_m is the smallest total draw count that would.
class InsufficientSamples : public std::runtime_error {
  public:
    InsufficientSamples(const std::string& what, int64_t minimal_m_, double q_lower_bound_)
        : std::runtime_error(what), minimal_m(minimal_m_), q_lower_bound(q_lower_bound_) {}
    int64_t minimal_m;
    double q_lower_bound;
};

struct GolfingParameters {
    int p = 0;      // number of blocks, ceil((3/4) ln(2 n2))
    Index q = 0;    // draws per block, floor(m / p)
};

/// (128/3) * max(mu0, mu1^2) * r * (n1+n2) * beta * ln(n1+n2), the per-block
/// draw count needed for each golfing step to contract reliably.
double golfing_q_lower_bound(Index n1, Index n2, Index r, double mu0, double mu1,
                             double beta);

GolfingParameters golfing_parameters(Index n1, Index n2, Index r, double mu0,
                                     double mu1, double beta, Index m);

/// Full record of the golfing recursion W_0 = U V^T,
/// Y_k = sum_{j<=k} (n1 n2 / q_j) R_j(W_{j-1}), W_k = U V^T - P_T(Y_k).
/// Norm lists have length p+1 (index k = 0..p); per-step lists length p.
struct CertificateTrace {
    int p = 0;
    std::vector<Index> q_list;
    std::vector<double> w_fro;
    std::vector<double> w_inf;
    std::vector<double> per_step_isometry;  // block deviation norms
    std::vector<double> per_step_drift;     // ||((n1 n2/q_j) R_j - I)(W_{j-1})||
    Matrix Y;                               // supported on the union of blocks
    double pt_residual_fro = 0.0;           // ||P_T(Y) - U V^T||_F
    double pt_perp_norm = 0.0;              // ||P_Tperp(Y)||
    bool verdict_fro = false;               // pt_residual_fro <= sqrt(r/(2 n2))
    bool verdict_perp = false;              // pt_perp_norm < 1/2
};

/// Runs the recursion over the given independent with-replacement blocks.
/// Each step scales by the actual block size q_j, which keeps the step
/// unbiased when the remainder policy makes blocks unequal.
CertificateTrace build_certificate(const LowRankFactorization& f,
                                   const std::vector<ObservationSet>& partitions);

struct BigSetConditions {
    double deviation = 0.0;    // superoperator deviation norm, needs <= 1/2
    double romega_norm = 0.0;  // max multiplicity
    double romega_bound = 0.0; // (8/3) sqrt(beta) ln(n2)
    bool ok = false;
};

BigSetConditions verify_big_set_conditions(const TangentSpace& ts,
                                           const ObservationSet& obs, double beta);

struct KernelInequality {
    double lhs = 0.0;  // ||P_Tperp(Z)||_F
    double rhs = 0.0;  // sqrt(9m / (128 beta n1 n2 ln^2(n2))) ||P_T(Z)||_F
    bool ok = false;
};

/// Diagnostic for Z in the kernel of R_Omega (||R_Omega(Z)||_F must be at
/// most 1e-10 ||Z||_F): off-support mass dominates tangent mass whenever the
/// big-set conditions hold.
KernelInequality kernel_inequality_check(const TangentSpace& ts,
                                         const ObservationSet& obs, const Matrix& Z,
                                         double beta);

enum class OptimalityVerdict { CertifiedUnique, NotCertified };

/// CertifiedUnique iff both trace verdicts hold and the big-set conditions
/// hold on the full observation set. NotCertified does not imply recovery
/// failure; the certificate is sufficient, not necessary.
OptimalityVerdict optimality_check(const LowRankFactorization& f,
                                   const ObservationSet& obs,
                                   const CertificateTrace& trace, double beta = 2.0);

}  // namespace mclab
