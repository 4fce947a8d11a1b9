#include "mclab/certificate.hpp"

#include <cmath>
#include <string>

namespace mclab {

double golfing_q_lower_bound(Index n1, Index n2, Index r, double mu0, double mu1,
                             double beta) {
    if (beta <= 1.0)
        throw std::invalid_argument("golfing_q_lower_bound: requires beta > 1");
    return 128.0 / 3.0 * std::max(mu0, mu1 * mu1) * double(r) * double(n1 + n2) *
           beta * std::log(double(n1 + n2));
}

GolfingParameters golfing_parameters(Index n1, Index n2, Index r, double mu0,
                                     double mu1, double beta, Index m) {
    if (m < 1) throw std::invalid_argument("golfing_parameters: m must be positive");
    const int p = int(std::ceil(0.75 * std::log(2.0 * double(n2))));
    const double q_lb = golfing_q_lower_bound(n1, n2, r, mu0, mu1, beta);
    const Index q = m / Index(p);
    if (double(q) < q_lb) {
        const int64_t minimal = int64_t(p) * int64_t(std::ceil(q_lb));
        throw InsufficientSamples(
            "golfing_parameters: m = " + std::to_string(m) + " gives block size " +
                std::to_string(q) + " below the required " + std::to_string(q_lb) +
                "; smallest workable m is " + std::to_string(minimal),
            minimal, q_lb);
    }
    return {p, q};
}

CertificateTrace build_certificate(const LowRankFactorization& f,
                                   const std::vector<ObservationSet>& partitions) {
    f.validate();
    if (partitions.empty())
        throw std::invalid_argument("build_certificate: needs at least one block");
    for (const auto& block : partitions) {
        if (block.m() < 1)
            throw std::invalid_argument("build_certificate: empty block");
        if (block.n1 != f.n1 || block.n2 != f.n2)
            throw std::invalid_argument("build_certificate: block dimension mismatch");
    }

    const TangentSpace ts = TangentSpace::of(f);
    const Matrix UV = f.U * f.V.transpose();
    const double grid = double(f.n1) * double(f.n2);

    CertificateTrace trace;
    trace.p = int(partitions.size());
    Matrix W = UV;
    Matrix Y = Matrix::Zero(f.n1, f.n2);
    trace.w_fro.push_back(W.norm());
    trace.w_inf.push_back(inf_norm(W));

    for (const auto& block : partitions) {
        const double scale = grid / double(block.m());
        trace.q_list.push_back(block.m());
        const Matrix step = scale * apply_R_omega(block, W);  // zero off-support
        trace.per_step_drift.push_back(spectral_norm(step - W));
        trace.per_step_isometry.push_back(superop_deviation_norm(ts, block));
        Y += step;
        W = UV - project_T(ts, Y);
        trace.w_fro.push_back(W.norm());
        trace.w_inf.push_back(inf_norm(W));
    }

    trace.Y = Y;
    trace.pt_residual_fro = trace.w_fro.back();
    trace.pt_perp_norm = spectral_norm(project_T_perp(ts, Y));
    trace.verdict_fro =
        trace.pt_residual_fro <= std::sqrt(double(f.r) / (2.0 * double(f.n2)));
    trace.verdict_perp = trace.pt_perp_norm < 0.5;
    return trace;
}

BigSetConditions verify_big_set_conditions(const TangentSpace& ts,
                                           const ObservationSet& obs, double beta) {
    if (obs.model != SamplingModel::WithReplace)
        throw std::invalid_argument(
            "verify_big_set_conditions: needs a with-replacement sample");
    if (beta <= 1.0)
        throw std::invalid_argument("verify_big_set_conditions: requires beta > 1");
    BigSetConditions out;
    out.deviation = superop_deviation_norm(ts, obs);
    out.romega_norm = double(max_multiplicity(obs));
    out.romega_bound = 8.0 / 3.0 * std::sqrt(beta) * std::log(double(obs.n2));
    out.ok = out.deviation <= 0.5 && out.romega_norm <= out.romega_bound;
    return out;
}

KernelInequality kernel_inequality_check(const TangentSpace& ts,
                                         const ObservationSet& obs, const Matrix& Z,
                                         double beta) {
    if (Z.rows() != obs.n1 || Z.cols() != obs.n2)
        throw std::invalid_argument("kernel_inequality_check: dimension mismatch");
    if (beta <= 1.0)
        throw std::invalid_argument("kernel_inequality_check: requires beta > 1");
    if (apply_R_omega(obs, Z).norm() > 1e-10 * Z.norm())
        throw std::invalid_argument(
            "kernel_inequality_check: Z is not in the kernel of the sampling operator");
    const double lg = std::log(double(obs.n2));
    const double factor = std::sqrt(9.0 * double(obs.m()) /
                                    (128.0 * beta * double(obs.n1) * double(obs.n2) *
                                     lg * lg));
    KernelInequality out;
    out.lhs = project_T_perp(ts, Z).norm();
    out.rhs = factor * project_T(ts, Z).norm();
    out.ok = out.lhs >= out.rhs;
    return out;
}

OptimalityVerdict optimality_check(const LowRankFactorization& f,
                                   const ObservationSet& obs,
                                   const CertificateTrace& trace, double beta) {
    if (!trace.verdict_fro || !trace.verdict_perp)
        return OptimalityVerdict::NotCertified;
    const BigSetConditions big = verify_big_set_conditions(TangentSpace::of(f), obs, beta);
    return big.ok ? OptimalityVerdict::CertifiedUnique : OptimalityVerdict::NotCertified;
}

}  // namespace mclab
