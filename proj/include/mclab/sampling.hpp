#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mclab/matrix.hpp"

namespace mclab {

enum class SamplingModel { UniformNoReplace, WithReplace, Bernoulli };

struct ObservedCell {
    Index a = 0;
    Index b = 0;
    Index count = 0;
};

/// Multiset of observed entry indices. `draws` keeps the raw draw order
/// (with-replacement blocks stay independent only if partitioned by draw
/// order); `cells` is the aggregated view sorted by (a, b) with summed
/// multiplicities. `values` is empty or aligned with `cells`.
/// Treat instances as immutable once values are attached.
struct ObservationSet {
    Index n1 = 0;
    Index n2 = 0;
    SamplingModel model = SamplingModel::WithReplace;
    uint64_t seed = 0;
    std::vector<std::pair<Index, Index>> draws;
    std::vector<ObservedCell> cells;
    std::vector<double> values;

    Index m() const { return Index(draws.size()); }
    bool has_values() const { return !values.empty(); }

    /// Builds the aggregated cell view; throws std::invalid_argument on
    /// out-of-range indices or an empty draw list.
    static ObservationSet from_draws(Index n1, Index n2, SamplingModel model,
                                     uint64_t seed,
                                     std::vector<std::pair<Index, Index>> draws);
};

/// m i.i.d. uniform index draws. Draw k consumes its own (seed, k) stream,
/// so draws can be generated in parallel without changing the result.
ObservationSet sample_with_replacement(Index n1, Index n2, Index m, uint64_t seed);

/// Size-m subset without replacement via a partial Fisher-Yates shuffle of
/// the whole grid.
ObservationSet sample_uniform(Index n1, Index n2, Index m, uint64_t seed);

/// Each cell kept independently with probability p in (0, 1].
ObservationSet sample_bernoulli(Index n1, Index n2, double p, uint64_t seed);

/// (R_Omega Z)_ab = multiplicity(a,b) * Z_ab, zero off the observed support.
Matrix apply_R_omega(const ObservationSet& obs, const Matrix& Z);

/// Copies per-cell values out of M into obs.values.
void attach_values(ObservationSet& obs, const Matrix& M);

/// ceil(32 * max(mu1^2, mu0) * r * (n1+n2) * beta * ln^2(2 n2)), the sample
/// count at which the recovery guarantee kicks in. Requires beta > 1.
int64_t sample_size_threshold(Index n1, Index n2, Index r, double mu0,
                              double mu1, double beta);

Index max_multiplicity(const ObservationSet& obs);

/// (8/3) * beta * ln(n2); valid for n2 >= 9, beta > 1. With m = n1*n2
/// with-replacement draws, max_multiplicity exceeds this with probability
/// at most duplicate_failure_prob.
double duplicate_bound(Index n2, double beta);
double duplicate_failure_prob(Index n2, double beta);

/// Splits a with-replacement set into p consecutive blocks by draw order;
/// the first (m mod p) blocks take one extra draw. Blocks of a
/// with-replacement sample are themselves independent samples.
std::vector<ObservationSet> partition(const ObservationSet& obs, int p);

}  // namespace mclab
