#include "mclab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace mclab {

ObservationSet ObservationSet::from_draws(Index n1, Index n2, SamplingModel model,
                                          uint64_t seed,
                                          std::vector<std::pair<Index, Index>> draws) {
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("observation set: dimensions must be positive");
    if (draws.empty())
        throw std::invalid_argument("observation set: needs at least one draw");
    ObservationSet obs;
    obs.n1 = n1;
    obs.n2 = n2;
    obs.model = model;
    obs.seed = seed;
    obs.draws = std::move(draws);

    std::map<std::pair<Index, Index>, Index> counts;
    for (const auto& [a, b] : obs.draws) {
        if (a < 0 || a >= n1 || b < 0 || b >= n2)
            throw std::invalid_argument("observation set: index out of range");
        ++counts[{a, b}];
    }
    obs.cells.reserve(counts.size());
    for (const auto& [cell, count] : counts)
        obs.cells.push_back({cell.first, cell.second, count});
    if (model == SamplingModel::UniformNoReplace || model == SamplingModel::Bernoulli) {
        for (const auto& c : obs.cells)
            if (c.count != 1)
                throw std::invalid_argument(
                    "observation set: repeated cell in a without-replacement sample");
    }
    return obs;
}

ObservationSet sample_with_replacement(Index n1, Index n2, Index m, uint64_t seed) {
    if (m < 1) throw std::invalid_argument("sample_with_replacement: m must be at least 1");
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("sample_with_replacement: dimensions must be positive");
    const uint64_t grid = uint64_t(n1) * uint64_t(n2);
    std::vector<std::pair<Index, Index>> draws(static_cast<size_t>(m));
    for (Index k = 0; k < m; ++k) {
        RngStream rng(seed, uint64_t(k));
        const uint64_t idx = rng.uniform_index(grid);
        draws[size_t(k)] = {Index(idx / uint64_t(n2)), Index(idx % uint64_t(n2))};
    }
    return ObservationSet::from_draws(n1, n2, SamplingModel::WithReplace, seed,
                                      std::move(draws));
}

ObservationSet sample_uniform(Index n1, Index n2, Index m, uint64_t seed) {
    const uint64_t grid = uint64_t(n1) * uint64_t(n2);
    if (m < 1) throw std::invalid_argument("sample_uniform: m must be at least 1");
    if (uint64_t(m) > grid)
        throw std::invalid_argument("sample_uniform: m exceeds the number of cells");
    std::vector<uint64_t> pool(grid);
    std::iota(pool.begin(), pool.end(), uint64_t(0));
    RngStream rng(seed);
    std::vector<std::pair<Index, Index>> draws(static_cast<size_t>(m));
    for (Index k = 0; k < m; ++k) {
        const uint64_t j = uint64_t(k) + rng.uniform_index(grid - uint64_t(k));
        std::swap(pool[size_t(k)], pool[size_t(j)]);
        draws[size_t(k)] = {Index(pool[size_t(k)] / uint64_t(n2)),
                            Index(pool[size_t(k)] % uint64_t(n2))};
    }
    return ObservationSet::from_draws(n1, n2, SamplingModel::UniformNoReplace, seed,
                                      std::move(draws));
}

ObservationSet sample_bernoulli(Index n1, Index n2, double p, uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("sample_bernoulli: p must lie in (0, 1]");
    RngStream rng(seed);
    std::vector<std::pair<Index, Index>> draws;
    for (Index a = 0; a < n1; ++a)
        for (Index b = 0; b < n2; ++b)
            if (rng.uniform() < p) draws.emplace_back(a, b);
    if (draws.empty())
        throw std::invalid_argument("sample_bernoulli: draw produced an empty set");
    return ObservationSet::from_draws(n1, n2, SamplingModel::Bernoulli, seed,
                                      std::move(draws));
}

Matrix apply_R_omega(const ObservationSet& obs, const Matrix& Z) {
    if (Z.rows() != obs.n1 || Z.cols() != obs.n2)
        throw std::invalid_argument("apply_R_omega: dimension mismatch");
    Matrix out = Matrix::Zero(obs.n1, obs.n2);
    for (const auto& c : obs.cells) out(c.a, c.b) = double(c.count) * Z(c.a, c.b);
    return out;
}

void attach_values(ObservationSet& obs, const Matrix& M) {
    if (M.rows() != obs.n1 || M.cols() != obs.n2)
        throw std::invalid_argument("attach_values: dimension mismatch");
    obs.values.resize(obs.cells.size());
    for (size_t i = 0; i < obs.cells.size(); ++i)
        obs.values[i] = M(obs.cells[i].a, obs.cells[i].b);
}

int64_t sample_size_threshold(Index n1, Index n2, Index r, double mu0, double mu1,
                              double beta) {
    if (beta <= 1.0)
        throw std::invalid_argument("sample_size_threshold: requires beta > 1");
    if (mu0 < 1.0 || mu1 < 0.0)
        throw std::invalid_argument("sample_size_threshold: coherence out of range");
    const double lg = std::log(2.0 * double(n2));
    const double v = 32.0 * std::max(mu1 * mu1, mu0) * double(r) * double(n1 + n2) *
                     beta * lg * lg;
    return int64_t(std::ceil(v));
}

Index max_multiplicity(const ObservationSet& obs) {
    Index best = 0;
    for (const auto& c : obs.cells) best = std::max(best, c.count);
    return best;
}

double duplicate_bound(Index n2, double beta) {
    if (n2 < 9) throw std::invalid_argument("duplicate_bound: requires n2 >= 9");
    if (beta <= 1.0) throw std::invalid_argument("duplicate_bound: requires beta > 1");
    return 8.0 / 3.0 * beta * std::log(double(n2));
}

double duplicate_failure_prob(Index n2, double beta) {
    if (n2 < 9) throw std::invalid_argument("duplicate_failure_prob: requires n2 >= 9");
    if (beta <= 1.0)
        throw std::invalid_argument("duplicate_failure_prob: requires beta > 1");
    return std::pow(double(n2), 2.0 - 2.0 * beta);
}

std::vector<ObservationSet> partition(const ObservationSet& obs, int p) {
    if (obs.model != SamplingModel::WithReplace)
        throw std::invalid_argument("partition: needs a with-replacement sample");
    if (p < 1 || Index(p) > obs.m())
        throw std::invalid_argument("partition: p must lie in [1, m]");
    const Index m = obs.m();
    const Index base = m / Index(p);
    const Index extra = m % Index(p);
    std::vector<ObservationSet> blocks;
    blocks.reserve(size_t(p));
    size_t at = 0;
    for (int j = 0; j < p; ++j) {
        const Index len = base + (Index(j) < extra ? 1 : 0);
        std::vector<std::pair<Index, Index>> part(obs.draws.begin() + long(at),
                                                  obs.draws.begin() + long(at + size_t(len)));
        at += size_t(len);
        blocks.push_back(ObservationSet::from_draws(obs.n1, obs.n2,
                                                    SamplingModel::WithReplace, obs.seed,
                                                    std::move(part)));
    }
    return blocks;
}

}  // namespace mclab
