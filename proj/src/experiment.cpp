#include "mclab/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "mclab/certificate.hpp"
#include "mclab/io.hpp"
#include "mclab/solver.hpp"

namespace mclab {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> violations_)
    : std::runtime_error([&violations_] {
          std::string msg = "invalid config:";
          for (const auto& v : violations_) msg += "\n  - " + v;
          return msg;
      }()),
      violations(std::move(violations_)) {}

namespace {

// "start:stop:step" -> start, start+step, ..., capped at stop.
template <typename T>
std::vector<T> expand_range(const std::string& text, std::vector<std::string>& bad) {
    std::vector<T> out;
    std::istringstream in(text);
    double start, stop, step;
    char c1, c2;
    if (!(in >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' ||
        (in >> std::ws, !in.eof()) || step <= 0.0 || stop < start) {
        bad.push_back("grid string '" + text + "' is not start:stop:step with step > 0");
        return out;
    }
    for (double v = start; v <= stop + 1e-9 * step; v += step)
        out.push_back(T(std::is_integral_v<T> ? std::llround(v) : v));
    return out;
}

struct FieldReader {
    const json& j;
    std::vector<std::string>& bad;

    bool has(const char* key) const { return j.contains(key); }

    int64_t integer(const char* key, int64_t fallback, int64_t min_value) {
        if (!has(key)) return fallback;
        if (!j[key].is_number_integer()) {
            bad.push_back(std::string(key) + " must be an integer");
            return fallback;
        }
        const int64_t v = j[key].get<int64_t>();
        if (v < min_value) {
            bad.push_back(std::string(key) + " must be at least " + std::to_string(min_value));
            return fallback;
        }
        return v;
    }

    double number(const char* key, double fallback, double min_exclusive) {
        if (!has(key)) return fallback;
        if (!j[key].is_number()) {
            bad.push_back(std::string(key) + " must be a number");
            return fallback;
        }
        const double v = j[key].get<double>();
        if (!(v > min_exclusive)) {
            bad.push_back(std::string(key) + " must be greater than " +
                          std::to_string(min_exclusive));
            return fallback;
        }
        return v;
    }

    std::string text(const char* key, const std::string& fallback) {
        if (!has(key)) return fallback;
        if (!j[key].is_string()) {
            bad.push_back(std::string(key) + " must be a string");
            return fallback;
        }
        return j[key].get<std::string>();
    }
};

uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// output_path is deliberately left out: the hash identifies what was run,
// not where the rows were written.
json canonical_json(const ExperimentConfig& cfg) {
    json j;
    j["n1"] = cfg.n1;
    j["n2"] = cfg.n2;
    j["r"] = cfg.r;
    j["matrix_model"] = matrix_model_name(cfg.matrix_model);
    j["sampling_model"] = sampling_model_name(cfg.sampling_model);
    j["m_grid"] = cfg.m_grid;
    j["p_grid"] = cfg.p_grid;
    j["beta"] = cfg.beta;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["recovery_tol"] = cfg.recovery_tol;
    j["solver_tol"] = cfg.solver_tol;
    j["max_iterations"] = cfg.max_iterations;
    j["certify"] = cfg.certify;
    return j;
}

uint64_t derived_seed(uint64_t root, uint64_t stream_id) {
    RngStream s(root, stream_id);
    return s.next_u64();
}

struct TrialSeeds {
    uint64_t instance;
    uint64_t sampling;
};

TrialSeeds split_trial_seed(uint64_t trial_seed) {
    RngStream s(trial_seed);
    return {s.next_u64(), s.next_u64()};
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    std::vector<std::string> bad;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    if (!j.is_object()) throw ConfigError({"config must be a JSON object"});

    static const std::vector<std::string> known = {
        "n1", "n2", "r", "matrix_model", "sampling_model", "m_grid", "p_grid",
        "beta", "trials", "seed", "tolerances", "max_iterations", "certify",
        "output_path"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            bad.push_back("unknown key '" + key + "'");

    ExperimentConfig cfg;
    FieldReader read{j, bad};

    if (!j.contains("n1")) bad.push_back("n1 is required");
    if (!j.contains("n2")) bad.push_back("n2 is required");
    if (!j.contains("r")) bad.push_back("r is required");
    cfg.n1 = Index(read.integer("n1", 1, 1));
    cfg.n2 = Index(read.integer("n2", 1, 1));
    cfg.r = Index(read.integer("r", 1, 1));
    if (j.contains("n1") && j.contains("n2") && j.contains("r") &&
        !(cfg.r <= cfg.n1 && cfg.n1 <= cfg.n2))
        bad.push_back("requires r <= n1 <= n2");

    if (read.has("matrix_model")) {
        try {
            cfg.matrix_model = parse_matrix_model(read.text("matrix_model", "haar"));
        } catch (const std::invalid_argument& e) {
            bad.push_back(e.what());
        }
    }
    if (read.has("sampling_model")) {
        try {
            cfg.sampling_model =
                parse_sampling_model(read.text("sampling_model", "uniform-no-replace"));
        } catch (const std::invalid_argument& e) {
            bad.push_back(e.what());
        }
    }

    if (read.has("m_grid")) {
        const json& g = j["m_grid"];
        if (g.is_string()) {
            cfg.m_grid = expand_range<int64_t>(g.get<std::string>(), bad);
        } else if (g.is_array()) {
            for (const auto& v : g) {
                if (!v.is_number_integer() || v.get<int64_t>() < 1) {
                    bad.push_back("m_grid entries must be positive integers");
                    break;
                }
                cfg.m_grid.push_back(v.get<int64_t>());
            }
        } else {
            bad.push_back("m_grid must be an array or start:stop:step string");
        }
        if (g.is_array() && g.empty()) bad.push_back("m_grid must be nonempty");
    }
    if (read.has("p_grid")) {
        const json& g = j["p_grid"];
        if (g.is_string()) {
            cfg.p_grid = expand_range<double>(g.get<std::string>(), bad);
        } else if (g.is_array()) {
            for (const auto& v : g) {
                if (!v.is_number() || !(v.get<double>() > 0.0) || v.get<double>() > 1.0) {
                    bad.push_back("p_grid entries must lie in (0, 1]");
                    break;
                }
                cfg.p_grid.push_back(v.get<double>());
            }
        } else {
            bad.push_back("p_grid must be an array or start:stop:step string");
        }
        if (g.is_array() && g.empty()) bad.push_back("p_grid must be nonempty");
    }
    if (!cfg.m_grid.empty() && !cfg.p_grid.empty())
        bad.push_back("give m_grid or p_grid, not both");
    if (!cfg.p_grid.empty() && cfg.sampling_model != SamplingModel::Bernoulli)
        bad.push_back("p_grid needs sampling_model bernoulli");
    if (!cfg.m_grid.empty() && cfg.sampling_model == SamplingModel::Bernoulli)
        bad.push_back("bernoulli sampling sweeps over p_grid, not m_grid");
    for (size_t i = 1; i < cfg.m_grid.size(); ++i)
        if (cfg.m_grid[i] <= cfg.m_grid[i - 1]) {
            bad.push_back("m_grid must be strictly increasing");
            break;
        }
    for (size_t i = 1; i < cfg.p_grid.size(); ++i)
        if (cfg.p_grid[i] <= cfg.p_grid[i - 1]) {
            bad.push_back("p_grid must be strictly increasing");
            break;
        }
    if (cfg.sampling_model == SamplingModel::UniformNoReplace)
        for (const int64_t m : cfg.m_grid)
            if (m > int64_t(cfg.n1) * int64_t(cfg.n2)) {
                bad.push_back("m_grid exceeds the n1*n2 cell count");
                break;
            }

    cfg.beta = read.number("beta", 2.0, 1.0);
    cfg.trials = long(read.integer("trials", 100, 1));
    if (read.has("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<int64_t>() < 0)
            bad.push_back("seed must be a nonnegative integer");
        else
            cfg.seed = j["seed"].get<uint64_t>();
    }
    if (read.has("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) {
            bad.push_back("tolerances must be an object");
        } else {
            for (const auto& [key, value] : t.items())
                if (key != "recovery" && key != "solver")
                    bad.push_back("unknown tolerances key '" + key + "'");
            FieldReader tr{t, bad};
            cfg.recovery_tol = tr.number("recovery", 1e-4, 0.0);
            cfg.solver_tol = tr.number("solver", 1e-8, 0.0);
        }
    }
    cfg.max_iterations = int(read.integer("max_iterations", 5000, 1));
    if (read.has("certify")) {
        if (!j["certify"].is_boolean())
            bad.push_back("certify must be a boolean");
        else
            cfg.certify = j["certify"].get<bool>();
    }
    if (cfg.certify && cfg.sampling_model != SamplingModel::WithReplace)
        bad.push_back("certify needs sampling_model with-replace");
    cfg.output_path = read.text("output_path", "");

    if (!bad.empty()) throw ConfigError(std::move(bad));
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open " + path});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
    const uint64_t h = fnv1a(canonical_json(cfg).dump());
    std::ostringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << h;
    return out.str();
}

namespace {

TrialRecord run_one_trial(const ExperimentConfig& cfg, size_t grid_index,
                          int64_t m_nominal, double bernoulli_p, long trial) {
    TrialRecord rec;
    rec.m = m_nominal;
    rec.trial = trial;
    rec.trial_seed =
        derived_seed(cfg.seed, (uint64_t(grid_index) << 32) | uint64_t(trial));
    const TrialSeeds seeds = split_trial_seed(rec.trial_seed);

    const LowRankFactorization f =
        make_random_low_rank(cfg.n1, cfg.n2, cfg.r, cfg.matrix_model, seeds.instance);
    const Matrix M = f.matrix();

    ObservationSet obs;
    try {
        switch (cfg.sampling_model) {
            case SamplingModel::UniformNoReplace:
                obs = sample_uniform(cfg.n1, cfg.n2, Index(m_nominal), seeds.sampling);
                break;
            case SamplingModel::WithReplace:
                obs = sample_with_replacement(cfg.n1, cfg.n2, Index(m_nominal),
                                              seeds.sampling);
                break;
            case SamplingModel::Bernoulli:
                obs = sample_bernoulli(cfg.n1, cfg.n2, bernoulli_p, seeds.sampling);
                break;
        }
    } catch (const std::invalid_argument&) {
        // a Bernoulli draw can come back empty; count it as a failed trial
        rec.rel_error = 1.0;
        return rec;
    }
    attach_values(obs, M);

    SolverParams params;
    params.tol = cfg.solver_tol;
    params.max_iterations = cfg.max_iterations;
    const SolverResult sol = solve_nuclear_min(obs, params);
    rec.iterations = sol.iterations;
    rec.rel_error = (sol.X - M).norm() / M.norm();
    rec.recovered = rec.rel_error <= cfg.recovery_tol;

    if (cfg.certify) {
        const CoherenceProfile prof = coherence_profile(f);
        try {
            const GolfingParameters gp = golfing_parameters(
                cfg.n1, cfg.n2, cfg.r, prof.mu0, prof.mu1, cfg.beta, obs.m());
            const CertificateTrace trace =
                build_certificate(f, partition(obs, gp.p));
            rec.certified = optimality_check(f, obs, trace, cfg.beta) ==
                            OptimalityVerdict::CertifiedUnique;
        } catch (const InsufficientSamples&) {
            rec.certified = false;
        }
    }
    return rec;
}

}  // namespace

std::vector<TrialRecord> run_phase_trials(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError({"trials must be at least 1"});
    if (cfg.m_grid.empty() && cfg.p_grid.empty())
        throw ConfigError({"phase sweep needs m_grid or p_grid"});
    std::vector<TrialRecord> records;
    const size_t points = cfg.m_grid.empty() ? cfg.p_grid.size() : cfg.m_grid.size();
    records.reserve(points * size_t(cfg.trials));
    for (size_t i = 0; i < points; ++i) {
        const double p = cfg.p_grid.empty() ? 0.0 : cfg.p_grid[i];
        const int64_t m_nominal =
            cfg.m_grid.empty()
                ? std::llround(p * double(cfg.n1) * double(cfg.n2))
                : cfg.m_grid[i];
        for (long t = 0; t < cfg.trials; ++t)
            records.push_back(run_one_trial(cfg, i, m_nominal, p, t));
    }
    std::sort(records.begin(), records.end(), [](const TrialRecord& x, const TrialRecord& y) {
        return x.m != y.m ? x.m < y.m : x.trial < y.trial;
    });
    return records;
}

std::vector<PhasePoint> aggregate_phase(const ExperimentConfig& cfg,
                                        const std::vector<TrialRecord>& records) {
    std::map<int64_t, PhasePoint> points;
    for (const auto& rec : records) {
        PhasePoint& pt = points[rec.m];
        pt.m = rec.m;
        pt.trials += 1;
        pt.success_rate += rec.recovered ? 1.0 : 0.0;
        pt.cert_rate += rec.certified ? 1.0 : 0.0;
        pt.mean_error += rec.rel_error;
    }
    std::vector<PhasePoint> out;
    out.reserve(points.size());
    for (auto& [m, pt] : points) {
        pt.success_rate /= double(pt.trials);
        pt.cert_rate /= double(pt.trials);
        pt.mean_error /= double(pt.trials);
        out.push_back(pt);
    }
    (void)cfg;
    return out;
}

std::vector<PhasePoint> run_phase_sweep(const ExperimentConfig& cfg) {
    return aggregate_phase(cfg, run_phase_trials(cfg));
}

namespace {

BoundReport monte_carlo_report(const std::string& name, double tail_raw,
                               double threshold, long trials, long exceed,
                               const std::string& params) {
    BoundReport report;
    report.bound_name = name;
    report.theoretical_threshold = threshold;
    report.theoretical_tail = clamp_probability(tail_raw);
    report.trials = trials;
    report.empirical_exceed_frequency = double(exceed) / double(trials);
    const double f = report.empirical_exceed_frequency;
    report.std_error = std::sqrt(f * (1.0 - f) / double(trials));
    report.params = params;
    return report;
}

std::string dims_params(const ExperimentConfig& cfg, double beta, int64_t m) {
    std::ostringstream out;
    out << "n1=" << cfg.n1 << ";n2=" << cfg.n2 << ";r=" << cfg.r << ";beta=" << beta
        << ";m=" << m;
    return out.str();
}

}  // namespace

std::vector<BoundReport> run_verify_suite(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw ConfigError({"trials must be at least 1"});
    std::vector<BoundReport> reports;
    const long T = cfg.trials;

    {  // duplicate count at m = n1*n2
        const double threshold = duplicate_bound(cfg.n2, cfg.beta);
        const int64_t m = int64_t(cfg.n1) * int64_t(cfg.n2);
        long exceed = 0;
        for (long t = 0; t < T; ++t) {
            const uint64_t s = derived_seed(cfg.seed, (1ull << 48) | uint64_t(t));
            const ObservationSet obs =
                sample_with_replacement(cfg.n1, cfg.n2, Index(m), s);
            if (double(max_multiplicity(obs)) >= threshold) ++exceed;
        }
        reports.push_back(monte_carlo_report(
            "duplicate-count", duplicate_failure_prob(cfg.n2, cfg.beta), threshold, T,
            exceed, dims_params(cfg, cfg.beta, m)));
    }

    {  // near isometry at m just above its proviso
        long exceed = 0;
        double mean_bound = 0.0;
        int64_t last_m = 0;
        for (long t = 0; t < T; ++t) {
            const uint64_t s = derived_seed(cfg.seed, (2ull << 48) | uint64_t(t));
            const TrialSeeds seeds = split_trial_seed(s);
            const LowRankFactorization f = make_random_low_rank(
                cfg.n1, cfg.n2, cfg.r, MatrixModel::Haar, seeds.instance);
            const double mu0 = coherence_profile(f).mu0;
            const int64_t m =
                int64_t(std::ceil(near_isometry_min_m(cfg.n1, cfg.n2, cfg.r, mu0,
                                                      cfg.beta))) + 1;
            last_m = m;
            const ObservationSet obs =
                sample_with_replacement(cfg.n1, cfg.n2, Index(m), seeds.sampling);
            const double dev = superop_deviation_norm(TangentSpace::of(f), obs);
            const double bound =
                near_isometry_bound(cfg.n1, cfg.n2, cfg.r, mu0, Index(m), cfg.beta);
            mean_bound += bound;
            if (dev > bound) ++exceed;
        }
        reports.push_back(monte_carlo_report(
            "near-isometry", near_isometry_failure_prob(cfg.n2, cfg.beta),
            mean_bound / double(T), T, exceed, dims_params(cfg, cfg.beta, last_m)));
    }

    {  // spectral deviation of the scaled sampling operator on Z = U V^T
        const int64_t m =
            int64_t(std::ceil(inf_deviation_min_m(cfg.n1, cfg.n2, cfg.beta))) + 1;
        const double factor = inf_deviation_bound(cfg.n1, cfg.n2, Index(m), cfg.beta);
        long exceed = 0;
        for (long t = 0; t < T; ++t) {
            const uint64_t s = derived_seed(cfg.seed, (3ull << 48) | uint64_t(t));
            const TrialSeeds seeds = split_trial_seed(s);
            const LowRankFactorization f = make_random_low_rank(
                cfg.n1, cfg.n2, cfg.r, MatrixModel::Haar, seeds.instance);
            const Matrix Z = f.U * f.V.transpose();
            const ObservationSet obs =
                sample_with_replacement(cfg.n1, cfg.n2, Index(m), seeds.sampling);
            if (inf_norm_deviation(obs, Z) > factor * inf_norm(Z)) ++exceed;
        }
        reports.push_back(monte_carlo_report(
            "inf-norm-deviation", inf_deviation_failure_prob(cfg.n1, cfg.n2, cfg.beta),
            factor, T, exceed, dims_params(cfg, cfg.beta, m)));
    }

    {  // tangent-space contraction; its hypothesis needs beta > 2
        const double beta_c = cfg.beta > 2.0 ? cfg.beta : 3.0;
        long exceed = 0;
        double mean_bound = 0.0;
        int64_t last_m = 0;
        for (long t = 0; t < T; ++t) {
            const uint64_t s = derived_seed(cfg.seed, (4ull << 48) | uint64_t(t));
            const TrialSeeds seeds = split_trial_seed(s);
            const LowRankFactorization f = make_random_low_rank(
                cfg.n1, cfg.n2, cfg.r, MatrixModel::Haar, seeds.instance);
            const double mu0 = coherence_profile(f).mu0;
            const int64_t m =
                int64_t(std::ceil(contraction_min_m(cfg.n1, cfg.n2, cfg.r, mu0,
                                                    beta_c))) + 1;
            last_m = m;
            const Matrix Z = f.U * f.V.transpose();
            const ObservationSet obs =
                sample_with_replacement(cfg.n1, cfg.n2, Index(m), seeds.sampling);
            const double dev =
                pt_romega_inf_deviation(TangentSpace::of(f), obs, Z);
            const double bound =
                contraction_bound(cfg.n1, cfg.n2, cfg.r, mu0, Index(m), beta_c) *
                inf_norm(Z);
            mean_bound += bound;
            if (dev > bound) ++exceed;
        }
        reports.push_back(monte_carlo_report(
            "norm-contraction", contraction_failure_prob(cfg.n2, beta_c),
            mean_bound / double(T), T, exceed, dims_params(cfg, beta_c, last_m)));
    }

    {  // operator Markov on the scalar-multiple ensemble
        const Matrix A = 1.5 * Matrix::Identity(2, 2);
        BoundReport report = operator_markov_check(
            [](RngStream& rng) -> Matrix {
                return rng.uniform(0.0, 2.0) * Matrix::Identity(2, 2);
            },
            A, T, derived_seed(cfg.seed, 5ull << 48));
        report.params = "d=2;X=s*I,s~U[0,2];A=1.5*I";
        reports.push_back(std::move(report));
    }

    {  // trace inequality tr exp(A+B) <= tr(exp A exp B), random symmetric pairs
        long exceed = 0;
        for (long t = 0; t < T; ++t) {
            RngStream rng(derived_seed(cfg.seed, 6ull << 48), uint64_t(t));
            const Matrix GA = gaussian_matrix(4, 4, rng);
            const Matrix GB = gaussian_matrix(4, 4, rng);
            const Matrix A = (GA + GA.transpose()) / 2.0;
            const Matrix B = (GB + GB.transpose()) / 2.0;
            try {
                golden_thompson_check(A, B);
            } catch (const NumericFailure&) {
                ++exceed;
            }
        }
        reports.push_back(
            monte_carlo_report("golden-thompson", 0.0, 0.0, T, exceed, "d=4"));
    }

    {  // scalar reduction of the two-sided Bernstein formula
        long exceed = 0;
        const long grid = 100;
        for (long i = 0; i < grid; ++i) {
            const double sigma_sq = 0.25 * double(1 + i % 10);
            const double tau = 0.5 * double(1 + i / 10);
            const double M = 1.0;
            const double ours = bernstein_tail(1, 1, sigma_sq, M, tau);
            const double classical =
                2.0 * std::exp(-(tau * tau / 2.0) / (sigma_sq + M * tau / 3.0));
            if (std::abs(ours - classical) > 1e-12) ++exceed;
        }
        reports.push_back(monte_carlo_report("bernstein-scalar", 0.0, 1e-12, grid,
                                             exceed, "d1=d2=1;M=1;grid=100"));
    }

    return reports;
}

bool bound_report_passes(const BoundReport& report) {
    return report.empirical_exceed_frequency <=
           report.theoretical_tail + 3.0 * report.std_error + 1e-15;
}

void write_phase_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const std::vector<TrialRecord>& records) {
    const std::string hash = config_hash(cfg);
    out << "m,trial,seed,recovered,certified,rel_error,iterations,config_hash\n";
    for (const auto& rec : records)
        out << rec.m << ',' << rec.trial << ',' << rec.trial_seed << ','
            << (rec.recovered ? 1 : 0) << ',' << (rec.certified ? 1 : 0) << ','
            << format_double(rec.rel_error) << ',' << rec.iterations << ',' << hash
            << '\n';
}

void write_bound_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const std::vector<BoundReport>& reports) {
    const std::string hash = config_hash(cfg);
    out << "bound_name,params,theoretical,empirical,trials,stderr,verdict,seed,config_hash\n";
    for (const auto& report : reports)
        out << report.bound_name << ',' << report.params << ','
            << format_double(report.theoretical_tail) << ','
            << format_double(report.empirical_exceed_frequency) << ',' << report.trials
            << ',' << format_double(report.std_error) << ','
            << (bound_report_passes(report) ? "PASS" : "FAIL") << ',' << cfg.seed << ','
            << hash << '\n';
}

}  // namespace mclab
