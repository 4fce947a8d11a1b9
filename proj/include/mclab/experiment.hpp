#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mclab/bounds.hpp"
#include "mclab/model.hpp"
#include "mclab/sampling.hpp"

namespace mclab {

/// Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> violations_);
    std::vector<std::string> violations;
};

struct ExperimentConfig {
    Index n1 = 0;
    Index n2 = 0;
    Index r = 0;
    MatrixModel matrix_model = MatrixModel::Haar;
    SamplingModel sampling_model = SamplingModel::UniformNoReplace;
    std::vector<int64_t> m_grid;   // exactly one of m_grid / p_grid may be set
    std::vector<double> p_grid;    // Bernoulli inclusion probabilities
    double beta = 2.0;
    long trials = 100;
    uint64_t seed = 0;
    double recovery_tol = 1e-4;
    double solver_tol = 1e-8;
    int max_iterations = 5000;
    bool certify = false;
    std::string output_path;
};

/// Strict JSON config: unknown keys are rejected, all violations are
/// collected into one ConfigError. Grids may be written as explicit arrays
/// or as "start:stop:step" strings (inclusive of stop when it lands on the
/// grid).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical 16-hex-digit FNV-1a hash of the config, stable across runs.
std::string config_hash(const ExperimentConfig& cfg);

struct TrialRecord {
    int64_t m = 0;          // nominal draw count of the grid point
    long trial = 0;
    uint64_t trial_seed = 0;
    bool recovered = false;
    bool certified = false;
    double rel_error = 0.0;
    int iterations = 0;
};

struct PhasePoint {
    int64_t m = 0;
    double success_rate = 0.0;
    double cert_rate = 0.0;
    double mean_error = 0.0;
    long trials = 0;
};

/// One trial is a pure function of (cfg, grid point, trial index): instance
/// and sample seeds both derive from trial_seed, so any row in the CSV can
/// be replayed alone. Records come back sorted by (m, trial) no matter how
/// they were scheduled.
std::vector<TrialRecord> run_phase_trials(const ExperimentConfig& cfg);
std::vector<PhasePoint> aggregate_phase(const ExperimentConfig& cfg,
                                        const std::vector<TrialRecord>& records);
std::vector<PhasePoint> run_phase_sweep(const ExperimentConfig& cfg);

/// One BoundReport per verified inequality: duplicate count, near isometry,
/// spectral deviation of the sampling operator, tangent-space contraction,
/// operator Markov, trace inequality for symmetric exponentials, and the
/// scalar reduction of the matrix Bernstein formula.
std::vector<BoundReport> run_verify_suite(const ExperimentConfig& cfg);

bool bound_report_passes(const BoundReport& report);

void write_phase_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const std::vector<TrialRecord>& records);
void write_bound_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const std::vector<BoundReport>& reports);

}  // namespace mclab
