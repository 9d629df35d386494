#pragma once

#include <map>
#include <string>
#include <vector>

#include "uniphase/measurement.hpp"
#include "uniphase/solver.hpp"

namespace uniphase {

struct ExperimentGrid {
  std::vector<int> dims = {4, 8, 16};
  // Explicit per-d measurement counts; dims without an entry fall back to
  // the sqrt(m) grid below.
  std::map<int, std::vector<int>> m_values;
  // sqrt(m) linear from sqrt_m_lo * d to sqrt_m_hi * d in m_steps points.
  double sqrt_m_lo = 0.5;
  double sqrt_m_hi = 4.0;
  int m_steps = 12;
  std::vector<EnsembleSpec::Kind> ensembles = {
      EnsembleSpec::Kind::kHaarUnitary, EnsembleSpec::Kind::kClifford};
  int trials = 10;
  double noise_sigma = 0.0;
  double error_cutoff = 0.05;  // normalized lifted error defining "success"
  SolverConfig solver;
  std::uint64_t master_seed = 1;
  bool allow_large = false;  // lift the d <= 16 budget guard
  int workers = 0;           // 0 = hardware concurrency

  std::vector<int> m_grid_for(int d) const;
  void validate() const;

  // Flat key=value text (one pair per line, '#' comments). Unknown keys are
  // rejected so typos do not silently fall back to defaults.
  static ExperimentGrid from_config(const std::string& text);
  std::string to_json() const;
};

struct TrialRow {
  int d = 0;
  int m = 0;
  std::string ensemble;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  double eta = 0.0;
  double lifted_error = 0.0;
  double normalized_error = 0.0;
  double signal_error = 0.0;
  double fidelity = 0.0;
  int solver_iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;

  static const char* kSchemaLine;  // "# uniphase.trialrow.v1"
  static const char* kHeaderLine;  // comma-joined field names, in order
  std::string to_csv() const;
  static TrialRow from_csv(const std::string& line);
};

struct ThresholdFit {
  int d = 0;
  std::string ensemble;
  int m_star = 0;       // smallest grid m with >= ceil(0.9 * trials) successes
  bool found = false;   // false when no grid m succeeds
};

struct SweepSummary {
  std::vector<ThresholdFit> thresholds;
  // Least-squares fit of sqrt(m*) = alpha * d through the origin, per
  // ensemble, over the dims where a threshold exists.
  std::map<std::string, double> alpha;
  double error_cutoff = 0.0;
  int trials = 0;

  std::string to_json() const;
};

struct SweepResult {
  std::vector<TrialRow> rows;
  SweepSummary summary;
};

// Runs the grid, appending rows to csv_path as trial streams complete (in a
// canonical order, so reruns produce byte-identical files up to wall_ms).
// With resume set, rows already present in the file are kept and only
// missing trial streams are recomputed.
SweepResult run_sweep(const ExperimentGrid& grid, const std::string& csv_path,
                      bool resume = false);

SweepSummary summarize_sweep(const std::vector<TrialRow>& rows, double cutoff,
                             int trials);

std::vector<TrialRow> read_trial_csv(const std::string& path);

// Grid heatmap: x = d (one column pair per ensemble), y = sqrt(m), color =
// mean normalized error with white at 0, plus the fitted sqrt(m) = alpha d
// line. Byte-deterministic for identical input tables.
std::string render_heatmap_svg(const std::vector<TrialRow>& rows);
void emit_heatmap(const std::vector<TrialRow>& rows,
                  const std::string& svg_path);

struct IdentityCheck {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool expected_to_fail = false;  // negative-control fixtures
  bool passed = false;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_passed = false;
  std::uint64_t seed = 0;
  int instances = 0;

  std::string to_json() const;
  static IdentityReport from_json(const std::string& text);
};

// Representation and measurement identity suite over random instances at
// d in {2, 3, 4, 8}, including a deliberately wrong (transposed) Liouville
// conversion that must fail its check.
IdentityReport verify_identities(std::uint64_t seed = 1, int instances = 100);

struct NonspikyStudyReport {
  int n = 0;
  int samples = 0;
  int trials = 0;
  double t = 0.0;
  double beta_bound = 0.0;     // Clifford-group bound at this t
  double ln_group_size = 0.0;  // full group, not the sampled subset
  int trials_within = 0;
  double coverage = 0.0;
  double predicted_failure_rate = 0.0;  // 4 e^{-t}
  // Quantiles of the per-trial observed max |Tr(C^dag U)|^2.
  double q_min = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q_max = 0.0;

  std::string to_json() const;
};

// Empirical spikiness of Haar signals against sampled Clifford measurements,
// compared with the concentration bound for the full group.
NonspikyStudyReport run_nonspiky_study(int n, int samples, int trials,
                                       double t, std::uint64_t seed);

// ln |C_n / U(1)|: the n-qubit Clifford group order modulo global phase.
double clifford_group_log_size(int n);
// ln(number of n-qubit stabilizer states).
double stabilizer_state_log_count(int n);

struct VectorStudyRow {
  int m = 0;
  double error = 0.0;         // ||Z - X||_F
  double nuclear_norm = 0.0;  // of the solution
  int iterations = 0;
  bool converged = false;
  bool infeasible = false;
};

struct VectorStudyResult {
  int n = 0;
  int rank = 0;
  double beta = 0.0;
  std::vector<VectorStudyRow> rows;

  std::string to_json() const;
};

// Rank-r X = U W U^dag against stabilizer-state measurements, solved at each
// m in the grid. beta_override shrinks the non-spikiness level below the
// honest bound (to exercise the infeasibility path); 0 means use the bound.
VectorStudyResult run_vector_mode_study(int n, int rank,
                                        const std::vector<int>& m_grid,
                                        std::uint64_t seed,
                                        double noise_sigma = 0.0,
                                        double beta_override = 0.0);

// Master-seed resolution: UNIPHASE_SEED environment variable wins over the
// configured value.
std::uint64_t resolve_master_seed(std::uint64_t configured);

}  // namespace uniphase
