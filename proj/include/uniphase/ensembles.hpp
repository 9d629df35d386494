#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uniphase/linalg.hpp"
#include "uniphase/rng.hpp"

namespace uniphase {

struct EnsembleSpec {
  enum class Kind {
    kHaarUnitary,
    kClifford,
    kPauli,
    kStabilizerStates,
    kExplicitList,
    kHaarSphere,
  };

  Kind kind = Kind::kHaarUnitary;
  int qubits = 0;  // for clifford / pauli / stabilizer kinds (d = 2^n)
  int dim = 0;     // for haar kinds
  std::uint64_t seed = 0;

  int dimension() const;
  bool is_vector_kind() const {
    return kind == Kind::kStabilizerStates || kind == Kind::kHaarSphere;
  }

  std::string to_json() const;
  static EnsembleSpec from_json(const std::string& text);
};

std::string ensemble_kind_name(EnsembleSpec::Kind kind);
EnsembleSpec::Kind ensemble_kind_from_name(const std::string& name);

// Exactly Haar: complex Ginibre matrix, QR, columns rephased by the
// triangular factor's diagonal (the raw QR factorization is biased).
CMat sample_haar_unitary(int d, Rng& rng);

// Haar on the unit sphere of C^d.
CVec sample_haar_sphere(int d, Rng& rng);

// Uniform over the n-qubit Clifford group modulo global phase, via a uniform
// symplectic basis over GF(2) plus uniform Pauli signs, synthesized into a
// dense 2^n x 2^n unitary. Output is phase-canonical.
CMat sample_clifford(int n, Rng& rng);

// Uniform over n-qubit stabilizer states (the Clifford orbit of |0...0>).
CVec sample_stabilizer_state(int n, Rng& rng);

// The 24 single-qubit Cliffords modulo phase, in a deterministic order.
std::vector<CMat> enumerate_single_qubit_cliffords();

// The 6 single-qubit stabilizer states.
std::vector<CVec> enumerate_single_qubit_stabilizer_states();

// All 4^n n-qubit Pauli operators (no phases).
std::vector<CMat> enumerate_paulis(int n);

// Average of V^{(x)t} (x) (V^dag)^{(x)t}; dimension d^{2t}. For vector
// ensembles the averaged term is (w w^dag)^{(x)t}, dimension d^t.
struct MomentOperator {
  int t = 0;
  int d = 0;
  CMat matrix;
  bool exact = false;
  long samples = 0;
  // Per-entry Monte Carlo standard error (zero when exact).
  RMat standard_error;
};

// Matrix-dimension budget for explicit moment operators.
constexpr Eigen::Index kMomentDimBudget = 256;

MomentOperator moment_operator_exact(const std::vector<CMat>& unitaries, int t);
MomentOperator moment_operator_sampled(int d, int t, long num_samples,
                                       const std::function<CMat(Rng&)>& sampler,
                                       Rng& rng);
MomentOperator moment_operator_vectors_exact(const std::vector<CVec>& vectors,
                                             int t);
MomentOperator moment_operator_vectors_sampled(
    int d, int t, long num_samples, const std::function<CVec(Rng&)>& sampler,
    Rng& rng);

// Convenience dispatch on an EnsembleSpec. Explicit lists are built for the
// kinds that enumerate at desk scale (pauli; clifford and stabilizer at n=1);
// everything else is Monte Carlo with num_samples draws.
MomentOperator moment_operator(const EnsembleSpec& spec, int t,
                               long num_samples);

// Exact Haar t=2 moment from the Weingarten second-moment formula:
// (P3412 + P4321)/(d^2-1) - (P3421 + P4312)/(d (d^2-1)).
MomentOperator weingarten_second_moment(int d);

// Haar reference moment. t=1 and t=2 are closed-form; higher t falls back
// to Monte Carlo with mc_samples draws.
MomentOperator haar_moment_unitary(int d, int t, long mc_samples = 0,
                                   Rng* rng = nullptr);
MomentOperator haar_moment_sphere(int d, int t, long mc_samples = 0,
                                  Rng* rng = nullptr);

struct DesignReport {
  bool is_design = false;
  double deviation = 0.0;       // Frobenius distance to the Haar moment
  double standard_error = 0.0;  // aggregate over entries (0 when exact)
  bool exact = false;
  int t = 0;
  int d = 0;
  long samples = 0;
  // Per-entry 3-sigma checks are not a formal joint test; with many entries
  // a few excursions are expected by chance.
  std::string note;

  std::string to_json() const;
};

DesignReport certify_design(const EnsembleSpec& spec, int t, double tolerance,
                            long num_samples = 100000);

// Frame potential (1/N^2) sum |Tr(Ci^dag Cj)|^{2t} of an explicit list.
double frame_potential(const std::vector<CMat>& unitaries, int t);

}  // namespace uniphase
