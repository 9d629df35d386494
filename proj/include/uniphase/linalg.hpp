#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace uniphase {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Central tolerance record. Per-operation defaults; override at call sites
// only where an operation exposes the knob.
struct Tolerances {
  double hermitian = 1e-12;  // relative symmetrization budget
  double unitary = 1e-10;    // ||U^dag U - I||_F acceptance
  double eigh = 1e-10;       // reconstruction / orthonormality
  double singular = 1e-12;   // relative rank-deficiency cutoff
  static const Tolerances& defaults();
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_finite(const CMat& M, const char* what);
bool is_hermitian(const CMat& M, double tol = Tolerances::defaults().hermitian);
bool is_unitary(const CMat& M, double tol = Tolerances::defaults().unitary);

// (M + M^dag)/2; validates the skew part against the tolerance budget.
CMat make_hermitian(const CMat& M,
                    double tol = Tolerances::defaults().hermitian);

// Row-major flatten of a square matrix: component d*a + i holds M(a, i).
CVec vec(const CMat& M);
CMat unvec(const CVec& v);

// Partial traces of a d^2 x d^2 matrix with composite index (a,i) -> d*a + i.
// partial_trace_1 sums the first (a) register, partial_trace_2 the second.
CMat partial_trace_1(const CMat& G);
CMat partial_trace_2(const CMat& G);

struct EighResult {
  RVec eigenvalues;  // descending
  CMat eigenvectors; // orthonormal columns, phase-canonical
};

// Hermitian eigendecomposition with deterministic ordering: eigenvalues
// descending; each eigenvector's first significant component made
// real-positive; near-degenerate pairs tie-broken lexicographically on the
// real parts of the eigenvector entries.
EighResult eigh(const CMat& M);

// Nearest unitary in Frobenius norm (polar factor). Throws on
// rank-deficient input.
CMat polar_unitary(const CMat& M);

CMat kron(const CMat& A, const CMat& B);

// Register permutation operator on (C^d)^{tensor t}. sigma is 0-based of
// size t; entry (r, c) is 1 iff c_k = r_{sigma(k)} for every register k,
// with row-major composite indexing (register 0 most significant).
CMat perm_operator(const std::vector<int>& sigma, int d);

// Multiply by a phase so the first entry with |z| > tol * max|z| (row-major
// scan) is real-positive.
CMat canonical_phase(const CMat& M);
CVec canonical_phase(const CVec& v);

}  // namespace uniphase
