#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uniphase/measurement.hpp"

namespace uniphase {

struct ProgramSpec {
  enum class Mode {
    kUnitary,          // min Tr(Gamma): data ball, PSD, partial-trace affine
    kUnitaryNonspiky,  // kUnitary + 0 <= vec(C)^dag Gamma vec(C) <= beta
    kVector,           // min ||Z||_*: data ball, |a^dag Z a| <= beta sqrt(1+1/d)
  };

  Mode mode = Mode::kUnitary;
  MeasurementEnsembleInstance ensemble;
  MeasurementRecord record;
  std::optional<double> beta;
  // Non-spikiness constraints always cover the m sampled measurements; these
  // optional extras extend the constrained set (the full group is out of
  // reach for n >= 2, so the set is a truncation).
  std::vector<CMat> extra_nonspiky_unitaries;
  std::vector<CVec> extra_nonspiky_vectors;
};

struct SolverConfig {
  int max_iters = 5000;
  double primal_tol = 1e-6;
  double dual_tol = 1e-6;
  double rho = 1.0;
  bool adapt_rho = true;
  double over_relaxation = 1.6;
  double dual_solve_tol = 1e-8;  // data-ball dual root-find tolerance
  std::string trace_csv;         // residual trace output path (optional)
  std::optional<CMat> warm_start;
  // Per-block scaled duals from a previous solve of a related program (see
  // SolverResult::dual_state). A primal warm start alone restarts the duals
  // from scratch and saves little; carrying both is what makes ascending-m
  // sweeps cheap.
  std::optional<std::vector<CMat>> warm_duals;

  std::string to_json() const;
};

struct SolverResiduals {
  double data = 0.0;    // max(0, ||A(x) - y|| - eta)
  double psd = 0.0;     // most negative eigenvalue, clamped at 0
  double affine = 0.0;  // partial-trace constraint violation (Frobenius)
  double box = 0.0;     // max non-spikiness violation
  double combined = 0.0;
  double dual = 0.0;
};

struct SolverResult {
  CMat solution;  // Gamma_opt (d^2 x d^2) or Z_opt (d x d)
  double objective = 0.0;
  SolverResiduals residuals;
  int iterations = 0;
  bool converged = false;
  bool infeasible = false;
  double wall_time_s = 0.0;
  std::string message;
  std::vector<CMat> dual_state;  // final scaled duals, one per block
  double rho_final = 0.0;

  std::string to_json() const;
};

SolverResult solve(const ProgramSpec& program, const SolverConfig& config);

// --- projection operators (also used directly by tests) ---

// Eigenvalue clamp at zero.
CMat project_psd(const CMat& M);

// Orthogonal projection onto {G : Tr_1(G) = Tr_2(G) = (I/d) Tr(G)}.
CMat project_affine_partial_trace(const CMat& G);

// Projection onto {X : ||A(X) - y||_2 <= eta} for a rank-one measurement
// map A(X)_i = c_i^dag X c_i. The m-dimensional dual system is solved in the
// eigenbasis of the Gram matrix |c_i^dag c_j|^2, precomputed once.
class DataBallProjector {
 public:
  // columns: matrix whose i-th column is c_i.
  DataBallProjector(CMat columns, RVec y, double eta,
                    double dual_tol = 1e-8);

  RVec apply(const CMat& X) const;          // A(X)
  CMat apply_adjoint(const RVec& z) const;  // A^*(z)
  CMat project(const CMat& X) const;

  // Squared-norm shortfall of y outside range(A); positive means the ball
  // cannot be reached and the feasible set is likely empty.
  double unreachable_excess() const { return unreachable_; }

 private:
  CMat V_;
  RVec y_;
  double eta_;
  double tol_;
  RMat eigvecs_;
  RVec eigvals_;
  double unreachable_ = 0.0;
};

// Dykstra cyclic projection onto the intersection of quadratic-form boxes
// {X : lo <= c^dag X c <= hi}.
CMat project_nonspiky_box(const CMat& X, const std::vector<CVec>& forms,
                          double lo, double hi, double tol = 1e-8,
                          int max_cycles = 100);

}  // namespace uniphase
