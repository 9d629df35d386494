#include "uniphase/recovery.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace uniphase {

CMat extract_unitary(const CMat& Gamma_opt, bool* ambiguous, CMat* raw,
                     double* eigen_gap) {
  const EighResult e = eigh(Gamma_opt);
  const double l1 = e.eigenvalues(0);
  if (e.eigenvalues.minCoeff() < -0.1 * std::abs(l1)) {
    throw ValidationError("extract_unitary: input is far from PSD");
  }
  if (l1 <= 0) {
    throw ValidationError("extract_unitary: no positive leading eigenvalue");
  }
  const double gap =
      e.eigenvalues.size() > 1 ? l1 - e.eigenvalues(1) : l1;
  if (eigen_gap) *eigen_gap = gap;
  if (ambiguous) *ambiguous = gap < 1e-8 * l1;

  const CMat M = unvec(CVec(std::sqrt(l1) * e.eigenvectors.col(0)));
  if (raw) *raw = M;
  // Full-SVD polar factor: well defined (up to the flagged ambiguity) even
  // when M is rank deficient, unlike the strict nearest-unitary projection.
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return canonical_phase(CMat(svd.matrixU() * svd.matrixV().adjoint()));
}

double phase_aligned_error(const CMat& U_hat, const CMat& U) {
  if (U_hat.rows() != U.rows() || U_hat.cols() != U.cols()) {
    throw DimensionError("phase_aligned_error: dimension mismatch");
  }
  const Complex tr = (U.adjoint() * U_hat).trace();
  const Complex phase = (tr == Complex(0.0)) ? Complex(1.0) : tr / std::abs(tr);
  return (U_hat - phase * U).norm();
}

double lifted_error(const CMat& Gamma_opt, const CMat& U) {
  const CVec v = vec(U);
  return (Gamma_opt - v * v.adjoint()).norm();
}

RecoveryOutcome recover(const CMat& Gamma_opt, const CMat& U_true) {
  RecoveryOutcome out;
  out.U_hat = extract_unitary(Gamma_opt, &out.ambiguous, &out.raw,
                              &out.eigen_gap);
  out.lifted_error = lifted_error(Gamma_opt, U_true);
  out.normalized_error = out.lifted_error / static_cast<double>(U_true.rows());
  out.signal_error = phase_aligned_error(out.U_hat, U_true);
  const double d = static_cast<double>(U_true.rows());
  out.fidelity = std::norm((U_true.adjoint() * out.U_hat).trace()) / (d * d);
  return out;
}

std::string RecoveryOutcome::to_json() const {
  nlohmann::json j;
  j["lifted_error"] = lifted_error;
  j["normalized_error"] = normalized_error;
  j["signal_error"] = signal_error;
  j["fidelity"] = fidelity;
  j["eigen_gap"] = eigen_gap;
  j["ambiguous"] = ambiguous;
  return j.dump();
}

}  // namespace uniphase
