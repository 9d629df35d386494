#pragma once

#include <string>

#include "uniphase/linalg.hpp"

namespace uniphase {

struct RecoveryOutcome {
  CMat U_hat;            // nearest unitary to the extracted matrix
  CMat raw;              // unprojected unvec of the scaled top eigenvector
  double lifted_error = 0.0;      // ||Gamma_opt - vec(U)vec(U)^dag||_F
  double normalized_error = 0.0;  // lifted_error / d
  double signal_error = 0.0;      // min_phi ||U_hat - e^{i phi} U||_F
  double fidelity = 0.0;          // |Tr(U^dag U_hat)|^2 / d^2
  double eigen_gap = 0.0;         // lambda_1 - lambda_2 of Gamma_opt
  bool ambiguous = false;         // degenerate top eigenspace

  std::string to_json() const;
};

// Top eigenvector of Gamma_opt, scaled by sqrt(lambda_1), unvec'd, and
// projected to the nearest unitary; phase-canonical. Sets *ambiguous when
// the eigenvalue gap is too small for the extraction to be well defined.
CMat extract_unitary(const CMat& Gamma_opt, bool* ambiguous = nullptr,
                     CMat* raw = nullptr, double* eigen_gap = nullptr);

// min over phi of ||U_hat - e^{i phi} U||_F, via phi = arg Tr(U^dag U_hat).
double phase_aligned_error(const CMat& U_hat, const CMat& U);

// Frobenius distance of Gamma_opt to the ideal lift of U.
double lifted_error(const CMat& Gamma_opt, const CMat& U);

RecoveryOutcome recover(const CMat& Gamma_opt, const CMat& U_true);

}  // namespace uniphase
