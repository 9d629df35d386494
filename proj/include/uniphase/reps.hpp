#pragma once

#include "uniphase/linalg.hpp"

namespace uniphase {

// Trace convention of a stored Choi matrix. The two scalings differ by a
// factor of d and are never inferred from the data; mixing them silently is
// the classic mistake in this domain.
enum class ChoiNormalization {
  kStateNormalized,  // trace 1 for a trace-preserving process
  kLifted,           // trace d; equals d * J, the PhaseLift decision scale
};

struct ChoiMatrix {
  int d = 0;
  CMat matrix;  // d^2 x d^2 Hermitian
  ChoiNormalization normalization = ChoiNormalization::kStateNormalized;

  ChoiMatrix as(ChoiNormalization target) const;
};

struct LiouvilleMatrix {
  int d = 0;
  CMat matrix;  // d^2 x d^2, equals U (x) conj(U) for a unitary process
};

// |Phi+> = (1/sqrt d) sum_i |i>|i>
CVec max_entangled_state(int d);

// J(U) = (1/d) vec(U) vec(U)^dag  (state-normalized)
ChoiMatrix choi_of_unitary(const CMat& U);

// U (x) conj(U)
LiouvilleMatrix liouville_of_unitary(const CMat& U);

// Exact index shuffles: <kl|F_L|ij> = d <ki|J|lj> (state-normalized J).
LiouvilleMatrix choi_to_liouville(const ChoiMatrix& J);
ChoiMatrix liouville_to_choi(const LiouvilleMatrix& L);

// Tr(J(F) J(K)) on state-normalized Choi matrices.
double trace_pairing(const ChoiMatrix& F, const ChoiMatrix& K);

// (1/d^2) Tr(F_L K_L^dag); agrees with trace_pairing on converted inputs.
double trace_pairing_liouville(const LiouvilleMatrix& F,
                               const LiouvilleMatrix& K);

}  // namespace uniphase
