#include "uniphase/reps.hpp"

#include <cmath>

namespace uniphase {

ChoiMatrix ChoiMatrix::as(ChoiNormalization target) const {
  if (target == normalization) return *this;
  ChoiMatrix out{d, matrix, target};
  if (target == ChoiNormalization::kLifted) {
    out.matrix *= static_cast<double>(d);
  } else {
    out.matrix /= static_cast<double>(d);
  }
  return out;
}

CVec max_entangled_state(int d) {
  if (d < 1) throw DimensionError("max_entangled_state: d must be positive");
  CVec phi = CVec::Zero(static_cast<Eigen::Index>(d) * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) phi(static_cast<Eigen::Index>(d) * i + i) = amp;
  return phi;
}

ChoiMatrix choi_of_unitary(const CMat& U) {
  if (!is_unitary(U)) {
    throw ValidationError("choi_of_unitary: input is not unitary");
  }
  const int d = static_cast<int>(U.rows());
  const CVec v = vec(U);
  ChoiMatrix out;
  out.d = d;
  out.matrix = (v * v.adjoint()) / static_cast<double>(d);
  out.normalization = ChoiNormalization::kStateNormalized;
  return out;
}

LiouvilleMatrix liouville_of_unitary(const CMat& U) {
  if (!is_unitary(U)) {
    throw ValidationError("liouville_of_unitary: input is not unitary");
  }
  return {static_cast<int>(U.rows()), kron(U, U.conjugate())};
}

LiouvilleMatrix choi_to_liouville(const ChoiMatrix& J) {
  const int d = J.d;
  const CMat& M = J.as(ChoiNormalization::kStateNormalized).matrix;
  if (M.rows() != static_cast<Eigen::Index>(d) * d) {
    throw DimensionError("choi_to_liouville: inconsistent dimensions");
  }
  CMat L(M.rows(), M.cols());
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          L(d * k + l, d * i + j) = static_cast<double>(d) * M(d * k + i, d * l + j);
        }
      }
    }
  }
  return {d, L};
}

ChoiMatrix liouville_to_choi(const LiouvilleMatrix& L) {
  const int d = L.d;
  if (L.matrix.rows() != static_cast<Eigen::Index>(d) * d ||
      L.matrix.rows() != L.matrix.cols()) {
    throw DimensionError("liouville_to_choi: inconsistent dimensions");
  }
  CMat J(L.matrix.rows(), L.matrix.cols());
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int l = 0; l < d; ++l) {
        for (int j = 0; j < d; ++j) {
          J(d * k + i, d * l + j) = L.matrix(d * k + l, d * i + j) / static_cast<double>(d);
        }
      }
    }
  }
  return {d, J, ChoiNormalization::kStateNormalized};
}

double trace_pairing(const ChoiMatrix& F, const ChoiMatrix& K) {
  if (F.d != K.d) throw DimensionError("trace_pairing: dimension mismatch");
  const CMat& A = F.as(ChoiNormalization::kStateNormalized).matrix;
  const CMat& B = K.as(ChoiNormalization::kStateNormalized).matrix;
  return (A * B).trace().real();
}

double trace_pairing_liouville(const LiouvilleMatrix& F,
                               const LiouvilleMatrix& K) {
  if (F.d != K.d) {
    throw DimensionError("trace_pairing_liouville: dimension mismatch");
  }
  const double d2 = static_cast<double>(F.d) * F.d;
  return (F.matrix * K.matrix.adjoint()).trace().real() / d2;
}

}  // namespace uniphase
