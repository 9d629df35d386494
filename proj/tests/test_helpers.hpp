#pragma once

#include "uniphase/ensembles.hpp"
#include "uniphase/linalg.hpp"
#include "uniphase/rng.hpp"

namespace uniphase::testing {

inline CMat random_complex(int rows, int cols, Rng& rng) {
  CMat M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) M(i, j) = rng.complex_gaussian();
  }
  return M;
}

inline CMat random_hermitian(int n, Rng& rng) {
  const CMat M = random_complex(n, n, rng);
  return 0.5 * (M + M.adjoint());
}

inline CMat ideal_lift(const CMat& U) {
  const CVec v = vec(U);
  return v * v.adjoint();
}

inline CMat pauli_x() { return (CMat(2, 2) << 0, 1, 1, 0).finished(); }
inline CMat pauli_z() { return (CMat(2, 2) << 1, 0, 0, -1).finished(); }

}  // namespace uniphase::testing
