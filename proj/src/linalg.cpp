#include "uniphase/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uniphase {

const Tolerances& Tolerances::defaults() {
  static const Tolerances t{};
  return t;
}

void check_finite(const CMat& M, const char* what) {
  if (!M.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entries");
  }
}

bool is_hermitian(const CMat& M, double tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(1.0, M.norm());
  return (M - M.adjoint()).norm() <= tol * scale;
}

bool is_unitary(const CMat& M, double tol) {
  if (M.rows() != M.cols()) return false;
  const CMat gram = M.adjoint() * M;
  return (gram - CMat::Identity(M.rows(), M.cols())).norm() <= tol;
}

CMat make_hermitian(const CMat& M, double tol) {
  if (M.rows() != M.cols()) {
    throw DimensionError("make_hermitian: matrix must be square");
  }
  check_finite(M, "make_hermitian");
  const double scale = std::max(1.0, M.norm());
  if ((M - M.adjoint()).norm() > tol * scale) {
    throw ValidationError("make_hermitian: skew part exceeds tolerance");
  }
  return 0.5 * (M + M.adjoint());
}

CVec vec(const CMat& M) {
  if (M.rows() != M.cols()) {
    throw DimensionError("vec: matrix must be square");
  }
  const Eigen::Index d = M.rows();
  CVec v(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index i = 0; i < d; ++i) v(d * a + i) = M(a, i);
  }
  return v;
}

CMat unvec(const CVec& v) {
  const auto n = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) {
    throw DimensionError("unvec: length is not a perfect square");
  }
  CMat M(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index i = 0; i < n; ++i) M(a, i) = v(n * a + i);
  }
  return M;
}

namespace {

Eigen::Index side_of(const CMat& G, const char* what) {
  if (G.rows() != G.cols()) {
    throw DimensionError(std::string(what) + ": matrix must be square");
  }
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(G.rows()))));
  if (d * d != G.rows()) {
    throw DimensionError(std::string(what) + ": dimension is not a square");
  }
  return d;
}

}  // namespace

CMat partial_trace_1(const CMat& G) {
  const Eigen::Index d = side_of(G, "partial_trace_1");
  CMat out = CMat::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Complex s = 0.0;
      for (Eigen::Index a = 0; a < d; ++a) s += G(d * a + i, d * a + j);
      out(i, j) = s;
    }
  }
  return out;
}

CMat partial_trace_2(const CMat& G) {
  const Eigen::Index d = side_of(G, "partial_trace_2");
  CMat out = CMat::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      Complex s = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) s += G(d * a + i, d * b + i);
      out(a, b) = s;
    }
  }
  return out;
}

namespace {

CVec canonical_phase_vec(const CVec& v, double tol) {
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return v;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > tol * top) {
      return v * (std::abs(v(k)) / v(k));
    }
  }
  return v;
}

// Lexicographic comparison on real parts, used only to break eigenvalue ties.
bool lex_less(const CVec& a, const CVec& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double ra = a(k).real(), rb = b(k).real();
    if (ra != rb) return ra < rb;
  }
  return false;
}

}  // namespace

EighResult eigh(const CMat& M) {
  const CMat H = make_hermitian(M, 1e-10);
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigh: eigensolver failed to converge");
  }
  const Eigen::Index n = H.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Eigen returns ascending order; reverse for descending.
  std::reverse(order.begin(), order.end());

  EighResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = es.eigenvalues()(order[k]);
    out.eigenvectors.col(k) =
        canonical_phase_vec(es.eigenvectors().col(order[k]), 1e-12);
  }

  // Deterministic tie-break among (near-)equal eigenvalues.
  const double tie = 1e-12 * std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n &&
           std::abs(out.eigenvalues(end) - out.eigenvalues(start)) <= tie) {
      ++end;
    }
    if (end - start > 1) {
      std::vector<Eigen::Index> idx(end - start);
      std::iota(idx.begin(), idx.end(), start);
      std::stable_sort(idx.begin(), idx.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return lex_less(out.eigenvectors.col(a),
                                         out.eigenvectors.col(b));
                       });
      CMat block(n, end - start);
      RVec vals(end - start);
      for (Eigen::Index k = 0; k < end - start; ++k) {
        block.col(k) = out.eigenvectors.col(idx[k]);
        vals(k) = out.eigenvalues(idx[k]);
      }
      out.eigenvectors.middleCols(start, end - start) = block;
      out.eigenvalues.segment(start, end - start) = vals;
    }
    start = end;
  }
  return out;
}

CMat polar_unitary(const CMat& M) {
  if (M.rows() != M.cols()) {
    throw DimensionError("polar_unitary: matrix must be square");
  }
  check_finite(M, "polar_unitary");
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= Tolerances::defaults().singular * M.norm()) {
    throw ValidationError("polar_unitary: matrix is (numerically) singular");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMat kron(const CMat& A, const CMat& B) {
  CMat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return out;
}

CMat perm_operator(const std::vector<int>& sigma, int d) {
  const int t = static_cast<int>(sigma.size());
  if (t < 1 || d < 1) {
    throw DimensionError("perm_operator: need t >= 1 and d >= 1");
  }
  std::vector<bool> seen(t, false);
  for (int s : sigma) {
    if (s < 0 || s >= t || seen[s]) {
      throw ValidationError("perm_operator: sigma is not a permutation");
    }
    seen[s] = true;
  }
  Eigen::Index dim = 1;
  for (int k = 0; k < t; ++k) dim *= d;
  CMat P = CMat::Zero(dim, dim);
  std::vector<int> r(t, 0);
  for (Eigen::Index row = 0; row < dim; ++row) {
    // decode row-major digits, register 0 most significant
    Eigen::Index x = row;
    for (int k = t - 1; k >= 0; --k) {
      r[k] = static_cast<int>(x % d);
      x /= d;
    }
    Eigen::Index col = 0;
    for (int k = 0; k < t; ++k) col = col * d + r[sigma[k]];
    P(row, col) = 1.0;
  }
  return P;
}

CMat canonical_phase(const CMat& M) {
  const double top = M.cwiseAbs().maxCoeff();
  if (top == 0.0) return M;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (std::abs(M(i, j)) > 1e-12 * top) {
        return M * (std::abs(M(i, j)) / M(i, j));
      }
    }
  }
  return M;
}

CVec canonical_phase(const CVec& v) { return canonical_phase_vec(v, 1e-12); }

}  // namespace uniphase
