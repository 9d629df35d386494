#include "uniphase/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>

namespace uniphase {

int EnsembleSpec::dimension() const {
  switch (kind) {
    case Kind::kHaarUnitary:
    case Kind::kHaarSphere:
    case Kind::kExplicitList:
      return dim;
    case Kind::kClifford:
    case Kind::kPauli:
    case Kind::kStabilizerStates:
      return 1 << qubits;
  }
  return 0;
}

std::string ensemble_kind_name(EnsembleSpec::Kind kind) {
  switch (kind) {
    case EnsembleSpec::Kind::kHaarUnitary: return "haar-unitary";
    case EnsembleSpec::Kind::kClifford: return "clifford";
    case EnsembleSpec::Kind::kPauli: return "pauli";
    case EnsembleSpec::Kind::kStabilizerStates: return "stabilizer-states";
    case EnsembleSpec::Kind::kExplicitList: return "explicit-list";
    case EnsembleSpec::Kind::kHaarSphere: return "haar-sphere";
  }
  throw ValidationError("unknown ensemble kind");
}

EnsembleSpec::Kind ensemble_kind_from_name(const std::string& name) {
  if (name == "haar-unitary") return EnsembleSpec::Kind::kHaarUnitary;
  if (name == "clifford") return EnsembleSpec::Kind::kClifford;
  if (name == "pauli") return EnsembleSpec::Kind::kPauli;
  if (name == "stabilizer-states") return EnsembleSpec::Kind::kStabilizerStates;
  if (name == "explicit-list") return EnsembleSpec::Kind::kExplicitList;
  if (name == "haar-sphere") return EnsembleSpec::Kind::kHaarSphere;
  throw ValidationError("unknown ensemble kind: " + name);
}

std::string EnsembleSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = ensemble_kind_name(kind);
  if (kind == Kind::kClifford || kind == Kind::kPauli ||
      kind == Kind::kStabilizerStates) {
    j["n"] = qubits;
  } else {
    j["d"] = dim;
  }
  j["seed"] = seed;
  return j.dump();
}

EnsembleSpec EnsembleSpec::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  EnsembleSpec spec;
  spec.kind = ensemble_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("n")) spec.qubits = j["n"].get<int>();
  if (j.contains("d")) spec.dim = j["d"].get<int>();
  spec.seed = j.value("seed", std::uint64_t{0});
  if ((spec.kind == Kind::kClifford || spec.kind == Kind::kPauli ||
       spec.kind == Kind::kStabilizerStates) &&
      spec.qubits < 1) {
    throw ValidationError("ensemble spec: qubit kinds need n >= 1");
  }
  return spec;
}

CMat sample_haar_unitary(int d, Rng& rng) {
  if (d < 1) throw DimensionError("sample_haar_unitary: d must be positive");
  CMat G(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) G(i, j) = rng.complex_gaussian();
  }
  Eigen::HouseholderQR<CMat> qr(G);
  CMat Q = qr.householderQ();
  const CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  // Rephase columns by the diagonal of R; without this the factorization
  // is not Haar-distributed.
  for (int j = 0; j < d; ++j) {
    const Complex r = R(j, j);
    Q.col(j) *= (r == Complex(0.0)) ? Complex(1.0) : r / std::abs(r);
  }
  return Q;
}

CVec sample_haar_sphere(int d, Rng& rng) {
  if (d < 1) throw DimensionError("sample_haar_sphere: d must be positive");
  CVec v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.complex_gaussian();
  return v / v.norm();
}

// ---------------------------------------------------------------------------
// Clifford sampling via the symplectic group over GF(2).
//
// A Pauli is encoded as a 2n-bit word: bits 0..n-1 the X part, n..2n-1 the
// Z part. The Hermitian representative is W(a,b) = i^{a.b} X^a Z^b per
// qubit, so W^2 = I for every encoding.
// ---------------------------------------------------------------------------

namespace {

using GF2Vec = std::uint32_t;

int symplectic_inner(GF2Vec u, GF2Vec v, int n) {
  const GF2Vec ux = u & ((1u << n) - 1), uz = u >> n;
  const GF2Vec vx = v & ((1u << n) - 1), vz = v >> n;
  return __builtin_popcount((ux & vz) ^ (uz & vx)) & 1;
}

GF2Vec random_combination(const std::vector<GF2Vec>& basis, Rng& rng) {
  GF2Vec v = 0;
  for (GF2Vec b : basis) {
    if (rng.next_u64() & 1u) v ^= b;
  }
  return v;
}

// Reduce to an independent set (row echelon over GF(2)).
std::vector<GF2Vec> independent_subset(std::vector<GF2Vec> vecs) {
  std::vector<GF2Vec> pivots;
  std::vector<GF2Vec> out;
  for (GF2Vec v : vecs) {
    GF2Vec w = v;
    for (GF2Vec p : pivots) {
      const GF2Vec high = GF2Vec(1) << (31 - __builtin_clz(p));
      if (w & high) w ^= p;
    }
    if (w != 0) {
      pivots.push_back(w);
      out.push_back(v);
    }
  }
  return out;
}

// Uniform symplectic basis of the subspace spanned by `basis` (which must be
// symplectic, i.e. the form restricted to it is nondegenerate).
void sample_symplectic_pairs(std::vector<GF2Vec> basis, int n, Rng& rng,
                             std::vector<std::pair<GF2Vec, GF2Vec>>& out) {
  if (basis.empty()) return;
  GF2Vec a = 0;
  do {
    a = random_combination(basis, rng);
  } while (a == 0);
  GF2Vec b = 0;
  do {
    b = random_combination(basis, rng);
  } while (symplectic_inner(a, b, n) != 1);
  out.emplace_back(a, b);

  std::vector<GF2Vec> projected;
  projected.reserve(basis.size());
  for (GF2Vec v : basis) {
    GF2Vec w = v;
    if (symplectic_inner(w, b, n)) w ^= a;
    if (symplectic_inner(w, a, n)) w ^= b;
    if (w != 0) projected.push_back(w);
  }
  sample_symplectic_pairs(independent_subset(projected), n, rng, out);
}

// Dense matrix of the Hermitian Pauli W(a,b), optionally negated.
CMat pauli_matrix(GF2Vec v, int n, bool negate) {
  static const CMat X = (CMat(2, 2) << 0, 1, 1, 0).finished();
  static const CMat Z = (CMat(2, 2) << 1, 0, 0, -1).finished();
  static const CMat Y =
      (CMat(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  CMat out = CMat::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const bool x = (v >> q) & 1u;
    const bool z = (v >> (n + q)) & 1u;
    const CMat& f = x ? (z ? Y : X) : (z ? Z : CMat::Identity(2, 2));
    out = kron(out, f);
  }
  if (negate) out = -out;
  return out;
}

}  // namespace

std::vector<CMat> enumerate_paulis(int n) {
  if (n < 1 || n > 4) throw ResourceError("enumerate_paulis: n out of range");
  std::vector<CMat> out;
  out.reserve(std::size_t(1) << (2 * n));
  for (GF2Vec v = 0; v < (GF2Vec(1) << (2 * n)); ++v) {
    out.push_back(pauli_matrix(v, n, false));
  }
  return out;
}

CMat sample_clifford(int n, Rng& rng) {
  if (n < 1) throw DimensionError("sample_clifford: n must be positive");
  if (n > 6) throw ResourceError("sample_clifford: n too large for dense synthesis");
  const int d = 1 << n;

  std::vector<GF2Vec> basis;
  for (int k = 0; k < 2 * n; ++k) basis.push_back(GF2Vec(1) << k);
  std::vector<std::pair<GF2Vec, GF2Vec>> pairs;
  sample_symplectic_pairs(basis, n, rng, pairs);

  std::vector<CMat> P(n), Q(n);
  for (int j = 0; j < n; ++j) {
    P[j] = pauli_matrix(pairs[j].first, n, rng.next_u64() & 1u);
    Q[j] = pauli_matrix(pairs[j].second, n, rng.next_u64() & 1u);
  }

  // State stabilized by the Q_j: project with prod_j (I + Q_j)/2.
  CMat proj = CMat::Identity(d, d);
  for (int j = 0; j < n; ++j) proj = 0.5 * (proj + Q[j] * proj);
  int best = 0;
  double best_norm = -1.0;
  for (int k = 0; k < d; ++k) {
    const double nk = proj.col(k).norm();
    if (nk > best_norm + 1e-12) {
      best_norm = nk;
      best = k;
    }
  }
  CVec psi0 = canonical_phase(CVec(proj.col(best) / best_norm));

  // Column k of C is prod_j P_j^{k_j} |psi0>, qubit 0 most significant.
  CMat C(d, d);
  for (int k = 0; k < d; ++k) {
    CVec col = psi0;
    for (int j = 0; j < n; ++j) {
      if ((k >> (n - 1 - j)) & 1) col = P[j] * col;
    }
    C.col(k) = col;
  }
  return canonical_phase(C);
}

CVec sample_stabilizer_state(int n, Rng& rng) {
  if (n < 1) throw DimensionError("sample_stabilizer_state: n must be positive");
  const CMat C = sample_clifford(n, rng);
  return canonical_phase(CVec(C.col(0)));
}

std::vector<CMat> enumerate_single_qubit_cliffords() {
  const CMat H = (CMat(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  const CMat S = (CMat(2, 2) << 1, 0, 0, Complex(0, 1)).finished();

  const auto key_of = [](const CMat& M) {
    std::array<long long, 8> key{};
    int idx = 0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        key[idx++] = std::llround(M(i, j).real() * 1e6);
        key[idx++] = std::llround(M(i, j).imag() * 1e6);
      }
    }
    return key;
  };

  std::map<std::array<long long, 8>, CMat> seen;
  std::vector<CMat> frontier{canonical_phase(CMat(CMat::Identity(2, 2)))};
  seen[key_of(frontier[0])] = frontier[0];
  std::vector<CMat> order{frontier[0]};
  while (!frontier.empty()) {
    std::vector<CMat> next;
    for (const CMat& g : frontier) {
      for (const CMat* gen : {&H, &S}) {
        const CMat M = canonical_phase(CMat(*gen * g));
        const auto k = key_of(M);
        if (!seen.count(k)) {
          seen[k] = M;
          order.push_back(M);
          next.push_back(M);
        }
      }
    }
    frontier = std::move(next);
  }
  return order;
}

std::vector<CVec> enumerate_single_qubit_stabilizer_states() {
  const double s = M_SQRT1_2;
  std::vector<CVec> out;
  const auto push = [&](Complex a, Complex b) {
    CVec v(2);
    v << a, b;
    out.push_back(canonical_phase(v));
  };
  push(1, 0);
  push(0, 1);
  push(s, s);
  push(s, -s);
  push(s, Complex(0, s));
  push(s, Complex(0, -s));
  return out;
}

// ---------------------------------------------------------------------------
// Moment operators
// ---------------------------------------------------------------------------

namespace {

Eigen::Index ipow(int d, int t) {
  Eigen::Index out = 1;
  for (int k = 0; k < t; ++k) out *= d;
  return out;
}

void check_moment_budget(int d, int t, bool vector_kind) {
  const Eigen::Index dim = vector_kind ? ipow(d, t) : ipow(d, 2 * t);
  if (dim > kMomentDimBudget) {
    throw ResourceError("moment operator dimension exceeds budget");
  }
}

CMat kron_power(const CMat& M, int t) {
  CMat out = CMat::Identity(1, 1);
  for (int k = 0; k < t; ++k) out = kron(out, M);
  return out;
}

CMat unitary_moment_term(const CMat& V, int t) {
  return kron(kron_power(V, t), kron_power(V.adjoint(), t));
}

CMat vector_moment_term(const CVec& w, int t) {
  return kron_power(CMat(w * w.adjoint()), t);
}

template <typename Item, typename Term>
MomentOperator sampled_moment(int d, int t, long num_samples,
                              const std::function<Item(Rng&)>& sampler,
                              Rng& rng, Term term, Eigen::Index dim) {
  if (num_samples < 2) {
    throw ValidationError("moment_operator: need at least 2 samples");
  }
  CMat mean = CMat::Zero(dim, dim);
  RMat sq = RMat::Zero(dim, dim);
  for (long s = 0; s < num_samples; ++s) {
    const CMat m = term(sampler(rng), t);
    mean += m;
    sq += m.cwiseAbs2();
  }
  mean /= static_cast<double>(num_samples);
  sq /= static_cast<double>(num_samples);
  MomentOperator out;
  out.t = t;
  out.d = d;
  out.matrix = mean;
  out.exact = false;
  out.samples = num_samples;
  out.standard_error =
      ((sq - mean.cwiseAbs2()).cwiseMax(0.0) / static_cast<double>(num_samples))
          .cwiseSqrt();
  return out;
}

}  // namespace

MomentOperator moment_operator_exact(const std::vector<CMat>& unitaries, int t) {
  if (unitaries.empty()) {
    throw ValidationError("moment_operator_exact: empty list");
  }
  const int d = static_cast<int>(unitaries.front().rows());
  check_moment_budget(d, t, false);
  const Eigen::Index dim = ipow(d, 2 * t);
  CMat acc = CMat::Zero(dim, dim);
  for (const CMat& V : unitaries) acc += unitary_moment_term(V, t);
  MomentOperator out;
  out.t = t;
  out.d = d;
  out.matrix = acc / static_cast<double>(unitaries.size());
  out.exact = true;
  out.samples = static_cast<long>(unitaries.size());
  out.standard_error = RMat::Zero(dim, dim);
  return out;
}

MomentOperator moment_operator_sampled(int d, int t, long num_samples,
                                       const std::function<CMat(Rng&)>& sampler,
                                       Rng& rng) {
  check_moment_budget(d, t, false);
  return sampled_moment<CMat>(d, t, num_samples, sampler, rng,
                              unitary_moment_term, ipow(d, 2 * t));
}

MomentOperator moment_operator_vectors_exact(const std::vector<CVec>& vectors,
                                             int t) {
  if (vectors.empty()) {
    throw ValidationError("moment_operator_vectors_exact: empty list");
  }
  const int d = static_cast<int>(vectors.front().size());
  check_moment_budget(d, t, true);
  const Eigen::Index dim = ipow(d, t);
  CMat acc = CMat::Zero(dim, dim);
  for (const CVec& w : vectors) acc += vector_moment_term(w, t);
  MomentOperator out;
  out.t = t;
  out.d = d;
  out.matrix = acc / static_cast<double>(vectors.size());
  out.exact = true;
  out.samples = static_cast<long>(vectors.size());
  out.standard_error = RMat::Zero(dim, dim);
  return out;
}

MomentOperator moment_operator_vectors_sampled(
    int d, int t, long num_samples, const std::function<CVec(Rng&)>& sampler,
    Rng& rng) {
  check_moment_budget(d, t, true);
  return sampled_moment<CVec>(d, t, num_samples, sampler, rng,
                              vector_moment_term, ipow(d, t));
}

MomentOperator moment_operator(const EnsembleSpec& spec, int t,
                               long num_samples) {
  Rng rng(spec.seed);
  const int d = spec.dimension();
  switch (spec.kind) {
    case EnsembleSpec::Kind::kPauli:
      return moment_operator_exact(enumerate_paulis(spec.qubits), t);
    case EnsembleSpec::Kind::kClifford:
      if (spec.qubits == 1) {
        return moment_operator_exact(enumerate_single_qubit_cliffords(), t);
      }
      return moment_operator_sampled(
          d, t, num_samples,
          [n = spec.qubits](Rng& r) { return sample_clifford(n, r); }, rng);
    case EnsembleSpec::Kind::kStabilizerStates:
      if (spec.qubits == 1) {
        return moment_operator_vectors_exact(
            enumerate_single_qubit_stabilizer_states(), t);
      }
      return moment_operator_vectors_sampled(
          d, t, num_samples,
          [n = spec.qubits](Rng& r) { return sample_stabilizer_state(n, r); },
          rng);
    case EnsembleSpec::Kind::kHaarUnitary:
      return moment_operator_sampled(
          d, t, num_samples, [d](Rng& r) { return sample_haar_unitary(d, r); },
          rng);
    case EnsembleSpec::Kind::kHaarSphere:
      return moment_operator_vectors_sampled(
          d, t, num_samples, [d](Rng& r) { return sample_haar_sphere(d, r); },
          rng);
    case EnsembleSpec::Kind::kExplicitList:
      throw ValidationError(
          "moment_operator: explicit-list specs carry no items; use "
          "moment_operator_exact");
  }
  throw ValidationError("moment_operator: unknown kind");
}

MomentOperator weingarten_second_moment(int d) {
  if (d < 2) {
    throw ValidationError("weingarten_second_moment: singular at d < 2");
  }
  check_moment_budget(d, 2, false);
  const auto P = [d](std::initializer_list<int> sig) {
    std::vector<int> sigma;
    for (int s : sig) sigma.push_back(s - 1);
    return perm_operator(sigma, d);
  };
  const double dd = d;
  MomentOperator out;
  out.t = 2;
  out.d = d;
  out.matrix = (P({3, 4, 1, 2}) + P({4, 3, 2, 1})) / (dd * dd - 1.0) -
               (P({3, 4, 2, 1}) + P({4, 3, 1, 2})) / (dd * (dd * dd - 1.0));
  out.exact = true;
  out.samples = 0;
  out.standard_error = RMat::Zero(out.matrix.rows(), out.matrix.cols());
  return out;
}

MomentOperator haar_moment_unitary(int d, int t, long mc_samples, Rng* rng) {
  check_moment_budget(d, t, false);
  if (t == 1) {
    // E[U (x) U^dag] = SWAP / d
    MomentOperator out;
    out.t = 1;
    out.d = d;
    out.matrix = perm_operator({1, 0}, d) / static_cast<double>(d);
    out.exact = true;
    out.standard_error = RMat::Zero(out.matrix.rows(), out.matrix.cols());
    return out;
  }
  if (t == 2) return weingarten_second_moment(d);
  if (mc_samples <= 0 || rng == nullptr) {
    throw ValidationError("haar_moment_unitary: t > 2 needs Monte Carlo");
  }
  return moment_operator_sampled(
      d, t, mc_samples, [d](Rng& r) { return sample_haar_unitary(d, r); },
      *rng);
}

MomentOperator haar_moment_sphere(int d, int t, long mc_samples, Rng* rng) {
  check_moment_budget(d, t, true);
  if (t == 1) {
    MomentOperator out;
    out.t = 1;
    out.d = d;
    out.matrix = CMat::Identity(d, d) / static_cast<double>(d);
    out.exact = true;
    out.standard_error = RMat::Zero(d, d);
    return out;
  }
  if (t == 2) {
    // Projector onto the symmetric subspace, normalized: (I + SWAP)/(d(d+1)).
    MomentOperator out;
    out.t = 2;
    out.d = d;
    const Eigen::Index dim = static_cast<Eigen::Index>(d) * d;
    out.matrix = (CMat::Identity(dim, dim) + perm_operator({1, 0}, d)) /
                 (static_cast<double>(d) * (d + 1));
    out.exact = true;
    out.standard_error = RMat::Zero(dim, dim);
    return out;
  }
  if (mc_samples <= 0 || rng == nullptr) {
    throw ValidationError("haar_moment_sphere: t > 2 needs Monte Carlo");
  }
  return moment_operator_vectors_sampled(
      d, t, mc_samples, [d](Rng& r) { return sample_haar_sphere(d, r); }, *rng);
}

std::string DesignReport::to_json() const {
  nlohmann::json j;
  j["is_design"] = is_design;
  j["deviation"] = deviation;
  j["standard_error"] = standard_error;
  j["exact"] = exact;
  j["t"] = t;
  j["d"] = d;
  j["samples"] = samples;
  j["note"] = note;
  return j.dump();
}

DesignReport certify_design(const EnsembleSpec& spec, int t, double tolerance,
                            long num_samples) {
  const int d = spec.dimension();
  const MomentOperator ens = moment_operator(spec, t, num_samples);
  Rng haar_rng(mix_seed(spec.seed, {0x4841415258ULL}));
  const MomentOperator haar =
      spec.is_vector_kind()
          ? haar_moment_sphere(d, t, num_samples, &haar_rng)
          : haar_moment_unitary(d, t, num_samples, &haar_rng);

  DesignReport rep;
  rep.t = t;
  rep.d = d;
  rep.deviation = (ens.matrix - haar.matrix).norm();
  rep.exact = ens.exact && haar.exact;
  rep.samples = std::max(ens.samples, haar.samples);
  const double se2 =
      ens.standard_error.squaredNorm() + haar.standard_error.squaredNorm();
  rep.standard_error = std::sqrt(se2);
  if (rep.exact) {
    rep.is_design = rep.deviation < tolerance;
    rep.note = "exact enumeration on both sides";
  } else {
    rep.is_design = rep.deviation < 3.0 * rep.standard_error;
    rep.note =
        "Monte Carlo smoke test; 3-sigma aggregate threshold without "
        "multiple-comparison correction";
  }
  return rep;
}

double frame_potential(const std::vector<CMat>& unitaries, int t) {
  const auto N = unitaries.size();
  if (N == 0) throw ValidationError("frame_potential: empty list");
  double acc = 0.0;
  for (const CMat& A : unitaries) {
    for (const CMat& B : unitaries) {
      const double x = std::abs((A.adjoint() * B).trace());
      acc += std::pow(x * x, t);
    }
  }
  return acc / (static_cast<double>(N) * N);
}

}  // namespace uniphase
