#include "uniphase/measurement.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace uniphase {

MeasurementEnsembleInstance MeasurementEnsembleInstance::sample(
    const EnsembleSpec& spec, int m, Rng& rng) {
  if (m < 1) throw ValidationError("measurement ensemble: m must be >= 1");
  MeasurementEnsembleInstance out;
  out.source = spec;
  out.d = spec.dimension();
  out.mode = spec.is_vector_kind() ? Mode::kVector : Mode::kUnitaryMatrix;
  out.m = 0;
  out.extend(m, rng);
  return out;
}

void MeasurementEnsembleInstance::extend(int new_m, Rng& rng) {
  if (new_m < m) {
    throw ValidationError("measurement ensemble: cannot shrink a draw");
  }
  for (int i = m; i < new_m; ++i) {
    switch (source.kind) {
      case EnsembleSpec::Kind::kHaarUnitary:
        unitaries.push_back(sample_haar_unitary(d, rng));
        break;
      case EnsembleSpec::Kind::kClifford:
        unitaries.push_back(sample_clifford(source.qubits, rng));
        break;
      case EnsembleSpec::Kind::kPauli: {
        const auto paulis = enumerate_paulis(source.qubits);
        unitaries.push_back(paulis[rng.uniform_index(paulis.size())]);
        break;
      }
      case EnsembleSpec::Kind::kStabilizerStates:
        vectors.push_back(sample_stabilizer_state(source.qubits, rng));
        break;
      case EnsembleSpec::Kind::kHaarSphere:
        vectors.push_back(sample_haar_sphere(d, rng));
        break;
      case EnsembleSpec::Kind::kExplicitList:
        throw ValidationError(
            "measurement ensemble: explicit-list specs carry no items");
    }
  }
  m = new_m;
}

double MeasurementEnsembleInstance::rescale_factor() const {
  return std::sqrt(static_cast<double>(d + 1) * d);
}

NoiseModel NoiseModel::gaussian(double sigma) {
  if (sigma < 0) throw ValidationError("gaussian noise: sigma must be >= 0");
  NoiseModel n;
  n.kind = Kind::kGaussian;
  n.sigma = sigma;
  return n;
}

NoiseModel NoiseModel::fixed_vector(RVec eps) {
  NoiseModel n;
  n.kind = Kind::kFixedVector;
  n.fixed = std::move(eps);
  return n;
}

RVec apply_A(const MeasurementEnsembleInstance& ens, const CMat& Gamma) {
  if (ens.mode != MeasurementEnsembleInstance::Mode::kUnitaryMatrix) {
    throw ValidationError("apply_A: matrix mode required");
  }
  const Eigen::Index d2 = static_cast<Eigen::Index>(ens.d) * ens.d;
  if (Gamma.rows() != d2 || Gamma.cols() != d2) {
    throw DimensionError("apply_A: Gamma must be d^2 x d^2");
  }
  RVec out(ens.m);
  for (int i = 0; i < ens.m; ++i) {
    const CVec c = vec(ens.unitaries[i]);
    out(i) = static_cast<double>(ens.d) * (c.dot(Gamma * c)).real();
  }
  return out;
}

CMat apply_A_adjoint(const MeasurementEnsembleInstance& ens, const RVec& z) {
  if (z.size() != ens.m) throw DimensionError("apply_A_adjoint: bad z length");
  const Eigen::Index d2 = static_cast<Eigen::Index>(ens.d) * ens.d;
  CMat out = CMat::Zero(d2, d2);
  for (int i = 0; i < ens.m; ++i) {
    const CVec c = vec(ens.unitaries[i]);
    out += (static_cast<double>(ens.d) * z(i)) * (c * c.adjoint());
  }
  return out;
}

RVec apply_A_vector_mode(const MeasurementEnsembleInstance& ens,
                         const CMat& Z) {
  if (ens.mode != MeasurementEnsembleInstance::Mode::kVector) {
    throw ValidationError("apply_A_vector_mode: vector mode required");
  }
  if (Z.rows() != ens.d || Z.cols() != ens.d) {
    throw DimensionError("apply_A_vector_mode: Z must be d x d");
  }
  const double scale = ens.rescale_factor();
  RVec out(ens.m);
  for (int i = 0; i < ens.m; ++i) {
    out(i) = scale * (ens.vectors[i].dot(Z * ens.vectors[i])).real();
  }
  return out;
}

CMat apply_A_adjoint_vector_mode(const MeasurementEnsembleInstance& ens,
                                 const RVec& z) {
  if (z.size() != ens.m) {
    throw DimensionError("apply_A_adjoint_vector_mode: bad z length");
  }
  const double scale = ens.rescale_factor();
  CMat out = CMat::Zero(ens.d, ens.d);
  for (int i = 0; i < ens.m; ++i) {
    out += (scale * z(i)) * (ens.vectors[i] * ens.vectors[i].adjoint());
  }
  return out;
}

double bell_protocol_probability(const CMat& C, const CMat& U) {
  if (C.rows() != U.rows() || C.cols() != U.cols()) {
    throw DimensionError("bell_protocol_probability: dimension mismatch");
  }
  const double d = static_cast<double>(U.rows());
  const double tr = std::abs((C.adjoint() * U).trace());
  const double p = (tr * tr) / (d * d);
  return std::min(1.0, std::max(0.0, p));
}

namespace {

long sample_binomial(long n, double p, Rng& rng) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (n <= 10000) {
    long k = 0;
    for (long i = 0; i < n; ++i) {
      if (rng.uniform() < p) ++k;
    }
    return k;
  }
  // Normal approximation for large shot counts; adequate for the shot
  // regimes this simulator targets (>= 1e4).
  const double mu = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  const double x = std::round(mu + sd * rng.gaussian());
  return static_cast<long>(std::min(static_cast<double>(n), std::max(0.0, x)));
}

RVec noiseless_data(const MeasurementEnsembleInstance& ens, const CMat& signal) {
  if (ens.mode == MeasurementEnsembleInstance::Mode::kUnitaryMatrix) {
    if (!is_unitary(signal)) {
      throw ValidationError("measure: matrix-mode signal must be unitary");
    }
    const CVec v = vec(signal);
    return apply_A(ens, CMat(v * v.adjoint()));
  }
  return apply_A_vector_mode(ens, make_hermitian(signal, 1e-10));
}

}  // namespace

MeasurementRecord measure(const MeasurementEnsembleInstance& ens,
                          const CMat& signal, const NoiseModel& noise,
                          std::optional<long> shots, std::uint64_t seed) {
  MeasurementRecord rec;
  rec.noise = noise;
  rec.shots = shots;
  rec.seed = seed;
  Rng rng(seed);

  RVec y = noiseless_data(ens, signal);

  if (shots) {
    if (*shots < 1) throw ValidationError("measure: shots must be >= 1");
    if (ens.mode != MeasurementEnsembleInstance::Mode::kUnitaryMatrix) {
      throw ValidationError("measure: shot noise is matrix-mode only");
    }
    const double d = ens.d;
    const double scale = d * d * d;  // y_i = d^3 p_i
    double var_sum = 0.0;
    for (int i = 0; i < ens.m; ++i) {
      const double p = std::min(1.0, y(i) / scale);
      const double p_hat =
          static_cast<double>(sample_binomial(*shots, p, rng)) /
          static_cast<double>(*shots);
      y(i) = scale * p_hat;
      // Variance estimate with a pseudocount floor so p_hat in {0,1} does
      // not zero out the contribution.
      const double s = static_cast<double>(*shots);
      const double pv = (p_hat * s + 1.0) / (s + 2.0);
      var_sum += scale * scale * pv * (1.0 - pv) / s;
    }
    rec.y = y;
    rec.eta = 2.33 * std::sqrt(var_sum);  // ~99th percentile, normal approx
    return rec;
  }

  switch (noise.kind) {
    case NoiseModel::Kind::kNone:
      rec.y = y;
      rec.eta = 0.0;
      break;
    case NoiseModel::Kind::kGaussian: {
      if (noise.sigma < 0) throw ValidationError("measure: sigma < 0");
      for (int i = 0; i < ens.m; ++i) y(i) += noise.sigma * rng.gaussian();
      rec.y = y;
      // 99% upper bound on ||eps||_2 for i.i.d. Gaussian noise.
      const double m = ens.m;
      rec.eta =
          noise.sigma * std::sqrt(m + 2.0 * std::sqrt(m * std::log(100.0)));
      break;
    }
    case NoiseModel::Kind::kFixedVector: {
      if (noise.fixed.size() != ens.m) {
        throw DimensionError("measure: fixed noise vector has wrong length");
      }
      rec.y = y + noise.fixed;
      rec.eta = noise.fixed.norm();
      break;
    }
  }
  return rec;
}

std::string MeasurementRecord::to_json() const {
  nlohmann::json j;
  j["y"] = std::vector<double>(y.data(), y.data() + y.size());
  j["eta"] = eta;
  switch (noise.kind) {
    case NoiseModel::Kind::kNone:
      j["noise_model"] = "none";
      break;
    case NoiseModel::Kind::kGaussian:
      j["noise_model"] = "gaussian";
      j["sigma"] = noise.sigma;
      break;
    case NoiseModel::Kind::kFixedVector:
      j["noise_model"] = "fixed-vector";
      break;
  }
  if (shots) j["shots"] = *shots;
  j["seed"] = seed;
  return j.dump();
}

double nonspikiness_bound(double t, double ln_set_size) {
  return 4.5 * M_PI * M_PI * M_PI * (t + ln_set_size);
}

double nonspikiness_bound_vector(double t, double ln_set_size, int rank) {
  return 9.0 * M_PI * M_PI * M_PI *
         (t + ln_set_size + std::log(static_cast<double>(rank)));
}

NonSpikinessReport nonspikiness_scan(const std::vector<CMat>& ops,
                                     const CMat& U, double t,
                                     std::optional<double> ln_group_size) {
  if (ops.empty()) throw ValidationError("nonspikiness_scan: empty list");
  const double lnM =
      ln_group_size.value_or(std::log(static_cast<double>(ops.size())));
  NonSpikinessReport rep;
  rep.t = t;
  rep.set_size = ops.size();
  rep.beta_bound = nonspikiness_bound(t, lnM);
  rep.predicted_failure_rate = 4.0 * std::exp(-t);
  std::size_t within = 0;
  for (const CMat& C : ops) {
    const double v = std::norm((C.adjoint() * U).trace());
    rep.beta_observed = std::max(rep.beta_observed, v);
    if (v <= rep.beta_bound) ++within;
  }
  rep.fraction_within =
      static_cast<double>(within) / static_cast<double>(ops.size());
  return rep;
}

std::string NonSpikinessReport::to_json() const {
  nlohmann::json j;
  j["beta_observed"] = beta_observed;
  j["beta_bound"] = beta_bound;
  j["fraction_within"] = fraction_within;
  j["t"] = t;
  j["set_size"] = set_size;
  j["predicted_failure_rate"] = predicted_failure_rate;
  return j.dump();
}

}  // namespace uniphase
