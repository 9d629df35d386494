#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uniphase/ensembles.hpp"
#include "uniphase/linalg.hpp"
#include "uniphase/rng.hpp"

namespace uniphase {

// A concrete draw of m measurement operators. Matrix mode carries unitaries
// C_i acting on the lifted d^2 x d^2 variable; vector mode carries unit
// vectors w_i (rescaled internally to a_i = ((d+1)d)^{1/4} w_i).
struct MeasurementEnsembleInstance {
  enum class Mode { kUnitaryMatrix, kVector };

  Mode mode = Mode::kUnitaryMatrix;
  std::vector<CMat> unitaries;
  std::vector<CVec> vectors;  // unit norm w_i
  int d = 0;
  int m = 0;
  EnsembleSpec source;

  static MeasurementEnsembleInstance sample(const EnsembleSpec& spec, int m,
                                            Rng& rng);
  // Extend an existing draw with further samples from the same stream.
  void extend(int new_m, Rng& rng);

  double rescale_factor() const;  // sqrt((d+1)d), vector mode
};

struct NoiseModel {
  enum class Kind { kNone, kGaussian, kFixedVector };
  Kind kind = Kind::kNone;
  double sigma = 0.0;
  RVec fixed;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma);
  static NoiseModel fixed_vector(RVec eps);
};

struct MeasurementRecord {
  RVec y;
  double eta = 0.0;
  NoiseModel noise;
  std::optional<long> shots;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

// A(Gamma)_i = d vec(C_i)^dag Gamma vec(C_i); matrix mode.
RVec apply_A(const MeasurementEnsembleInstance& ens, const CMat& Gamma);

// A^*(z) = sum_i z_i d vec(C_i) vec(C_i)^dag.
CMat apply_A_adjoint(const MeasurementEnsembleInstance& ens, const RVec& z);

// Vector mode: component i = a_i^dag Z a_i = sqrt((d+1)d) w_i^dag Z w_i.
RVec apply_A_vector_mode(const MeasurementEnsembleInstance& ens, const CMat& Z);
CMat apply_A_adjoint_vector_mode(const MeasurementEnsembleInstance& ens,
                                 const RVec& z);

// Bell-protocol success probability |Tr(C^dag U)|^2 / d^2.
double bell_protocol_probability(const CMat& C, const CMat& U);

// Noisy data generation. Matrix mode: signal is the unitary U; vector mode:
// signal is the Hermitian X. With shots set, each entry is a binomial
// estimate of the Bell probability, rescaled to the measurement convention.
MeasurementRecord measure(const MeasurementEnsembleInstance& ens,
                          const CMat& signal, const NoiseModel& noise,
                          std::optional<long> shots, std::uint64_t seed);

struct NonSpikinessReport {
  double beta_observed = 0.0;  // max |Tr(C^dag U)|^2 over the scanned set
  double beta_bound = 0.0;
  double fraction_within = 0.0;
  double t = 0.0;
  std::size_t set_size = 0;
  double predicted_failure_rate = 0.0;  // 4 e^{-t}

  std::string to_json() const;
};

// beta = (9 pi^3 / 2)(t + ln M) for matrix signals.
double nonspikiness_bound(double t, double ln_set_size);
// beta = 9 pi^3 (t + ln M + ln r) for rank-r vector-mode signals.
double nonspikiness_bound_vector(double t, double ln_set_size, int rank);

// Scan an explicit list of measurement unitaries against a signal U.
// ln_group_size defaults to ln(list size); pass the full group's log-size
// when the list is a sample from a larger group.
NonSpikinessReport nonspikiness_scan(const std::vector<CMat>& ops,
                                     const CMat& U, double t,
                                     std::optional<double> ln_group_size = {});

}  // namespace uniphase
