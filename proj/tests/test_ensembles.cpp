#include <doctest.h>

#include <set>

#include "test_helpers.hpp"
#include "uniphase/ensembles.hpp"

using namespace uniphase;
using namespace uniphase::testing;

TEST_SUITE("ensembles") {

TEST_CASE("haar samples are unitary and deterministic per seed") {
  Rng a(42), b(42), c(43);
  const CMat U = sample_haar_unitary(5, a);
  CHECK(is_unitary(U));
  CHECK((U - sample_haar_unitary(5, b)).norm() == 0.0);
  CHECK((U - sample_haar_unitary(5, c)).norm() > 1e-3);
}

TEST_CASE("haar first moment matches SWAP/d") {
  // E[U (x) U^dag] = SWAP/d in the tensor-network ordering used here,
  // i.e. the t=1 moment operator E[U (x) conj(U)] has a closed form whose
  // entries follow from Schur orthogonality: E[U_{ai} conj(U_{bj})] =
  // delta_ab delta_ij / d.
  const int d = 3;
  Rng rng(44);
  const MomentOperator mc = moment_operator_sampled(
      d, 1, 20000, [d](Rng& r) { return sample_haar_unitary(d, r); }, rng);
  const MomentOperator exact = haar_moment_unitary(d, 1);
  CHECK(exact.exact);
  CHECK((mc.matrix - exact.matrix).norm() < 0.05);
  // Oracle: E[U_{ai} (U^dag)_{bj}] = E[U_{ai} conj(U_{jb})] =
  // delta_aj delta_ib / d (Schur orthogonality), i.e. SWAP/d.
  const CMat ref = perm_operator({1, 0}, d) / double(d);
  CHECK((exact.matrix - ref).norm() < 1e-14);
}

TEST_CASE("weingarten second moment matches the 24-clifford average") {
  const int d = 2;
  const MomentOperator wein = weingarten_second_moment(d);
  const MomentOperator cliff =
      moment_operator_exact(enumerate_single_qubit_cliffords(), 2);
  CHECK(wein.exact);
  CHECK(cliff.exact);
  CHECK((wein.matrix - cliff.matrix).norm() < 1e-12);
}

TEST_CASE("weingarten second moment matches a direct haar monte carlo") {
  const int d = 3;
  Rng rng(45);
  const MomentOperator mc = moment_operator_sampled(
      d, 2, 20000, [d](Rng& r) { return sample_haar_unitary(d, r); }, rng);
  const MomentOperator wein = weingarten_second_moment(d);
  // Aggregate deviation within 3x the aggregate standard error.
  const double dev = (mc.matrix - wein.matrix).norm();
  const double se = mc.standard_error.norm();
  CHECK(dev < 3.0 * se);
}

TEST_CASE("single-qubit clifford enumeration") {
  const auto cliffs = enumerate_single_qubit_cliffords();
  CHECK(cliffs.size() == 24);
  // Pairwise distinct modulo phase: |Tr(Ci^dag Cj)| < 2 off-diagonal.
  for (std::size_t i = 0; i < cliffs.size(); ++i) {
    CHECK(is_unitary(cliffs[i]));
    for (std::size_t j = i + 1; j < cliffs.size(); ++j) {
      CHECK(std::abs((cliffs[i].adjoint() * cliffs[j]).trace()) < 2.0 - 1e-9);
    }
  }
  // Frame potentials: the Clifford group is a 3-design but not a 4-design.
  // Haar values at d=2 are the commutant dimensions of U^(x)t: 2, 5, 14
  // (multiplicity sums over SU(2) spin sectors; t! only applies for t <= d).
  CHECK(frame_potential(cliffs, 2) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(frame_potential(cliffs, 3) == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(frame_potential(cliffs, 4) > 14.0 + 1e-6);
}

TEST_CASE("clifford sampler outputs clifford unitaries") {
  Rng rng(46);
  const auto paulis = enumerate_paulis(2);
  for (int trial = 0; trial < 10; ++trial) {
    const CMat C = sample_clifford(2, rng);
    CHECK(is_unitary(C));
    // Conjugation maps every Pauli to +/- another Pauli.
    for (const CMat& P : {paulis[1], paulis[4]}) {  // generators suffice
      const CMat Q = C * P * C.adjoint();
      bool matched = false;
      for (const CMat& R : paulis) {
        if ((Q - R).norm() < 1e-9 || (Q + R).norm() < 1e-9) {
          matched = true;
          break;
        }
      }
      CHECK(matched);
    }
  }
}

TEST_CASE("clifford sampler hits all 24 classes at n=1") {
  Rng rng(47);
  const auto cliffs = enumerate_single_qubit_cliffords();
  std::set<int> seen;
  for (int trial = 0; trial < 600; ++trial) {
    const CMat C = sample_clifford(1, rng);
    for (std::size_t k = 0; k < cliffs.size(); ++k) {
      if (std::abs(std::abs((cliffs[k].adjoint() * C).trace()) - 2.0) < 1e-9) {
        seen.insert(static_cast<int>(k));
        break;
      }
    }
  }
  CHECK(seen.size() == 24);
}

TEST_CASE("stabilizer state sampler and enumeration") {
  Rng rng(48);
  const CVec psi = sample_stabilizer_state(2, rng);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));

  const auto states = enumerate_single_qubit_stabilizer_states();
  CHECK(states.size() == 6);
  // The six states form three mutually unbiased bases.
  int orthogonal = 0, unbiased = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      const double ov = std::norm(states[i].dot(states[j]));
      if (ov < 1e-12) {
        ++orthogonal;
      } else {
        CHECK(ov == doctest::Approx(0.5).epsilon(1e-10));
        ++unbiased;
      }
    }
  }
  CHECK(orthogonal == 3);
  CHECK(unbiased == 12);

  // Single-qubit samples land on the 6-element orbit.
  Rng rng1(49);
  for (int trial = 0; trial < 20; ++trial) {
    const CVec s = sample_stabilizer_state(1, rng1);
    bool matched = false;
    for (const CVec& t : states) {
      if (std::abs(std::norm(s.dot(t)) - 1.0) < 1e-9) matched = true;
    }
    CHECK(matched);
  }
}

TEST_CASE("stabilizer states form a sphere 2-design") {
  const auto states = enumerate_single_qubit_stabilizer_states();
  const MomentOperator mo = moment_operator_vectors_exact(states, 2);
  const MomentOperator haar = haar_moment_sphere(2, 2);
  CHECK(haar.exact);
  CHECK((mo.matrix - haar.matrix).norm() < 1e-12);
  // Oracle: sphere t=2 moment is (I + SWAP)/(d(d+1)).
  const CMat ref = (CMat::Identity(4, 4) + perm_operator({1, 0}, 2)) / 6.0;
  CHECK((haar.matrix - ref).norm() < 1e-14);
}

TEST_CASE("pauli enumeration") {
  const auto p1 = enumerate_paulis(1);
  CHECK(p1.size() == 4);
  CHECK((p1[0] - CMat::Identity(2, 2)).norm() == 0.0);
  const auto p2 = enumerate_paulis(2);
  CHECK(p2.size() == 16);
  for (const CMat& P : p2) {
    CHECK(is_unitary(P));
    CHECK((P - P.adjoint()).norm() < 1e-14);  // hermitian convention
    CHECK((P * P - CMat::Identity(4, 4)).norm() < 1e-14);
  }
  // Trace-orthogonal family.
  for (std::size_t i = 0; i < p2.size(); ++i) {
    for (std::size_t j = i + 1; j < p2.size(); ++j) {
      CHECK(std::abs((p2[i].adjoint() * p2[j]).trace()) < 1e-12);
    }
  }
}

TEST_CASE("design certification") {
  EnsembleSpec cliff;
  cliff.kind = EnsembleSpec::Kind::kClifford;
  cliff.qubits = 1;
  const DesignReport r2 = certify_design(cliff, 2, 1e-10);
  CHECK(r2.is_design);
  CHECK(r2.exact);
  CHECK(r2.deviation < 1e-10);

  // Paulis are a 1-design but not a 2-design.
  EnsembleSpec pauli;
  pauli.kind = EnsembleSpec::Kind::kPauli;
  pauli.qubits = 1;
  CHECK(certify_design(pauli, 1, 1e-10).is_design);
  const DesignReport rp = certify_design(pauli, 2, 1e-10);
  CHECK_FALSE(rp.is_design);
  CHECK(rp.deviation > 0.1);

  // Stabilizer states: sphere 2-design.
  EnsembleSpec stab;
  stab.kind = EnsembleSpec::Kind::kStabilizerStates;
  stab.qubits = 1;
  CHECK(certify_design(stab, 2, 1e-10).is_design);
}

TEST_CASE("moment operator dimension budget") {
  EnsembleSpec big;
  big.kind = EnsembleSpec::Kind::kHaarUnitary;
  big.dim = 64;
  CHECK_THROWS_AS(moment_operator(big, 2, 100), ResourceError);
}

TEST_CASE("ensemble spec json round trip") {
  EnsembleSpec s;
  s.kind = EnsembleSpec::Kind::kClifford;
  s.qubits = 3;
  s.seed = 17;
  const EnsembleSpec back = EnsembleSpec::from_json(s.to_json());
  CHECK(back.kind == s.kind);
  CHECK(back.qubits == s.qubits);
  CHECK(back.seed == s.seed);
  CHECK(back.dimension() == 8);
}

}  // TEST_SUITE
