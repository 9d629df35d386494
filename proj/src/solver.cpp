#include "uniphase/solver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

namespace uniphase {

CMat project_psd(const CMat& M) {
  const EighResult e = eigh(M);
  const RVec w = e.eigenvalues.cwiseMax(0.0);
  return e.eigenvectors * w.asDiagonal() * e.eigenvectors.adjoint();
}

CMat project_affine_partial_trace(const CMat& G) {
  const Eigen::Index d2 = G.rows();
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(d2))));
  if (d * d != d2 || G.cols() != d2) {
    throw DimensionError("project_affine_partial_trace: need d^2 x d^2 input");
  }
  const double tr_over_d = G.trace().real() / static_cast<double>(d);
  const CMat I = CMat::Identity(d, d);
  // Traceless defects of the two constraints; the correction lives in
  // span{I (x) A, B (x) I} with A, B traceless, which is exactly the
  // orthogonal complement of the constraint subspace.
  const CMat A = partial_trace_1(G) - tr_over_d * I;
  const CMat B = partial_trace_2(G) - tr_over_d * I;
  return G - kron(I, A) / static_cast<double>(d) -
         kron(B, I) / static_cast<double>(d);
}

DataBallProjector::DataBallProjector(CMat columns, RVec y, double eta,
                                     double dual_tol)
    : V_(std::move(columns)), y_(std::move(y)), eta_(eta), tol_(dual_tol) {
  if (eta_ < 0) throw ValidationError("data ball: eta must be >= 0");
  const Eigen::Index m = V_.cols();
  if (y_.size() != m) throw DimensionError("data ball: |y| != m");
  RMat gram(m, m);
  const CMat overlaps = V_.adjoint() * V_;
  gram = overlaps.cwiseAbs2();
  Eigen::SelfAdjointEigenSolver<RMat> es(gram);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("data ball: Gram eigendecomposition failed");
  }
  eigvecs_ = es.eigenvectors();
  eigvals_ = es.eigenvalues().cwiseMax(0.0);
  // Component of y outside range(A) = range(Gram).
  const double cutoff = 1e-12 * std::max(1.0, eigvals_.maxCoeff());
  const RVec yt = eigvecs_.transpose() * y_;
  double null2 = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (eigvals_(k) <= cutoff) null2 += yt(k) * yt(k);
  }
  unreachable_ = std::max(0.0, std::sqrt(null2) - eta_);
}

RVec DataBallProjector::apply(const CMat& X) const {
  const CMat W = X * V_;
  return V_.conjugate().cwiseProduct(W).colwise().sum().real().transpose();
}

CMat DataBallProjector::apply_adjoint(const RVec& z) const {
  return V_ * z.asDiagonal() * V_.adjoint();
}

CMat DataBallProjector::project(const CMat& X) const {
  const RVec r = apply(X) - y_;
  const double nr = r.norm();
  if (nr <= eta_ + 1e-15) return X;

  const Eigen::Index m = r.size();
  const RVec rt = eigvecs_.transpose() * r;
  const double cutoff = 1e-12 * std::max(1.0, eigvals_.maxCoeff());

  RVec lt(m);
  if (eta_ <= 1e-14 * std::max(1.0, y_.norm())) {
    // Affine case: least-squares projection onto {A(X) = y} over range(A).
    for (Eigen::Index k = 0; k < m; ++k) {
      lt(k) = (eigvals_(k) > cutoff) ? rt(k) / eigvals_(k) : 0.0;
    }
    return X - apply_adjoint(eigvecs_ * lt);
  }

  // Residual norm as a function of the dual multiplier.
  const auto phi2 = [&](double nu) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double z = rt(k) / (1.0 + nu * eigvals_(k));
      s += z * z;
    }
    return s;
  };
  const double target2 = eta_ * eta_;
  double lo = 0.0, hi = 1.0;
  while (phi2(hi) > target2 && hi < 1e18) hi *= 4.0;
  if (phi2(hi) > target2) {
    // Ball unreachable (y has a large component outside range(A));
    // return the best-effort point minimizing the data residual.
    for (Eigen::Index k = 0; k < m; ++k) {
      lt(k) = (eigvals_(k) > cutoff) ? rt(k) / eigvals_(k) : 0.0;
    }
    return X - apply_adjoint(eigvecs_ * lt);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi2(mid) > target2) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= tol_ * std::max(1.0, hi)) break;
  }
  const double nu = hi;
  for (Eigen::Index k = 0; k < m; ++k) {
    lt(k) = nu * rt(k) / (1.0 + nu * eigvals_(k));
  }
  return X - apply_adjoint(eigvecs_ * lt);
}

CMat project_nonspiky_box(const CMat& X, const std::vector<CVec>& forms,
                          double lo, double hi, double tol, int max_cycles) {
  if (forms.empty()) return X;
  const auto single = [&](const CMat& M, const CVec& c) -> CMat {
    const double q = (c.dot(M * c)).real();
    const double n4 = std::pow(c.squaredNorm(), 2);
    if (q > hi) return M - ((q - hi) / n4) * (c * c.adjoint());
    if (q < lo) return M + ((lo - q) / n4) * (c * c.adjoint());
    return M;
  };
  const auto max_violation = [&](const CMat& M) {
    double v = 0.0;
    for (const CVec& c : forms) {
      const double q = (c.dot(M * c)).real();
      v = std::max(v, std::max(q - hi, lo - q));
    }
    return v;
  };

  CMat x = X;
  std::vector<CMat> increments(forms.size(),
                               CMat::Zero(X.rows(), X.cols()));
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    for (std::size_t k = 0; k < forms.size(); ++k) {
      const CMat y = x + increments[k];
      const CMat xn = single(y, forms[k]);
      increments[k] = y - xn;
      x = xn;
    }
    if (max_violation(x) < tol) break;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Consensus ADMM driver
// ---------------------------------------------------------------------------

std::string SolverConfig::to_json() const {
  nlohmann::json j;
  j["max_iters"] = max_iters;
  j["primal_tol"] = primal_tol;
  j["dual_tol"] = dual_tol;
  j["rho"] = rho;
  j["adapt_rho"] = adapt_rho;
  j["over_relaxation"] = over_relaxation;
  j["dual_solve_tol"] = dual_solve_tol;
  return j.dump();
}

std::string SolverResult::to_json() const {
  nlohmann::json j;
  j["objective"] = objective;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["infeasible"] = infeasible;
  j["wall_time_s"] = wall_time_s;
  j["message"] = message;
  j["residuals"] = {{"data", residuals.data},
                    {"psd", residuals.psd},
                    {"affine", residuals.affine},
                    {"box", residuals.box},
                    {"combined", residuals.combined},
                    {"dual", residuals.dual}};
  return j.dump();
}

namespace {

struct ConstraintState {
  double data = 0.0;
  double psd = 0.0;
  double affine = 0.0;
  double box = 0.0;
};

double soft_threshold(double x, double k) {
  if (x > k) return x - k;
  if (x < -k) return x + k;
  return 0.0;
}

CMat nuclear_prox(const CMat& M, double k) {
  const EighResult e = eigh(M);
  RVec w = e.eigenvalues;
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = soft_threshold(w(i), k);
  return e.eigenvectors * w.asDiagonal() * e.eigenvectors.adjoint();
}

}  // namespace

SolverResult solve(const ProgramSpec& program, const SolverConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto& ens = program.ensemble;
  const auto& rec = program.record;
  if (ens.m < 1) throw ValidationError("solve: need m >= 1 measurements");
  if (rec.y.size() != ens.m) {
    throw DimensionError("solve: record length does not match ensemble");
  }
  if (rec.eta < 0) throw ValidationError("solve: eta must be >= 0");
  const bool matrix_mode = program.mode != ProgramSpec::Mode::kVector;
  if (matrix_mode !=
      (ens.mode == MeasurementEnsembleInstance::Mode::kUnitaryMatrix)) {
    throw ValidationError("solve: program mode does not match ensemble mode");
  }
  const bool use_box = program.mode != ProgramSpec::Mode::kUnitary;
  if (use_box && !program.beta) {
    throw ValidationError("solve: non-spiky programs require beta");
  }

  const int d = ens.d;
  const Eigen::Index n = matrix_mode ? static_cast<Eigen::Index>(d) * d : d;

  // Rank-one measurement columns: sqrt(d) vec(C_i) or a_i.
  CMat columns(n, ens.m);
  if (matrix_mode) {
    const double sd = std::sqrt(static_cast<double>(d));
    for (int i = 0; i < ens.m; ++i) columns.col(i) = sd * vec(ens.unitaries[i]);
  } else {
    const double scale = std::pow(static_cast<double>(d + 1) * d, 0.25);
    for (int i = 0; i < ens.m; ++i) columns.col(i) = scale * ens.vectors[i];
  }
  const DataBallProjector data_proj(columns, rec.y, rec.eta,
                                    config.dual_solve_tol);

  // Non-spikiness forms and interval.
  std::vector<CVec> box_forms;
  double box_lo = 0.0, box_hi = 0.0;
  if (use_box) {
    if (matrix_mode) {
      for (const CMat& C : ens.unitaries) box_forms.push_back(vec(C));
      for (const CMat& C : program.extra_nonspiky_unitaries) {
        box_forms.push_back(vec(C));
      }
      box_lo = 0.0;
      box_hi = *program.beta;
    } else {
      const double scale = std::pow(static_cast<double>(d + 1) * d, 0.25);
      for (const CVec& w : ens.vectors) box_forms.push_back(scale * w);
      for (const CVec& w : program.extra_nonspiky_vectors) {
        box_forms.push_back(scale * w);
      }
      box_hi = *program.beta * std::sqrt(1.0 + 1.0 / d);
      box_lo = -box_hi;
    }
  }

  enum Block { kPsd, kAffine, kData, kBox };
  std::vector<Block> blocks;
  if (matrix_mode) {
    blocks = {kPsd, kAffine, kData};
  } else {
    blocks = {kData};
  }
  if (use_box) blocks.push_back(kBox);
  const int N = static_cast<int>(blocks.size());

  const auto project_block = [&](Block b, const CMat& X) -> CMat {
    switch (b) {
      case kPsd: return project_psd(X);
      case kAffine: return project_affine_partial_trace(X);
      case kData: return data_proj.project(X);
      case kBox:
        return project_nonspiky_box(X, box_forms, box_lo, box_hi, 1e-8, 100);
    }
    return X;
  };

  const auto constraint_state = [&](const CMat& z) {
    ConstraintState s;
    s.data = std::max(0.0, (data_proj.apply(z) - rec.y).norm() - rec.eta);
    if (matrix_mode) {
      const EighResult e = eigh(z);
      s.psd = std::max(0.0, -e.eigenvalues.minCoeff());
      const double tr_over_d = z.trace().real() / d;
      const CMat I = CMat::Identity(d, d);
      const double a1 = (partial_trace_1(z) - tr_over_d * I).norm();
      const double a2 = (partial_trace_2(z) - tr_over_d * I).norm();
      s.affine = std::sqrt(a1 * a1 + a2 * a2);
    }
    for (const CVec& c : box_forms) {
      const double q = (c.dot(z * c)).real();
      s.box = std::max(s.box, std::max(q - box_hi, box_lo - q));
    }
    return s;
  };

  const double y_scale = std::max(rec.y.norm(), 1e-12);
  const auto combined_residual = [&](const ConstraintState& s, const CMat& z) {
    const double zn = std::max(1.0, z.norm());
    double c = s.data / y_scale;
    c = std::max(c, s.psd / zn);
    c = std::max(c, s.affine / zn);
    if (use_box) c = std::max(c, s.box / std::max(box_hi, 1.0));
    return c;
  };

  // State.
  double rho = config.rho;
  const double alpha = config.over_relaxation;
  CMat z = config.warm_start
               ? *config.warm_start
               : CMat(CMat::Zero(n, n));
  if (z.rows() != n || z.cols() != n) {
    throw DimensionError("solve: warm start has wrong dimensions");
  }
  std::vector<CMat> x(N, CMat::Zero(n, n));
  std::vector<CMat> u(N, CMat::Zero(n, n));
  if (config.warm_duals) {
    if (config.warm_duals->size() != static_cast<std::size_t>(N)) {
      throw DimensionError("solve: warm duals do not match the block count");
    }
    u = *config.warm_duals;
    for (const CMat& ub : u) {
      if (ub.rows() != n || ub.cols() != n) {
        throw DimensionError("solve: warm duals have wrong dimensions");
      }
    }
  } else if (config.warm_start && matrix_mode) {
    // Crude dual seed when only a primal is available: at a consensus fixed
    // point the z-update's objective shift must cancel, sum_b u_b = I/rho.
    for (auto& ub : u) ub = CMat::Identity(n, n) / (N * rho);
  }

  std::ofstream trace;
  if (!config.trace_csv.empty()) {
    trace.open(config.trace_csv);
    trace << "iter,data_res,psd_res,affine_res,box_res,objective\n";
  }

  SolverResult result;
  result.solution = z;
  ConstraintState cs;
  double combined = std::numeric_limits<double>::infinity();
  double dual_rel = std::numeric_limits<double>::infinity();
  double primal_res = 0.0, dual_res = 0.0;

  // Stall detection over 500-iteration windows.
  constexpr int kWindow = 500;
  double window_best = std::numeric_limits<double>::infinity();
  double prev_window_best = std::numeric_limits<double>::infinity();

  int it = 0;
  for (; it < config.max_iters; ++it) {
    for (int b = 0; b < N; ++b) x[b] = project_block(blocks[b], z - u[b]);

    const CMat z_old = z;
    CMat acc = CMat::Zero(n, n);
    for (int b = 0; b < N; ++b) {
      acc += alpha * x[b] + (1.0 - alpha) * z_old + u[b];
    }
    z = acc / static_cast<double>(N);
    if (matrix_mode) {
      // Linear objective Tr(z): closed-form shift in the consensus step.
      z -= CMat::Identity(n, n) / (static_cast<double>(N) * rho);
      z = 0.5 * (z + z.adjoint());
    } else {
      z = nuclear_prox(0.5 * (z + z.adjoint()),
                       1.0 / (static_cast<double>(N) * rho));
    }
    for (int b = 0; b < N; ++b) {
      u[b] += alpha * x[b] + (1.0 - alpha) * z_old - z;
    }

    double pr2 = 0.0;
    for (int b = 0; b < N; ++b) pr2 += (x[b] - z).squaredNorm();
    primal_res = std::sqrt(pr2);
    dual_res = rho * std::sqrt(static_cast<double>(N)) * (z - z_old).norm();

    const bool check = (it % 10 == 9) || it == config.max_iters - 1;
    if (check) {
      cs = constraint_state(z);
      combined = combined_residual(cs, z);
      dual_rel = dual_res / std::max(1.0, z.norm());
      if (trace.is_open()) {
        const double obj = matrix_mode
                               ? z.trace().real()
                               : eigh(z).eigenvalues.cwiseAbs().sum();
        trace << it + 1 << ',' << cs.data << ',' << cs.psd << ',' << cs.affine
              << ',' << cs.box << ',' << obj << '\n';
      }
      if (combined < config.primal_tol && dual_rel < config.dual_tol) {
        result.converged = true;
        ++it;
        break;
      }
      window_best = std::min(window_best, combined);
      if ((it + 1) % kWindow == 0) {
        if (std::isfinite(prev_window_best) &&
            window_best > prev_window_best * 0.999 &&
            combined > 100.0 * config.primal_tol) {
          result.infeasible = true;
          result.message =
              "residuals stalled above tolerance; constraint sets appear "
              "disjoint at this tolerance";
          ++it;
          break;
        }
        prev_window_best = window_best;
        window_best = std::numeric_limits<double>::infinity();
      }
    }

    if (config.adapt_rho && (it + 1) % 50 == 0) {
      if (primal_res > 10.0 * dual_res) {
        rho *= 2.0;
        for (auto& ub : u) ub *= 0.5;
      } else if (dual_res > 10.0 * primal_res) {
        rho *= 0.5;
        for (auto& ub : u) ub *= 2.0;
      }
    }
  }

  result.solution = 0.5 * (z + z.adjoint());
  result.objective = matrix_mode
                         ? result.solution.trace().real()
                         : eigh(result.solution).eigenvalues.cwiseAbs().sum();
  result.iterations = it;
  if (!result.converged && !result.infeasible) {
    result.message = "max iterations reached";
  }
  cs = constraint_state(result.solution);
  result.residuals.data = cs.data;
  result.residuals.psd = cs.psd;
  result.residuals.affine = cs.affine;
  result.residuals.box = cs.box;
  result.residuals.combined = combined_residual(cs, result.solution);
  result.residuals.dual = dual_rel;
  // Unreachable data means the ball itself is empty of feasible points.
  if (!result.converged && data_proj.unreachable_excess() > 0) {
    result.infeasible = true;
    result.message = "y has a component outside range(A) larger than eta";
  }
  result.dual_state = u;
  result.rho_final = rho;
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

}  // namespace uniphase
