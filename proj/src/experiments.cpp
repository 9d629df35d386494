#include "uniphase/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "uniphase/recovery.hpp"
#include "uniphase/reps.hpp"

namespace uniphase {

namespace {

using nlohmann::json;

// Shortest round-trip decimal form; byte-stable across reruns.
std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::uint64_t ensemble_tag(EnsembleSpec::Kind kind) {
  return 0x9000 + static_cast<std::uint64_t>(kind);
}

int log2_exact(int d) {
  int n = 0;
  while ((1 << n) < d) ++n;
  if ((1 << n) != d) {
    throw ValidationError("dimension must be a power of two for qubit ensembles");
  }
  return n;
}

EnsembleSpec make_matrix_spec(EnsembleSpec::Kind kind, int d) {
  EnsembleSpec spec;
  spec.kind = kind;
  if (kind == EnsembleSpec::Kind::kHaarUnitary) {
    spec.dim = d;
  } else if (kind == EnsembleSpec::Kind::kClifford) {
    spec.qubits = log2_exact(d);
  } else {
    throw ValidationError("sweep supports haar-unitary and clifford ensembles");
  }
  return spec;
}

}  // namespace

std::vector<int> ExperimentGrid::m_grid_for(int d) const {
  const auto it = m_values.find(d);
  if (it != m_values.end()) return it->second;
  std::vector<int> grid;
  for (int k = 0; k < m_steps; ++k) {
    const double frac = m_steps == 1 ? 0.0 : double(k) / (m_steps - 1);
    const double s = d * (sqrt_m_lo + (sqrt_m_hi - sqrt_m_lo) * frac);
    const int m = std::max(1, int(std::lround(s * s)));
    if (grid.empty() || m > grid.back()) grid.push_back(m);
  }
  return grid;
}

void ExperimentGrid::validate() const {
  if (dims.empty()) throw ValidationError("grid: dims must be nonempty");
  if (ensembles.empty()) throw ValidationError("grid: ensembles must be nonempty");
  if (trials < 1) throw ValidationError("grid: trials must be >= 1");
  if (m_steps < 1) throw ValidationError("grid: m_steps must be >= 1");
  if (sqrt_m_hi < sqrt_m_lo || sqrt_m_lo <= 0) {
    throw ValidationError("grid: sqrt(m) range must be positive and ordered");
  }
  for (int d : dims) {
    if (d < 2) throw ValidationError("grid: dims must be >= 2");
    if (d > 16 && !allow_large) {
      throw ResourceError(
          "grid: d > 16 exceeds the default budget; set allow_large to override");
    }
    if (m_grid_for(d).empty()) throw ValidationError("grid: empty m grid");
    for (EnsembleSpec::Kind kind : ensembles) make_matrix_spec(kind, d);
  }
}

ExperimentGrid ExperimentGrid::from_config(const std::string& text) {
  ExperimentGrid grid;
  grid.m_values.clear();
  bool dims_set = false, ensembles_set = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // Trim.
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      s = a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    strip(key);
    strip(value);
    auto split_ints = [&](const std::string& v) {
      std::vector<int> out;
      std::istringstream vs(v);
      std::string tok;
      while (std::getline(vs, tok, ',')) out.push_back(std::stoi(tok));
      return out;
    };
    if (key == "dims") {
      grid.dims = split_ints(value);
      dims_set = true;
    } else if (key == "trials") {
      grid.trials = std::stoi(value);
    } else if (key == "ensembles") {
      grid.ensembles.clear();
      std::istringstream vs(value);
      std::string tok;
      while (std::getline(vs, tok, ',')) {
        grid.ensembles.push_back(ensemble_kind_from_name(tok));
      }
      ensembles_set = true;
    } else if (key == "seed") {
      grid.master_seed = std::stoull(value);
    } else if (key == "noise_sigma") {
      grid.noise_sigma = std::stod(value);
    } else if (key == "error_cutoff") {
      grid.error_cutoff = std::stod(value);
    } else if (key == "m_steps") {
      grid.m_steps = std::stoi(value);
    } else if (key == "sqrt_m_lo") {
      grid.sqrt_m_lo = std::stod(value);
    } else if (key == "sqrt_m_hi") {
      grid.sqrt_m_hi = std::stod(value);
    } else if (key == "allow_large") {
      grid.allow_large = value == "1" || value == "true";
    } else if (key == "workers") {
      grid.workers = std::stoi(value);
    } else if (key == "max_iters") {
      grid.solver.max_iters = std::stoi(value);
    } else if (key.rfind("m_values.", 0) == 0) {
      grid.m_values[std::stoi(key.substr(9))] = split_ints(value);
    } else {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }
  (void)dims_set;
  (void)ensembles_set;
  grid.validate();
  return grid;
}

std::string ExperimentGrid::to_json() const {
  json j;
  j["dims"] = dims;
  json mv = json::object();
  for (const auto& [d, ms] : m_values) mv[std::to_string(d)] = ms;
  j["m_values"] = mv;
  j["sqrt_m_lo"] = sqrt_m_lo;
  j["sqrt_m_hi"] = sqrt_m_hi;
  j["m_steps"] = m_steps;
  std::vector<std::string> names;
  for (auto k : ensembles) names.push_back(ensemble_kind_name(k));
  j["ensembles"] = names;
  j["trials"] = trials;
  j["noise_sigma"] = noise_sigma;
  j["error_cutoff"] = error_cutoff;
  j["master_seed"] = master_seed;
  j["allow_large"] = allow_large;
  j["workers"] = workers;
  return j.dump(2);
}

const char* TrialRow::kSchemaLine = "# uniphase.trialrow.v1";
const char* TrialRow::kHeaderLine =
    "d,m,ensemble,trial_index,seed,noise_sigma,eta,lifted_error,"
    "normalized_error,signal_error,fidelity,solver_iterations,converged,"
    "wall_ms";

std::string TrialRow::to_csv() const {
  std::ostringstream out;
  out << d << ',' << m << ',' << ensemble << ',' << trial_index << ',' << seed
      << ',' << fmt_double(noise_sigma) << ',' << fmt_double(eta) << ','
      << fmt_double(lifted_error) << ',' << fmt_double(normalized_error) << ','
      << fmt_double(signal_error) << ',' << fmt_double(fidelity) << ','
      << solver_iterations << ',' << (converged ? 1 : 0) << ','
      << fmt_double(wall_ms);
  return out.str();
}

TrialRow TrialRow::from_csv(const std::string& line) {
  std::vector<std::string> f;
  std::istringstream in(line);
  std::string tok;
  while (std::getline(in, tok, ',')) f.push_back(tok);
  if (f.size() != 14) throw ValidationError("trial row: expected 14 fields");
  TrialRow r;
  r.d = std::stoi(f[0]);
  r.m = std::stoi(f[1]);
  r.ensemble = f[2];
  r.trial_index = std::stoi(f[3]);
  r.seed = std::stoull(f[4]);
  r.noise_sigma = std::stod(f[5]);
  r.eta = std::stod(f[6]);
  r.lifted_error = std::stod(f[7]);
  r.normalized_error = std::stod(f[8]);
  r.signal_error = std::stod(f[9]);
  r.fidelity = std::stod(f[10]);
  r.solver_iterations = std::stoi(f[11]);
  r.converged = f[12] == "1" || f[12] == "true";
  r.wall_ms = std::stod(f[13]);
  return r;
}

std::vector<TrialRow> read_trial_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ValidationError("cannot open trial table: " + path);
  std::vector<TrialRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("d,m,", 0) == 0) continue;  // header
    rows.push_back(TrialRow::from_csv(line));
  }
  return rows;
}

namespace {

// One trial stream: a fixed (d, ensemble, trial) with its own signal U and
// measurement stream, swept over ascending m with warm starts.
struct StreamKey {
  int d;
  EnsembleSpec::Kind kind;
  int trial;
};

std::vector<TrialRow> run_stream(const ExperimentGrid& grid,
                                 const StreamKey& key,
                                 const std::set<int>* skip_m) {
  const std::uint64_t stream_seed = mix_seed(
      grid.master_seed,
      {std::uint64_t(key.d), ensemble_tag(key.kind), std::uint64_t(key.trial)});
  Rng signal_rng(mix_seed(stream_seed, {1}));
  Rng ensemble_rng(mix_seed(stream_seed, {2}));
  const CMat U = sample_haar_unitary(key.d, signal_rng);
  const EnsembleSpec spec = make_matrix_spec(key.kind, key.d);
  MeasurementEnsembleInstance ens;
  const NoiseModel noise = grid.noise_sigma > 0
                               ? NoiseModel::gaussian(grid.noise_sigma)
                               : NoiseModel::none();

  std::vector<TrialRow> rows;
  SolverConfig cfg = grid.solver;
  for (int m : grid.m_grid_for(key.d)) {
    if (ens.m == 0) {
      ens = MeasurementEnsembleInstance::sample(spec, m, ensemble_rng);
    } else {
      ens.extend(m, ensemble_rng);
    }
    const std::uint64_t cell_seed =
        mix_seed(grid.master_seed,
                 {std::uint64_t(key.d), std::uint64_t(m), ensemble_tag(key.kind),
                  std::uint64_t(key.trial)});
    ProgramSpec prog;
    prog.mode = ProgramSpec::Mode::kUnitary;
    prog.ensemble = ens;
    prog.record = measure(ens, U, noise, std::nullopt, cell_seed);

    const auto t0 = std::chrono::steady_clock::now();
    const SolverResult res = solve(prog, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    cfg.warm_start = res.solution;
    cfg.warm_duals = res.dual_state;
    cfg.rho = res.rho_final;  // scaled duals are only meaningful at this rho

    if (skip_m && skip_m->count(m)) continue;
    const RecoveryOutcome rec = recover(res.solution, U);
    TrialRow row;
    row.d = key.d;
    row.m = m;
    row.ensemble = ensemble_kind_name(key.kind);
    row.trial_index = key.trial;
    row.seed = cell_seed;
    row.noise_sigma = grid.noise_sigma;
    row.eta = prog.record.eta;
    row.lifted_error = rec.lifted_error;
    row.normalized_error = rec.normalized_error;
    row.signal_error = rec.signal_error;
    row.fidelity = rec.fidelity;
    row.solver_iterations = res.iterations;
    row.converged = res.converged;
    row.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

SweepSummary summarize_sweep(const std::vector<TrialRow>& rows, double cutoff,
                             int trials) {
  // successes per (ensemble, d, m)
  std::map<std::string, std::map<int, std::map<int, int>>> wins;
  for (const TrialRow& r : rows) {
    if (r.normalized_error < cutoff) ++wins[r.ensemble][r.d][r.m];
    else wins[r.ensemble][r.d];  // make sure the cell group exists
  }
  const int need = (9 * trials + 9) / 10;  // ceil(0.9 * trials)
  SweepSummary summary;
  summary.error_cutoff = cutoff;
  summary.trials = trials;
  std::map<std::string, std::pair<double, double>> fit;  // sum d*sqrt(m*), sum d^2
  for (const auto& [ens, by_d] : wins) {
    for (const auto& [d, by_m] : by_d) {
      ThresholdFit th;
      th.d = d;
      th.ensemble = ens;
      for (const auto& [m, count] : by_m) {
        if (count >= need) {
          th.m_star = m;
          th.found = true;
          break;
        }
      }
      summary.thresholds.push_back(th);
      if (th.found) {
        fit[ens].first += d * std::sqrt(double(th.m_star));
        fit[ens].second += double(d) * d;
      }
    }
  }
  for (const auto& [ens, acc] : fit) {
    if (acc.second > 0) summary.alpha[ens] = acc.first / acc.second;
  }
  return summary;
}

std::string SweepSummary::to_json() const {
  json j;
  j["error_cutoff"] = error_cutoff;
  j["trials"] = trials;
  json th = json::array();
  for (const ThresholdFit& t : thresholds) {
    th.push_back({{"d", t.d},
                  {"ensemble", t.ensemble},
                  {"m_star", t.m_star},
                  {"found", t.found}});
  }
  j["thresholds"] = th;
  j["alpha"] = alpha;
  return j.dump(2);
}

SweepResult run_sweep(const ExperimentGrid& grid, const std::string& csv_path,
                      bool resume) {
  grid.validate();

  // Existing rows, keyed by stream, for resume.
  std::vector<TrialRow> existing;
  if (resume) {
    std::ifstream probe(csv_path);
    if (probe.good()) existing = read_trial_csv(csv_path);
  }
  auto stream_id = [](int d, const std::string& ens, int trial) {
    return ens + "/" + std::to_string(d) + "/" + std::to_string(trial);
  };
  std::map<std::string, std::set<int>> have_m;
  for (const TrialRow& r : existing) {
    have_m[stream_id(r.d, r.ensemble, r.trial_index)].insert(r.m);
  }

  std::vector<StreamKey> streams;
  for (int d : grid.dims) {
    for (EnsembleSpec::Kind kind : grid.ensembles) {
      for (int trial = 0; trial < grid.trials; ++trial) {
        streams.push_back({d, kind, trial});
      }
    }
  }

  // Work out, per stream, which m values still need rows.
  std::vector<const std::set<int>*> skip(streams.size(), nullptr);
  std::vector<bool> complete(streams.size(), false);
  for (std::size_t k = 0; k < streams.size(); ++k) {
    const auto& s = streams[k];
    const auto it =
        have_m.find(stream_id(s.d, ensemble_kind_name(s.kind), s.trial));
    if (it == have_m.end()) continue;
    skip[k] = &it->second;
    bool all = true;
    for (int m : grid.m_grid_for(s.d)) {
      if (!it->second.count(m)) all = false;
    }
    complete[k] = all;
  }

  std::ofstream out;
  const bool fresh = [&] {
    std::ifstream probe(csv_path);
    return !(resume && probe.good());
  }();
  out.open(csv_path, fresh ? std::ios::trunc : std::ios::app);
  if (!out.good()) throw ResourceError("cannot open sweep output: " + csv_path);
  if (fresh) {
    out << TrialRow::kSchemaLine << '\n' << TrialRow::kHeaderLine << '\n';
  }

  // Bounded worker pool; a single writer emits stream results in canonical
  // order so the file bytes do not depend on scheduling.
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::min<std::size_t>(
      streams.size(),
      grid.workers > 0 ? grid.workers : (hw > 0 ? hw : 4));
  std::vector<std::vector<TrialRow>> results(streams.size());
  std::vector<char> done(streams.size(), 0);
  std::mutex mu;
  std::condition_variable cv;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= streams.size()) return;
        k = next++;
      }
      std::vector<TrialRow> rows;
      if (!complete[k]) rows = run_stream(grid, streams[k], skip[k]);
      {
        std::lock_guard<std::mutex> lock(mu);
        results[k] = std::move(rows);
        done[k] = 1;
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);

  SweepResult result;
  result.rows = existing;
  for (std::size_t k = 0; k < streams.size(); ++k) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return done[k] != 0; });
    for (const TrialRow& row : results[k]) {
      out << row.to_csv() << '\n';
      result.rows.push_back(row);
    }
    out.flush();
  }
  for (std::thread& t : pool) t.join();

  result.summary =
      summarize_sweep(result.rows, grid.error_cutoff, grid.trials);
  return result;
}

// ---------------------------------------------------------------------------
// Heatmap

namespace {

std::string fmt2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string cell_color(double err) {
  // White at zero error, saturating to a deep red at 1.
  const double c = std::clamp(err, 0.0, 1.0);
  const int g = int(std::lround(255.0 * (1.0 - c)));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", 220 + int(std::lround(35 * (1 - c))), g, g);
  return buf;
}

}  // namespace

std::string render_heatmap_svg(const std::vector<TrialRow>& rows) {
  if (rows.empty()) throw ValidationError("heatmap: empty table");

  // Mean normalized error per (ensemble, d, m).
  std::map<std::string, std::map<int, std::map<int, std::pair<double, int>>>>
      cells;
  for (const TrialRow& r : rows) {
    auto& c = cells[r.ensemble][r.d][r.m];
    c.first += r.normalized_error;
    c.second += 1;
  }
  std::vector<std::string> ensembles;
  std::set<int> dims;
  int trials_per_cell = 0;
  for (const auto& [ens, by_d] : cells) {
    ensembles.push_back(ens);
    for (const auto& [d, by_m] : by_d) {
      dims.insert(d);
      for (const auto& [m, acc] : by_m) {
        trials_per_cell = std::max(trials_per_cell, acc.second);
      }
    }
  }

  double sqrt_m_max = 0.0;
  for (const TrialRow& r : rows) {
    sqrt_m_max = std::max(sqrt_m_max, std::sqrt(double(r.m)));
  }
  sqrt_m_max *= 1.06;

  const double plot_h = 360.0, col_w = 34.0, group_gap = 16.0;
  const double margin_l = 58.0, margin_t = 26.0, margin_b = 44.0;
  const double group_w = ensembles.size() * col_w;
  const double plot_w = dims.size() * group_w +
                        (dims.size() > 0 ? (dims.size() - 1) * group_gap : 0);
  const double width = margin_l + plot_w + 150.0;
  const double height = margin_t + plot_h + margin_b;
  auto y_of = [&](double sqrt_m) {
    return margin_t + plot_h * (1.0 - sqrt_m / sqrt_m_max);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(width)
      << "\" height=\"" << fmt2(height) << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"" << fmt2(width) << "\" height=\"" << fmt2(height)
      << "\" fill=\"white\"/>\n";

  std::map<int, double> group_x;  // left edge per d
  {
    double x = margin_l;
    for (int d : dims) {
      group_x[d] = x;
      x += group_w + group_gap;
    }
  }

  for (std::size_t e = 0; e < ensembles.size(); ++e) {
    const std::string& ens = ensembles[e];
    for (const auto& [d, by_m] : cells[ens]) {
      const double x = group_x[d] + e * col_w;
      // Cell heights from the local sqrt(m) spacing.
      std::vector<int> ms;
      for (const auto& [m, acc] : by_m) ms.push_back(m);
      for (std::size_t i = 0; i < ms.size(); ++i) {
        const double s = std::sqrt(double(ms[i]));
        const double s_lo = i == 0 ? std::max(0.0, s - (std::sqrt(double(ms[std::min(i + 1, ms.size() - 1)])) - s))
                                   : 0.5 * (s + std::sqrt(double(ms[i - 1])));
        const double s_hi = i + 1 == ms.size()
                                ? s + (s - s_lo)
                                : 0.5 * (s + std::sqrt(double(ms[i + 1])));
        const auto& acc = by_m.at(ms[i]);
        const double err = acc.first / acc.second;
        svg << "<rect x=\"" << fmt2(x) << "\" y=\"" << fmt2(y_of(s_hi))
            << "\" width=\"" << fmt2(col_w - 2.0) << "\" height=\""
            << fmt2(std::max(1.0, y_of(s_lo) - y_of(s_hi))) << "\" fill=\""
            << cell_color(err) << "\"><title>" << ens << " d=" << d
            << " m=" << ms[i] << " err=" << fmt2(err) << "</title></rect>\n";
      }
    }
  }

  // Fitted sqrt(m*) = alpha d line, preferring the Haar ensemble.
  const SweepSummary summary = summarize_sweep(
      rows, 0.05, std::max(1, trials_per_cell));
  std::string fit_ens;
  if (summary.alpha.count("haar-unitary")) fit_ens = "haar-unitary";
  else if (!summary.alpha.empty()) fit_ens = summary.alpha.begin()->first;
  if (!fit_ens.empty()) {
    const double alpha = summary.alpha.at(fit_ens);
    svg << "<polyline fill=\"none\" stroke=\"#1040c0\" stroke-width=\"2\" "
           "stroke-dasharray=\"6,4\" points=\"";
    bool first = true;
    for (int d : dims) {
      const double cx = group_x[d] + 0.5 * group_w;
      svg << (first ? "" : " ") << fmt2(cx) << "," << fmt2(y_of(alpha * d));
      first = false;
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << fmt2(margin_l + plot_w + 12.0) << "\" y=\""
        << fmt2(margin_t + 14.0) << "\" font-size=\"13\">sqrt(m) = "
        << fmt2(alpha) << " d</text>\n";
  }

  // Axes and labels.
  svg << "<text x=\"" << fmt2(margin_l + 0.5 * plot_w) << "\" y=\""
      << fmt2(height - 10.0)
      << "\" font-size=\"13\" text-anchor=\"middle\">d</text>\n";
  svg << "<text x=\"14\" y=\"" << fmt2(margin_t + 0.5 * plot_h)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << fmt2(margin_t + 0.5 * plot_h) << ")\">sqrt(m)</text>\n";
  for (int d : dims) {
    svg << "<text x=\"" << fmt2(group_x[d] + 0.5 * group_w) << "\" y=\""
        << fmt2(margin_t + plot_h + 16.0)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << d << "</text>\n";
  }
  for (int tick = 0; tick <= 4; ++tick) {
    const double s = sqrt_m_max * tick / 4.0;
    svg << "<text x=\"" << fmt2(margin_l - 8.0) << "\" y=\""
        << fmt2(y_of(s) + 4.0)
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt2(s)
        << "</text>\n";
  }
  // Ensemble legend.
  for (std::size_t e = 0; e < ensembles.size(); ++e) {
    svg << "<text x=\"" << fmt2(margin_l + plot_w + 12.0) << "\" y=\""
        << fmt2(margin_t + 40.0 + 18.0 * e) << "\" font-size=\"12\">column "
        << (e + 1) << ": " << ensembles[e] << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_heatmap(const std::vector<TrialRow>& rows,
                  const std::string& svg_path) {
  const std::string svg = render_heatmap_svg(rows);
  std::ofstream out(svg_path, std::ios::trunc | std::ios::binary);
  if (!out.good()) throw ResourceError("cannot open heatmap output: " + svg_path);
  out << svg;
}

// ---------------------------------------------------------------------------
// Identity suite

std::string IdentityReport::to_json() const {
  json j;
  j["seed"] = seed;
  j["instances"] = instances;
  j["all_passed"] = all_passed;
  json cs = json::array();
  for (const IdentityCheck& c : checks) {
    cs.push_back({{"name", c.name},
                  {"max_deviation", c.max_deviation},
                  {"tolerance", c.tolerance},
                  {"expected_to_fail", c.expected_to_fail},
                  {"passed", c.passed}});
  }
  j["checks"] = cs;
  return j.dump(2);
}

IdentityReport IdentityReport::from_json(const std::string& text) {
  const json j = json::parse(text);
  IdentityReport r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.instances = j.at("instances").get<int>();
  r.all_passed = j.at("all_passed").get<bool>();
  for (const json& cj : j.at("checks")) {
    IdentityCheck c;
    c.name = cj.at("name").get<std::string>();
    c.max_deviation = cj.at("max_deviation").get<double>();
    c.tolerance = cj.at("tolerance").get<double>();
    c.expected_to_fail = cj.at("expected_to_fail").get<bool>();
    c.passed = cj.at("passed").get<bool>();
    r.checks.push_back(c);
  }
  return r;
}

IdentityReport verify_identities(std::uint64_t seed, int instances) {
  IdentityReport report;
  report.seed = seed;
  report.instances = instances;

  IdentityCheck pairing{"pairing-overlap", 0.0, 1e-12, false, false};
  IdentityCheck conv{"choi-liouville-conversion", 0.0, 1e-12, false, false};
  IdentityCheck action{"liouville-action", 0.0, 1e-12, false, false};
  IdentityCheck ptrace{"partial-trace-ideal", 0.0, 1e-12, false, false};
  IdentityCheck control{"transposed-liouville-control", 0.0, 1e-3, true, false};

  for (int d : {2, 3, 4, 8}) {
    Rng rng(mix_seed(seed, {std::uint64_t(d)}));
    for (int k = 0; k < instances; ++k) {
      const CMat U = sample_haar_unitary(d, rng);
      const CMat C = sample_haar_unitary(d, rng);

      // |Tr(C^dag U)|^2 = d^2 Tr(J_U J_C), relative to the d^2 scale.
      const double lhs = std::norm((C.adjoint() * U).trace());
      const double rhs =
          d * d * trace_pairing(choi_of_unitary(U), choi_of_unitary(C));
      pairing.max_deviation =
          std::max(pairing.max_deviation, std::abs(lhs - rhs) / (d * d));

      const ChoiMatrix J = choi_of_unitary(U);
      const LiouvilleMatrix L = liouville_of_unitary(U);
      const double conv_dev = std::max(
          (choi_to_liouville(J).matrix - L.matrix).norm() / L.matrix.norm(),
          (liouville_to_choi(L).matrix - J.matrix).norm() / J.matrix.norm());
      conv.max_deviation = std::max(conv.max_deviation, conv_dev);

      CMat rho = C + C.adjoint();
      rho = rho * rho.adjoint();
      rho /= rho.trace().real();
      action.max_deviation = std::max(
          action.max_deviation,
          (L.matrix * vec(rho) - vec(U * rho * U.adjoint())).norm());

      const CVec v = vec(U);
      const CMat G = v * v.adjoint();
      ptrace.max_deviation = std::max(
          ptrace.max_deviation,
          std::max(
              (partial_trace_1(G) - (U.adjoint() * U).transpose()).norm(),
              (partial_trace_2(G) - CMat::Identity(d, d)).norm()) /
              std::sqrt(double(d)));

      // Negative control: the transposed convention must blow the conversion
      // identity apart for generic U. Track the *minimum* deviation so a
      // single conforming instance spoils the control.
      const LiouvilleMatrix wrong = liouville_of_unitary(U.transpose());
      const double wrong_dev =
          (choi_to_liouville(J).matrix - wrong.matrix).norm() /
          wrong.matrix.norm();
      control.max_deviation = k == 0 && d == 2
                                  ? wrong_dev
                                  : std::min(control.max_deviation, wrong_dev);
    }
  }

  pairing.passed = pairing.max_deviation < pairing.tolerance;
  conv.passed = conv.max_deviation < conv.tolerance;
  action.passed = action.max_deviation < action.tolerance;
  ptrace.passed = ptrace.max_deviation < ptrace.tolerance;
  control.passed = control.max_deviation > control.tolerance;

  report.checks = {pairing, conv, action, ptrace, control};
  report.all_passed = true;
  for (const IdentityCheck& c : report.checks) {
    report.all_passed = report.all_passed && c.passed;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Non-spikiness study

double clifford_group_log_size(int n) {
  // |C_n / U(1)| = 2^(n^2 + 2n) * prod_{j=1..n} (4^j - 1)
  double ln = (double(n) * n + 2.0 * n) * std::log(2.0);
  for (int j = 1; j <= n; ++j) ln += std::log(std::pow(4.0, j) - 1.0);
  return ln;
}

double stabilizer_state_log_count(int n) {
  // 2^n * prod_{j=1..n} (2^j + 1)
  double ln = n * std::log(2.0);
  for (int j = 1; j <= n; ++j) ln += std::log(std::pow(2.0, j) + 1.0);
  return ln;
}

std::string NonspikyStudyReport::to_json() const {
  json j;
  j["n"] = n;
  j["samples"] = samples;
  j["trials"] = trials;
  j["t"] = t;
  j["beta_bound"] = beta_bound;
  j["ln_group_size"] = ln_group_size;
  j["trials_within"] = trials_within;
  j["coverage"] = coverage;
  j["predicted_failure_rate"] = predicted_failure_rate;
  j["max_overlap_quantiles"] = {{"min", q_min}, {"q25", q25},   {"median", q50},
                                {"q75", q75},   {"max", q_max}};
  return j.dump(2);
}

NonspikyStudyReport run_nonspiky_study(int n, int samples, int trials,
                                       double t, std::uint64_t seed) {
  if (n < 1 || samples < 1 || trials < 1) {
    throw ValidationError("nonspiky study: n, samples, trials must be >= 1");
  }
  NonspikyStudyReport report;
  report.n = n;
  report.samples = samples;
  report.trials = trials;
  report.t = t;
  report.ln_group_size = clifford_group_log_size(n);
  report.beta_bound = nonspikiness_bound(t, report.ln_group_size);
  report.predicted_failure_rate = 4.0 * std::exp(-t);

  const int d = 1 << n;
  std::vector<double> maxima;
  maxima.reserve(trials);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(mix_seed(seed, {std::uint64_t(trial)}));
    const CMat U = sample_haar_unitary(d, rng);
    double peak = 0.0;
    for (int s = 0; s < samples; ++s) {
      const CMat C = sample_clifford(n, rng);
      peak = std::max(peak, std::norm((C.adjoint() * U).trace()));
    }
    maxima.push_back(peak);
    if (peak <= report.beta_bound) ++report.trials_within;
  }
  report.coverage = double(report.trials_within) / trials;
  std::sort(maxima.begin(), maxima.end());
  auto q = [&](double p) {
    const double idx = p * (maxima.size() - 1);
    const std::size_t lo = std::size_t(idx);
    const std::size_t hi = std::min(lo + 1, maxima.size() - 1);
    return maxima[lo] + (idx - lo) * (maxima[hi] - maxima[lo]);
  };
  report.q_min = maxima.front();
  report.q25 = q(0.25);
  report.q50 = q(0.5);
  report.q75 = q(0.75);
  report.q_max = maxima.back();
  return report;
}

// ---------------------------------------------------------------------------
// Vector-mode study

std::string VectorStudyResult::to_json() const {
  json j;
  j["n"] = n;
  j["rank"] = rank;
  j["beta"] = beta;
  json rs = json::array();
  for (const VectorStudyRow& r : rows) {
    rs.push_back({{"m", r.m},
                  {"error", r.error},
                  {"nuclear_norm", r.nuclear_norm},
                  {"iterations", r.iterations},
                  {"converged", r.converged},
                  {"infeasible", r.infeasible}});
  }
  j["rows"] = rs;
  return j.dump(2);
}

VectorStudyResult run_vector_mode_study(int n, int rank,
                                        const std::vector<int>& m_grid,
                                        std::uint64_t seed, double noise_sigma,
                                        double beta_override) {
  const int d = 1 << n;
  if (rank < 1 || rank > d) throw ValidationError("vector study: bad rank");
  if (m_grid.empty()) throw ValidationError("vector study: empty m grid");
  for (std::size_t i = 1; i < m_grid.size(); ++i) {
    if (m_grid[i] <= m_grid[i - 1]) {
      throw ValidationError("vector study: m grid must be increasing");
    }
  }

  VectorStudyResult result;
  result.n = n;
  result.rank = rank;
  result.beta =
      beta_override > 0.0
          ? beta_override
          : nonspikiness_bound_vector(3.0, stabilizer_state_log_count(n), rank);

  Rng rng(mix_seed(seed, {0xbeef}));
  const CMat Ux = sample_haar_unitary(d, rng);
  RVec w = RVec::Zero(d);
  for (int k = 0; k < rank; ++k) w(k) = 1.0 / rank;  // nuclear norm exactly 1
  const CMat X = Ux * w.asDiagonal() * Ux.adjoint();

  EnsembleSpec spec;
  spec.kind = EnsembleSpec::Kind::kStabilizerStates;
  spec.qubits = n;
  Rng ens_rng(mix_seed(seed, {0xcafe}));
  MeasurementEnsembleInstance ens;
  const NoiseModel noise = noise_sigma > 0 ? NoiseModel::gaussian(noise_sigma)
                                           : NoiseModel::none();
  SolverConfig cfg;
  for (int m : m_grid) {
    if (ens.m == 0) {
      ens = MeasurementEnsembleInstance::sample(spec, m, ens_rng);
    } else {
      ens.extend(m, ens_rng);
    }
    ProgramSpec prog;
    prog.mode = ProgramSpec::Mode::kVector;
    prog.ensemble = ens;
    prog.beta = result.beta;
    prog.record =
        measure(ens, X, noise, std::nullopt, mix_seed(seed, {std::uint64_t(m)}));
    const SolverResult res = solve(prog, cfg);
    cfg.warm_start = res.solution;
    cfg.warm_duals = res.dual_state;
    cfg.rho = res.rho_final;

    VectorStudyRow row;
    row.m = m;
    row.error = (res.solution - X).norm();
    const RVec ev = eigh(make_hermitian(res.solution)).eigenvalues;
    row.nuclear_norm = ev.cwiseAbs().sum();
    row.iterations = res.iterations;
    row.converged = res.converged;
    row.infeasible = res.infeasible;
    result.rows.push_back(row);
  }
  return result;
}

std::uint64_t resolve_master_seed(std::uint64_t configured) {
  const char* env = std::getenv("UNIPHASE_SEED");
  if (env == nullptr || *env == '\0') return configured;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw ValidationError("UNIPHASE_SEED must be a decimal integer");
  }
  return v;
}

}  // namespace uniphase
