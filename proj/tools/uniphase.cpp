// Command-line front end: phase-transition sweeps, single-instance recovery,
// identity/design verification, non-spikiness and vector-mode studies, and
// figure emission.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "uniphase/experiments.hpp"
#include "uniphase/recovery.hpp"

using namespace uniphase;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ValidationError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out.good()) throw ResourceError("cannot open output: " + path);
  out << text;
}

// "haar-unitary:4", "clifford:2" (qubits), "stabilizer-states:3"
EnsembleSpec parse_ensemble(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("ensemble spec must look like kind:size");
  }
  EnsembleSpec spec;
  spec.kind = ensemble_kind_from_name(text.substr(0, colon));
  const int size = std::stoi(text.substr(colon + 1));
  if (spec.kind == EnsembleSpec::Kind::kHaarUnitary ||
      spec.kind == EnsembleSpec::Kind::kHaarSphere) {
    spec.dim = size;
  } else {
    spec.qubits = size;
  }
  return spec;
}

CMat load_signal(const std::string& arg, int* d_out, std::uint64_t seed) {
  if (arg.rfind("random:", 0) == 0) {
    const int d = std::stoi(arg.substr(7));
    Rng rng(mix_seed(seed, {0x51u}));
    *d_out = d;
    return sample_haar_unitary(d, rng);
  }
  // File with one whitespace-separated complex entry pair (re im) per
  // element, row-major, first line the dimension.
  std::ifstream in(arg);
  if (!in.good()) throw ValidationError("cannot open signal file: " + arg);
  int d = 0;
  in >> d;
  if (d < 2) throw ValidationError("signal file: bad dimension");
  CMat U(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double re = 0, im = 0;
      in >> re >> im;
      U(i, j) = Complex(re, im);
    }
  }
  if (!in) throw ValidationError("signal file: truncated");
  if (!is_unitary(U, 1e-8)) throw ValidationError("signal file: not unitary");
  *d_out = d;
  return U;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phaseless unitary reconstruction toolkit"};
  app.require_subcommand(1);

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "phase-transition sweep over (d, m)");
  std::string sweep_config, sweep_out = ".";
  bool sweep_resume = false;
  sweep->add_option("--config", sweep_config, "key=value grid config file");
  sweep->add_option("--out", sweep_out, "output directory")->required();
  sweep->add_flag("--resume", sweep_resume, "continue an interrupted sweep");

  // --- recover ---
  auto* rec = app.add_subcommand("recover", "single-instance reconstruction");
  std::string rec_signal, rec_ensemble = "haar-unitary:4", rec_out;
  std::string rec_noise;
  int rec_m = 0;
  long rec_shots = 0;
  std::uint64_t rec_seed = 1;
  rec->add_option("--signal", rec_signal, "file or random:d")->required();
  rec->add_option("--ensemble", rec_ensemble, "ensemble spec kind:size");
  rec->add_option("--m", rec_m, "number of measurements")->required();
  rec->add_option("--noise", rec_noise, "gaussian:sigma");
  rec->add_option("--shots", rec_shots, "finite shots per measurement");
  rec->add_option("--seed", rec_seed, "master seed");
  rec->add_option("--out", rec_out, "output JSON path")->required();

  // --- verify ---
  auto* verify = app.add_subcommand("verify", "identity / design verification");
  std::string verify_what, verify_spec;
  int verify_t = 2;
  long verify_samples = 100000;
  std::uint64_t verify_seed = 1;
  verify->add_option("what", verify_what, "identities | design")->required();
  verify->add_option("--spec", verify_spec, "ensemble spec JSON file (design)");
  verify->add_option("--t", verify_t, "design order");
  verify->add_option("--samples", verify_samples, "Monte Carlo samples");
  verify->add_option("--seed", verify_seed, "master seed");

  // --- nonspiky ---
  auto* ns = app.add_subcommand("nonspiky", "spikiness of Haar signals vs Cliffords");
  int ns_n = 2, ns_samples = 1000, ns_trials = 20;
  double ns_t = 3.0;
  std::uint64_t ns_seed = 1;
  ns->add_option("--n", ns_n, "qubits")->required();
  ns->add_option("--samples", ns_samples, "Clifford samples per trial")->required();
  ns->add_option("--trials", ns_trials, "trials")->required();
  ns->add_option("--t", ns_t, "concentration parameter t");
  ns->add_option("--seed", ns_seed, "master seed");

  // --- vector-study ---
  auto* vs = app.add_subcommand("vector-study",
                                "low-rank recovery from stabilizer states");
  int vs_n = 2, vs_rank = 1;
  std::string vs_mgrid;
  double vs_sigma = 0.0, vs_beta = 0.0;
  std::uint64_t vs_seed = 1;
  vs->add_option("--n", vs_n, "qubits")->required();
  vs->add_option("--rank", vs_rank, "signal rank")->required();
  vs->add_option("--m-grid", vs_mgrid, "comma-separated m values")->required();
  vs->add_option("--noise-sigma", vs_sigma, "gaussian noise sigma");
  vs->add_option("--beta", vs_beta, "override the non-spikiness level");
  vs->add_option("--seed", vs_seed, "master seed");

  // --- heatmap ---
  auto* hm = app.add_subcommand("heatmap", "render a sweep table as SVG");
  std::string hm_table, hm_out;
  hm->add_option("--table", hm_table, "TrialRow CSV")->required();
  hm->add_option("--out", hm_out, "output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      ExperimentGrid grid;
      if (!sweep_config.empty()) {
        grid = ExperimentGrid::from_config(read_file(sweep_config));
      }
      grid.master_seed = resolve_master_seed(grid.master_seed);
      const std::string csv = sweep_out + "/sweep.csv";
      const SweepResult result = run_sweep(grid, csv, sweep_resume);
      write_file(sweep_out + "/summary.json", result.summary.to_json());
      emit_heatmap(result.rows, sweep_out + "/heatmap.svg");
      std::cout << result.summary.to_json() << std::endl;
    } else if (*rec) {
      rec_seed = resolve_master_seed(rec_seed);
      int d = 0;
      const CMat U = load_signal(rec_signal, &d, rec_seed);
      EnsembleSpec spec = parse_ensemble(rec_ensemble);
      if (spec.dimension() != d) {
        throw ValidationError("ensemble dimension does not match the signal");
      }
      Rng rng(mix_seed(rec_seed, {0xe5u}));
      ProgramSpec prog;
      prog.mode = ProgramSpec::Mode::kUnitary;
      prog.ensemble = MeasurementEnsembleInstance::sample(spec, rec_m, rng);
      NoiseModel noise = NoiseModel::none();
      if (!rec_noise.empty()) {
        if (rec_noise.rfind("gaussian:", 0) != 0) {
          throw ValidationError("noise must look like gaussian:sigma");
        }
        noise = NoiseModel::gaussian(std::stod(rec_noise.substr(9)));
      }
      std::optional<long> shots;
      if (rec_shots > 0) shots = rec_shots;
      prog.record = measure(prog.ensemble, U, noise, shots,
                            mix_seed(rec_seed, {0x0eu}));
      const SolverResult res = solve(prog, SolverConfig{});
      const RecoveryOutcome outcome = recover(res.solution, U);
      std::ostringstream out;
      out << "{\n  \"solver\": " << res.to_json()
          << ",\n  \"recovery\": " << outcome.to_json() << "\n}\n";
      write_file(rec_out, out.str());
      std::cout << outcome.to_json() << std::endl;
    } else if (*verify) {
      verify_seed = resolve_master_seed(verify_seed);
      if (verify_what == "identities") {
        const IdentityReport report = verify_identities(verify_seed);
        std::cout << report.to_json() << std::endl;
        return report.all_passed ? 0 : 1;
      } else if (verify_what == "design") {
        if (verify_spec.empty()) {
          throw ValidationError("verify design needs --spec");
        }
        const EnsembleSpec spec = EnsembleSpec::from_json(read_file(verify_spec));
        const DesignReport report =
            certify_design(spec, verify_t, 1e-10, verify_samples);
        std::cout << report.to_json() << std::endl;
        return report.is_design ? 0 : 1;
      }
      throw ValidationError("verify expects 'identities' or 'design'");
    } else if (*ns) {
      ns_seed = resolve_master_seed(ns_seed);
      const NonspikyStudyReport report =
          run_nonspiky_study(ns_n, ns_samples, ns_trials, ns_t, ns_seed);
      std::cout << report.to_json() << std::endl;
    } else if (*vs) {
      vs_seed = resolve_master_seed(vs_seed);
      std::vector<int> m_grid;
      std::istringstream ms(vs_mgrid);
      std::string tok;
      while (std::getline(ms, tok, ',')) m_grid.push_back(std::stoi(tok));
      const VectorStudyResult result = run_vector_mode_study(
          vs_n, vs_rank, m_grid, vs_seed, vs_sigma, vs_beta);
      std::cout << result.to_json() << std::endl;
    } else if (*hm) {
      emit_heatmap(read_trial_csv(hm_table), hm_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
