// dmn: sampling, labeling, training and material-point evaluation of deep
// material networks.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmn/dataset.hpp"
#include "dmn/error.hpp"
#include "dmn/gsm.hpp"
#include "dmn/labeling.hpp"
#include "dmn/manifest.hpp"
#include "dmn/model.hpp"
#include "dmn/online.hpp"
#include "dmn/sampling.hpp"
#include "dmn/training.hpp"

namespace {

using nlohmann::json;

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kNumeric = 3, kIo = 4, kPrecondition = 5 };

int default_threads() {
  if (const char* env = std::getenv("DMN_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
    throw dmn::ConfigError(std::string("DMN_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

/// Every option of the subcommand with its effective value.
json effective_config(const CLI::App* sub) {
  json j = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string key = opt->get_single_name();
    if (key.empty() || key == "help" || key == "version") continue;
    const auto& res = opt->results();
    if (res.empty()) {
      j[key] = opt->get_default_str();
    } else if (res.size() == 1) {
      j[key] = res.front();
    } else {
      j[key] = res;
    }
  }
  return j;
}

void finish(dmn::RunManifest& m, const CLI::App* sub, const dmn::WallClock& clock, const std::string& primary) {
  m.config = effective_config(sub);
  m.wall_seconds = clock.seconds();
  dmn::write_manifest(m, dmn::manifest_path_for(primary));
}

struct PhasePair {
  dmn::GsmSpec fiber = dmn::glass_fiber();
  dmn::GsmSpec matrix = dmn::polyamide_matrix();
};

/// {"phase1": {...}, "phase2": {...}}; phase 1 is the fiber, phase 2 the matrix.
PhasePair read_phases(const std::string& path) {
  PhasePair pp;
  if (path.empty()) return pp;
  json j;
  try {
    j = json::parse(dmn::read_file(path));
  } catch (const json::exception& e) {
    throw dmn::ConfigError("phases file " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("phase1") || !j.contains("phase2")) {
    throw dmn::ConfigError("phases file " + path + ": expected keys 'phase1' and 'phase2'");
  }
  pp.fiber = dmn::gsm_from_json_text(j["phase1"].dump());
  pp.matrix = dmn::gsm_from_json_text(j["phase2"].dump());
  return pp;
}

dmn::OrientationPoint orientation_arg(const std::vector<double>& v) {
  if (v.size() != 2) throw dmn::ConfigError("--orientation expects two values");
  try {
    return dmn::checked_orientation({v[0], v[1]});
  } catch (const dmn::PreconditionError& e) {
    throw dmn::ConfigError(e.what());
  }
}

std::vector<dmn::LoadStep> load_path(const std::string& spec, double amplitude, int steps) {
  if (spec.rfind("uniaxial-", 0) == 0) {
    const std::string ij = spec.substr(9);
    if (ij.size() != 2 || ij[0] < '1' || ij[0] > '3' || ij[1] < '1' || ij[1] > '3') {
      throw dmn::ConfigError("unknown load path '" + spec + "' (uniaxial-ij with i, j in 1..3)");
    }
    if (steps <= 0 || steps % 4 != 0) throw dmn::ConfigError("--steps must be a positive multiple of 4");
    return dmn::uniaxial_hysteresis(ij[0] - '1', ij[1] - '1', amplitude, steps);
  }
  return dmn::read_strain_schedule_csv(dmn::read_file(spec));
}

std::string coverage_summary(const std::vector<dmn::StiffnessSample>& samples, const dmn::TriangleDiscretization& d) {
  std::ostringstream os;
  os << samples.size() << " samples on " << d.points.size() << " orientations (" << d.name << ")\n";
  std::vector<int> per_point(d.points.size(), 0);
  for (std::size_t s = 0; s < samples.size(); ++s) ++per_point[s % d.points.size()];
  for (std::size_t j = 0; j < d.points.size(); ++j) {
    os << "  (" << d.points[j].l1 << ", " << d.points[j].l2 << "): " << per_point[j] << '\n';
  }
  static const char* names[9] = {"K1", "G1", "K2", "G2", "a", "beta", "theta", "psi", "phi"};
  for (int k = 0; k < 9; ++k) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : samples) {
      lo = std::min(lo, s.params[k]);
      hi = std::max(hi, s.params[k]);
    }
    os << "  " << names[k] << " in [" << lo << ", " << hi << "]\n";
  }
  return os.str();
}

// --- commands --------------------------------------------------------------------

struct SampleArgs {
  int count = 0;
  std::string discretization = "d4";
  std::uint64_t seed = 0;
  bool desk = false;
  std::string out;
};

void run_sample(const SampleArgs& a, const CLI::App* sub) {
  dmn::WallClock clock;
  const dmn::TriangleDiscretization disc = dmn::triangle_discretization(a.discretization);
  const int count = a.count > 0 ? a.count : dmn::default_sample_count(a.discretization, a.desk);
  dmn::Dataset d;
  d.seed = a.seed;
  d.discretization = disc.name;
  d.samples = dmn::sample_stiffness_pairs(count, a.seed, disc);
  d.provenance = json{{"command", "sample"}, {"manifest", dmn::manifest_path_for(a.out)}}.dump();
  dmn::save_dataset(d, a.out);
  std::cout << coverage_summary(d.samples, disc);

  dmn::RunManifest m;
  m.command = "sample";
  m.seeds = {a.seed};
  m.outputs = {a.out};
  m.results = {{"count", count}};
  finish(m, sub, clock, a.out);
}

struct LabelArgs {
  std::string dataset;
  std::string labeler = "fft";
  int grid = 32;
  int threads = 1;
  std::string out;
  std::string target_model;
  int target_depth = 3;
  std::uint64_t target_seed = 1;
  std::uint64_t seed = 0;
  double fft_tolerance = 1e-8;
  double fiber_fraction = 0.16;
  double fiber_length = 10.0;
  double fiber_diameter = 2.0;
};

void run_label(const LabelArgs& a, const CLI::App* sub) {
  dmn::WallClock clock;
  dmn::Dataset d = dmn::load_dataset(a.dataset);
  const std::size_t n_in = d.samples.size();
  dmn::RunManifest m;
  m.command = "label";
  m.inputs = {a.dataset};
  m.outputs = {a.out};
  m.threads = a.threads;
  json prov = {{"command", "label"}, {"labeler", a.labeler}, {"manifest", dmn::manifest_path_for(a.out)}};

  if (a.labeler == "target-dmn") {
    dmn::DmnModel target;
    if (!a.target_model.empty()) {
      target = dmn::load_model_file(a.target_model);
      m.inputs.push_back(a.target_model);
    } else {
      std::mt19937_64 rng(a.target_seed);
      target = dmn::DmnModel::random(a.target_depth, dmn::InterpKind::Linear, rng);
      dmn::normalize_weights(target);
      target.meta["target_seed"] = std::to_string(a.target_seed);
      const std::string path = a.out + ".target.json";
      dmn::save_model_file(target, path);
      m.outputs.push_back(path);
      m.seeds.push_back(a.target_seed);
    }
    dmn::label_with_model(target, d.samples);
    prov["target_depth"] = target.depth;
  } else if (a.labeler == "fft") {
    dmn::LabelConfig cfg;
    cfg.generator.grid = {a.grid, a.grid, a.grid};
    cfg.generator.fiber_fraction = a.fiber_fraction;
    cfg.generator.fiber_length = a.fiber_length;
    cfg.generator.fiber_diameter = a.fiber_diameter;
    cfg.fft.tolerance = a.fft_tolerance;
    cfg.threads = a.threads;
    cfg.seed = a.seed;
    const dmn::LabelReport rep = dmn::build_training_labels(dmn::triangle_discretization(d.discretization),
                                                            d.samples, cfg);
    json ms = json::array();
    for (std::size_t j = 0; j < rep.microstructures.size(); ++j) {
      const auto& v = rep.microstructures[j];
      const dmn::OrientationPoint r = v.realized_point();
      ms.push_back({{"target", {rep.generated_targets[j].l1, rep.generated_targets[j].l2}},
                    {"realized", {r.l1, r.l2}},
                    {"fiber_fraction", v.fiber_fraction},
                    {"fiber_count", v.fiber_count},
                    {"seed", v.seed}});
    }
    prov["grid"] = a.grid;
    prov["microstructures"] = ms;
    m.seeds.push_back(a.seed);
    m.results["max_cg_iterations"] = rep.max_iterations;
    m.results["max_asymmetry"] = rep.max_asymmetry;
    m.results["dropped"] = rep.dropped;
    for (const auto& msg : rep.messages) std::cerr << "dropped " << msg << '\n';
  } else {
    throw dmn::ConfigError("unknown labeler '" + a.labeler + "' (fft or target-dmn)");
  }
  d.provenance = prov.dump();
  dmn::save_dataset(d, a.out);
  std::cout << "labeled " << d.samples.size() << " of " << n_in << " samples\n";
  m.results["labeled"] = d.samples.size();
  finish(m, sub, clock, a.out);
}

struct TrainArgs {
  std::string dataset;
  int depth = 8;
  std::string interp = "linear";
  int epochs = 3000;
  std::uint64_t seed = 0;
  std::int64_t init_seed = -1;
  int batch_size = 32;
  double lr_min = 1.5e-3;
  double lr_max = 1.5e-2;
  double penalty = 1e3;
  double loss_q = 10.0;
  std::string out_model;
  std::string out_history;
  bool quiet = false;
};

bool print_epoch(const dmn::EpochRecord& r, void* user) {
  const int every = *static_cast<int*>(user);
  if (every > 0 && (r.epoch + 1) % every == 0) {
    std::cout << "epoch " << r.epoch + 1 << " loss " << r.loss << " e_mean_train " << r.e_mean_train
              << " e_mean_val " << r.e_mean_val << std::endl;
  }
  return true;
}

void run_train(const TrainArgs& a, const CLI::App* sub) {
  dmn::WallClock clock;
  dmn::TrainConfig cfg;
  cfg.depth = a.depth;
  try {
    cfg.interp = dmn::parse_interp_kind(a.interp);
  } catch (const dmn::Error& e) {
    throw dmn::ConfigError(e.what());
  }
  cfg.epochs = a.epochs;
  cfg.seed = a.seed;
  cfg.batch_size = a.batch_size;
  cfg.lr_min = a.lr_min;
  cfg.lr_max = a.lr_max;
  cfg.penalty = a.penalty;
  cfg.loss_q = a.loss_q;
  cfg.validate();
  const dmn::Dataset d = dmn::load_dataset(a.dataset);
  if (!d.labeled()) throw dmn::ConfigError("dataset " + a.dataset + " carries no labels");
  const std::uint64_t init_seed = a.init_seed >= 0 ? static_cast<std::uint64_t>(a.init_seed) : a.seed;
  int every = a.quiet ? 0 : std::max(1, a.epochs / 20);
  const dmn::TrainResult r = dmn::train(cfg, d.samples, init_seed, print_epoch, &every);
  dmn::DmnModel model = r.model;
  model.meta["manifest"] = dmn::manifest_path_for(a.out_model);
  model.meta["dataset"] = a.dataset;
  dmn::save_model_file(model, a.out_model);
  dmn::RunManifest m;
  m.command = "train";
  m.seeds = {a.seed, init_seed};
  m.inputs = {a.dataset};
  m.outputs = {a.out_model};
  if (!a.out_history.empty()) {
    dmn::write_file(a.out_history, dmn::history_to_csv(r.history));
    m.outputs.push_back(a.out_history);
  }
  const dmn::EpochRecord& last = r.history.back();
  std::cout << "final e_mean_train " << last.e_mean_train << " e_mean_val " << last.e_mean_val << " e_max_val "
            << last.e_max_val << '\n';
  m.results = {{"e_mean_train", last.e_mean_train},
               {"e_max_train", last.e_max_train},
               {"e_mean_val", last.e_mean_val},
               {"e_max_val", last.e_max_val},
               {"epochs_run", r.history.size()}};
  finish(m, sub, clock, a.out_model);
}

struct DriveArgs {
  std::string model;
  std::vector<double> orientation{1.0 / 3.0, 1.0 / 3.0};
  std::string phases;
  std::string path = "uniaxial-11";
  double amplitude = 0.025;
  int steps = 80;
  std::string out;
  bool uncompressed = false;
};

dmn::PathResult drive(const DriveArgs& a, const std::vector<dmn::LoadStep>& schedule) {
  const dmn::DmnModel model = dmn::load_model_file(a.model);
  const PhasePair pp = read_phases(a.phases);
  const auto ctx = dmn::assemble_context(model, orientation_arg(a.orientation), pp.fiber, pp.matrix, !a.uncompressed);
  return dmn::drive_path(ctx, schedule);
}

void run_drive(const DriveArgs& a, const CLI::App* sub) {
  dmn::WallClock clock;
  const dmn::PathResult r = drive(a, load_path(a.path, a.amplitude, a.steps));
  dmn::write_file(a.out, dmn::path_to_csv(r));
  int max_it = 0;
  for (const auto& s : r.steps) max_it = std::max(max_it, s.iterations);
  dmn::RunManifest m;
  m.command = "drive";
  m.inputs = {a.model};
  if (!a.phases.empty()) m.inputs.push_back(a.phases);
  m.outputs = {a.out};
  m.results = {{"steps", r.steps.size() - 1},
               {"max_newton_iterations", max_it},
               {"dissipation", dmn::path_dissipation(r)}};
  finish(m, sub, clock, a.out);
}

struct ValidateArgs {
  DriveArgs drive;
  std::string reference_csv;
  std::string dmn_csv;
  std::string out_report;
};

void run_validate(const ValidateArgs& a, const CLI::App* sub) {
  dmn::WallClock clock;
  const dmn::StressPath ref = dmn::read_stress_csv(dmn::read_file(a.reference_csv));
  std::vector<dmn::SymMat> dmn_stress;
  dmn::RunManifest m;
  m.command = "validate";
  m.inputs = {a.reference_csv};
  if (!a.dmn_csv.empty()) {
    const dmn::StressPath p = dmn::read_stress_csv(dmn::read_file(a.dmn_csv));
    if (p.times.size() != ref.times.size()) throw dmn::ConfigError("validate: paths have different lengths");
    dmn_stress = p.stresses;
    m.inputs.push_back(a.dmn_csv);
  } else if (!a.drive.model.empty()) {
    if (ref.strains.empty()) throw dmn::ConfigError("validate: reference CSV lacks strain columns");
    std::vector<dmn::LoadStep> schedule;
    double t_prev = 0.0;
    for (std::size_t k = 0; k < ref.times.size(); ++k) {
      schedule.push_back({ref.strains[k], ref.times[k] - t_prev});
      t_prev = ref.times[k];
    }
    const dmn::PathResult r = drive(a.drive, schedule);
    for (std::size_t k = 1; k < r.steps.size(); ++k) dmn_stress.push_back(r.steps[k].stress);
    m.inputs.push_back(a.drive.model);
  } else {
    throw dmn::ConfigError("validate: need --model or --dmn-csv");
  }
  const dmn::ValidationMetrics v = dmn::validation_metrics(ref.times, dmn_stress, ref.stresses);
  const json report = {{"eta_mean", v.eta_mean}, {"eta_max", v.eta_max}, {"steps", ref.times.size()},
                       {"manifest", dmn::manifest_path_for(a.out_report)}};
  dmn::write_file(a.out_report, report.dump(2) + "\n");
  std::cout << "eta_mean " << v.eta_mean << " eta_max " << v.eta_max << '\n';
  m.outputs = {a.out_report};
  m.results = report;
  finish(m, sub, clock, a.out_report);
}

struct BenchArgs {
  std::string model;
  std::vector<double> orientation{1.0 / 3.0, 1.0 / 3.0};
  std::string phases;
  int repeats = 200;
  double amplitude = 0.025;
  std::string out;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void run_bench(const BenchArgs& a, const CLI::App* sub) {
  dmn::WallClock clock;
  if (a.repeats < 1) throw dmn::ConfigError("--repeats must be at least 1");
  const dmn::DmnModel model = dmn::load_model_file(a.model);
  const PhasePair pp = read_phases(a.phases);
  const auto ctx = dmn::assemble_context(model, orientation_arg(a.orientation), pp.fiber, pp.matrix);
  const auto schedule = dmn::uniaxial_hysteresis(0, 0, a.amplitude, 80);

  std::vector<double> per_step;
  int newton = 0;
  for (int r = 0; r < a.repeats; ++r) {
    dmn::MaterialPointState state = dmn::MaterialPointState::initial(ctx);
    const dmn::WallClock t;
    for (const auto& step : schedule) {
      dmn::StepResult s = dmn::solve_step(ctx, state, step.strain, step.dt);
      newton += s.iterations;
      state = std::move(s.state);
    }
    per_step.push_back(t.seconds() / schedule.size());
  }
  const double med = median(per_step);
  // Bootstrap spread of the median.
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<std::size_t> pick(0, per_step.size() - 1);
  std::vector<double> meds;
  for (int b = 0; b < 200; ++b) {
    std::vector<double> re(per_step.size());
    for (double& x : re) x = per_step[pick(rng)];
    meds.push_back(median(re));
  }
  const double mean = std::accumulate(meds.begin(), meds.end(), 0.0) / meds.size();
  double var = 0.0;
  for (double x : meds) var += (x - mean) * (x - mean);
  const double rel_std = std::sqrt(var / meds.size()) / med;

  const json report = {{"median_step_ms", 1e3 * med},
                       {"median_rel_std", rel_std},
                       {"repeats", a.repeats},
                       {"steps_per_repeat", schedule.size()},
                       {"mean_newton_iterations", double(newton) / (a.repeats * schedule.size())},
                       {"laminates", ctx.nodes.size()},
                       {"leaves", ctx.leaves.size()}};
  std::cout << report.dump(2) << '\n';
  dmn::RunManifest m;
  m.command = "bench";
  m.inputs = {a.model};
  m.results = report;
  const std::string primary = a.out.empty() ? a.model + ".bench.json" : a.out;
  dmn::write_file(primary, report.dump(2) + "\n");
  m.outputs = {primary};
  finish(m, sub, clock, primary);
}

int exit_code(const dmn::Error& e) {
  switch (e.kind()) {
    case dmn::ErrorKind::Config: return kConfig;
    case dmn::ErrorKind::Numeric: return kNumeric;
    case dmn::ErrorKind::Io: return kIo;
    case dmn::ErrorKind::Precondition: return kPrecondition;
  }
  return kOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep material networks for short-fiber composites"};
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);
  app.set_version_flag("--version", dmn::kToolVersion);

  int threads = 1;
  try {
    threads = default_threads();
  } catch (const dmn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Quasi-random phase stiffness pairs on a triangle discretization");
  sample->add_option("--count", sa.count, "Number of samples (default: preset for the discretization)");
  sample->add_option("--discretization", sa.discretization, "d4, d10 or d31")->capture_default_str();
  sample->add_option("--seed", sa.seed, "Sobol scrambling seed (0: unscrambled)")->capture_default_str();
  sample->add_flag("--desk", sa.desk, "Use the reduced desk-scale preset count");
  sample->add_option("--out", sa.out, "Output dataset")->required();

  LabelArgs la;
  la.threads = threads;
  auto* label = app.add_subcommand("label", "Attach effective stiffness labels to a dataset");
  label->add_option("--dataset", la.dataset, "Input dataset")->required();
  label->add_option("--labeler", la.labeler, "fft or target-dmn")->capture_default_str();
  label->add_option("--grid", la.grid, "Voxels per edge of the FFT grid")->capture_default_str();
  label->add_option("--threads", la.threads, "Worker threads (default: DMN_THREADS or 1)")->capture_default_str();
  label->add_option("--out", la.out, "Output dataset")->required();
  label->add_option("--target-model", la.target_model, "Model file used by the target-dmn labeler");
  label->add_option("--target-depth", la.target_depth, "Depth of a random target (no --target-model)")
      ->capture_default_str();
  label->add_option("--target-seed", la.target_seed, "Seed of a random target")->capture_default_str();
  label->add_option("--seed", la.seed, "Microstructure generator seed")->capture_default_str();
  label->add_option("--fft-tolerance", la.fft_tolerance, "CG relative residual")->capture_default_str();
  label->add_option("--fiber-fraction", la.fiber_fraction)->capture_default_str();
  label->add_option("--fiber-length", la.fiber_length, "[voxels]")->capture_default_str();
  label->add_option("--fiber-diameter", la.fiber_diameter, "[voxels]")->capture_default_str();

  TrainArgs ta;
  auto* trainc = app.add_subcommand("train", "Fit a network to a labeled dataset");
  trainc->add_option("--dataset", ta.dataset, "Labeled dataset")->required();
  trainc->add_option("--depth", ta.depth)->capture_default_str();
  trainc->add_option("--interp", ta.interp, "linear, trilinear or quadratic")->capture_default_str();
  trainc->add_option("--epochs", ta.epochs)->capture_default_str();
  trainc->add_option("--seed", ta.seed, "Split and batch seed")->capture_default_str();
  trainc->add_option("--init-seed", ta.init_seed, "Initialization seed (default: --seed)");
  trainc->add_option("--batch-size", ta.batch_size)->capture_default_str();
  trainc->add_option("--lr-min", ta.lr_min)->capture_default_str();
  trainc->add_option("--lr-max", ta.lr_max)->capture_default_str();
  trainc->add_option("--penalty", ta.penalty)->capture_default_str();
  trainc->add_option("--loss-q", ta.loss_q, "Exponent aggregating the sample errors of a batch")->capture_default_str();
  trainc->add_option("--out-model", ta.out_model)->required();
  trainc->add_option("--out-history", ta.out_history, "Per-epoch CSV");
  trainc->add_flag("--quiet", ta.quiet);

  DriveArgs da;
  auto* drivec = app.add_subcommand("drive", "Evaluate a model along a strain path");
  drivec->add_option("--model", da.model)->required();
  drivec->add_option("--orientation", da.orientation, "lambda1 lambda2")->expected(2)->capture_default_str();
  drivec->add_option("--phases", da.phases, "JSON with phase1 (fiber) and phase2 (matrix) laws");
  drivec->add_option("--path", da.path, "uniaxial-ij or a strain CSV (t, E11..E12)")->capture_default_str();
  drivec->add_option("--amplitude", da.amplitude)->capture_default_str();
  drivec->add_option("--steps", da.steps)->capture_default_str();
  drivec->add_option("--out", da.out, "Stress CSV")->required();
  drivec->add_flag("--uncompressed", da.uncompressed, "Keep zero-weight branches");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Error metrics of a model against a reference stress path");
  validate->add_option("--model", va.drive.model, "Model driven along the reference strain path");
  validate->add_option("--dmn-csv", va.dmn_csv, "Precomputed stress path instead of --model");
  validate->add_option("--orientation", va.drive.orientation)->expected(2)->capture_default_str();
  validate->add_option("--phases", va.drive.phases);
  validate->add_option("--reference-csv", va.reference_csv)->required();
  validate->add_option("--out-report", va.out_report)->required();

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Wall time of single material-point steps");
  bench->add_option("--model", ba.model)->required();
  bench->add_option("--orientation", ba.orientation)->expected(2)->capture_default_str();
  bench->add_option("--phases", ba.phases);
  bench->add_option("--repeats", ba.repeats)->capture_default_str();
  bench->add_option("--amplitude", ba.amplitude)->capture_default_str();
  bench->add_option("--out", ba.out, "Report JSON (default: <model>.bench.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*sample) run_sample(sa, sample);
    if (*label) run_label(la, label);
    if (*trainc) run_train(ta, trainc);
    if (*drivec) run_drive(da, drivec);
    if (*validate) run_validate(va, validate);
    if (*bench) run_bench(ba, bench);
  } catch (const dmn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
