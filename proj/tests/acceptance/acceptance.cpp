// Acceptance gate: one PASS/FAIL line per criterion. Arguments select
// criteria by number (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dmn/fft.hpp"
#include "dmn/labeling.hpp"
#include "dmn/laminate.hpp"
#include "dmn/microstructure.hpp"
#include "dmn/model.hpp"
#include "dmn/online.hpp"
#include "dmn/sampling.hpp"
#include "dmn/training.hpp"
#include "oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::array<double, 3> arr(const dmn::Vec3& v) { return {v[0], v[1], v[2]}; }

const std::array<std::array<int, 2>, 6> kDirections{{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

dmn::GsmSpec elastic_matrix() { return dmn::GsmSpec::elastic(2100.0, 0.3); }

// 1 ----------------------------------------------------------------------------
Outcome laminate_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> frac(0.05, 0.95), lg(2.0, 5.0);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const double ka = std::pow(10.0, lg(rng)), ga = std::pow(10.0, lg(rng));
    const double kb = std::pow(10.0, lg(rng)), gb = std::pow(10.0, lg(rng));
    const double c = frac(rng);
    for (int axis = 0; axis < 3; ++axis) {
      std::array<double, 3> n{0.0, 0.0, 0.0};
      n[axis] = 1.0;
      const auto ref = oracle::to_six(oracle::laminate(oracle::isotropic(ka, ga), oracle::isotropic(kb, gb), c, n));
      dmn::LaminateInput in{oracle::to_six(oracle::isotropic(ka, ga)), oracle::to_six(oracle::isotropic(kb, gb)), c,
                            dmn::Vec3(n[0], n[1], n[2])};
      worst = std::max(worst, oracle::rel_frobenius(dmn::laminate_stiffness(in), ref));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-8 && t < 1.0, fmt("max rel error %.3e", worst) + fmt(", %.3f s", t)};
}

// 2 ----------------------------------------------------------------------------
Outcome fft_vs_laminate() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const dmn::Stiffness c_fiber = oracle::random_isotropic(rng), c_matrix = oracle::random_isotropic(rng);
    for (int axis = 0; axis < 3; ++axis) {
      std::array<int, 3> dims{1, 1, 1};
      dims[axis] = 2;
      const auto ms = dmn::layered_microstructure(dims, axis, 1);
      dmn::FftSolveConfig cfg;
      cfg.tolerance = 1e-12;
      const auto fft = dmn::effective_stiffness_fft(ms, c_matrix, c_fiber, cfg);
      dmn::Vec3 n = dmn::Vec3::Zero();
      n[axis] = 1.0;
      const auto lam = dmn::laminate_stiffness({c_fiber, c_matrix, 0.5, n});
      worst = std::max(worst, oracle::rel_frobenius(fft.stiffness, lam));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-8 && t < 10.0, fmt("max rel error %.3e", worst) + fmt(", %.3f s", t)};
}

// 3 ----------------------------------------------------------------------------
Outcome gradient_check() {
  const auto t0 = Clock::now();
  const auto disc = dmn::triangle_discretization("d10");
  auto samples = dmn::sample_stiffness_pairs(40, 3, disc);
  dmn::label_with_model(oracle::random_model(3, dmn::InterpKind::Quadratic, 77), samples);
  const dmn::Batch batch = dmn::make_batch(samples);
  dmn::TrainConfig cfg;
  cfg.depth = 3;
  cfg.interp = dmn::InterpKind::Quadratic;
  double worst = 0.0;
  for (int point = 0; point < 10; ++point) {
    dmn::DmnModel m = oracle::random_model(3, cfg.interp, 1000 + point);
    // Unnormalised weights exercise the penalty term.
    m.v *= 1.0 + 0.1 * point;
    const Eigen::VectorXd g = dmn::flatten_gradients(dmn::loss_gradients(m, batch, cfg).grad);
    const Eigen::VectorXd x = dmn::flatten_parameters(m);
    Eigen::VectorXd fd(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      dmn::DmnModel mp = m, mm = m;
      Eigen::VectorXd xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      dmn::unflatten_parameters(xp, mp);
      dmn::unflatten_parameters(xm, mm);
      fd[k] = (dmn::loss(mp, batch, cfg).total - dmn::loss(mm, batch, cfg).total) / (2.0 * h);
    }
    worst = std::max(worst, (g - fd).norm() / fd.norm());
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-4 && t < 30.0, fmt("max rel gradient error %.3e", worst) + fmt(", %.1f s", t)};
}

// 4 ----------------------------------------------------------------------------
Outcome identifiability() {
  const auto t0 = Clock::now();
  auto samples = dmn::sample_stiffness_pairs(400, 11, dmn::triangle_discretization("d4"));
  const dmn::DmnModel target = oracle::random_model(3, dmn::InterpKind::Linear, 2024);
  dmn::label_with_model(target, samples);
  dmn::TrainConfig cfg;
  cfg.depth = 3;
  cfg.epochs = 3000;
  cfg.seed = 5;
  const dmn::TrainResult r = dmn::train(cfg, samples, 6);
  double best = 1.0;
  int first = -1;
  for (const auto& e : r.history) {
    best = std::min(best, e.e_mean_val);
    if (first < 0 && e.e_mean_val < 0.01) first = e.epoch + 1;
  }
  const double final_val = r.history.back().e_mean_val;
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << fmt("final e_mean_val %.4f%%", 100.0 * final_val) << fmt(", best %.4f%%", 100.0 * best)
     << ", first below 1% at epoch " << first << fmt(", %.0f s", t);
  return {final_val < 0.01 && t < 600.0, os.str()};
}

// 5 ----------------------------------------------------------------------------
Outcome desk_end_to_end() {
  const auto t0 = Clock::now();
  const auto disc = dmn::triangle_discretization("d4");
  auto samples = dmn::sample_stiffness_pairs(dmn::default_sample_count("d4", true), 1, disc);
  dmn::LabelConfig lc;
  lc.generator.grid = {32, 32, 32};
  lc.seed = 1;
  if (const char* env = std::getenv("DMN_THREADS")) lc.threads = std::max(1, std::atoi(env));
  const dmn::LabelReport rep = dmn::build_training_labels(disc, samples, lc);
  const double t_label = seconds_since(t0);
  dmn::TrainConfig cfg;
  cfg.depth = 5;
  cfg.interp = dmn::InterpKind::Linear;
  cfg.epochs = 3000;
  cfg.seed = 1;
  cfg.loss_q = 1.0;
  const dmn::TrainResult r = dmn::train(cfg, samples, 1);
  const double val = r.history.back().e_mean_val;
  const double t = seconds_since(t0);
  std::ostringstream os;
  os << samples.size() << " labels (" << rep.dropped.size() << " dropped, max CG iterations " << rep.max_iterations
     << fmt(", %.0f s)", t_label) << fmt(", q %.0f", cfg.loss_q) << fmt(", e_mean_train %.3f%%", 100.0 * r.history.back().e_mean_train)
     << fmt(", e_mean_val %.3f%%", 100.0 * val) << fmt(", %.0f s", t);
  return {val <= 0.05 && t < 7200.0, os.str()};
}

// 6 ----------------------------------------------------------------------------
Outcome inelastic_oracle() {
  const auto t0 = Clock::now();
  const dmn::DmnModel model = oracle::random_model(1, dmn::InterpKind::Linear, 606);
  const dmn::OrientationPoint p{0.6, 0.3};
  const dmn::GsmSpec fiber = dmn::glass_fiber(), matrix = dmn::polyamide_matrix();
  const auto ctx = dmn::assemble_context(model, p, fiber, matrix);
  const auto w = dmn::effective_weights(model);
  const double frac = w.leaf[0] / (w.leaf[0] + w.leaf[1]);
  const auto n = arr(dmn::normals_at(model, p)[0]);
  double worst = 0.0;
  for (const auto& d : kDirections) {
    const auto schedule = dmn::uniaxial_hysteresis(d[0], d[1], 0.025, 80);
    const auto path = dmn::drive_path(ctx, schedule);
    const auto ref = oracle::laminate_path(fiber, matrix, frac, n, schedule);
    std::vector<double> times;
    std::vector<dmn::SymMat> got;
    for (std::size_t k = 1; k < path.steps.size(); ++k) {
      times.push_back(path.steps[k].time);
      got.push_back(path.steps[k].stress);
    }
    worst = std::max(worst, dmn::validation_metrics(times, got, ref).eta_max);
  }
  const double t = seconds_since(t0);
  return {worst < 1e-6 && t < 60.0, fmt("max eta_max %.3e", worst) + fmt(" over 6 directions, %.2f s", t)};
}

// 7 ----------------------------------------------------------------------------
Outcome tangent_consistency() {
  const dmn::DmnModel model = oracle::random_model(3, dmn::InterpKind::Linear, 707);
  const auto ctx = dmn::assemble_context(model, {0.7, 0.2}, dmn::glass_fiber(), dmn::polyamide_matrix());
  const auto schedule = dmn::uniaxial_hysteresis(0, 1, 0.025, 80);
  // Converged states along the path; probes are spread over the steps with
  // plastic flow in at least one leaf.
  std::vector<dmn::MaterialPointState> states{dmn::MaterialPointState::initial(ctx)};
  std::vector<int> plastic_steps;
  for (int k = 0; k < static_cast<int>(schedule.size()); ++k) {
    const dmn::StepResult r = dmn::solve_step(ctx, states.back(), schedule[k].strain);
    double dp = 0.0;
    for (std::size_t i = 0; i < ctx.leaves.size(); ++i) {
      dp = std::max(dp, r.state.leaves[i].eq_plastic_strain - states.back().leaves[i].eq_plastic_strain);
    }
    if (dp > 1e-8) plastic_steps.push_back(k);
    states.push_back(r.state);
  }
  double worst_fd = 0.0, worst_sym = 0.0;
  int probes = 0;
  for (int j = 0; j < 5 && plastic_steps.size() >= 5; ++j, ++probes) {
    const int k = plastic_steps[(j * (plastic_steps.size() - 1)) / 4];
    const dmn::MaterialPointState& state = states[k];
    const dmn::StepResult r = dmn::solve_step(ctx, state, schedule[k].strain);
    dmn::Stiffness fd;
    for (int b = 0; b < 6; ++b) {
      const double h = 1e-7;
      dmn::SymMat ep = schedule[k].strain, em = schedule[k].strain;
      ep[b] += h;
      em[b] -= h;
      fd.col(b) = (dmn::solve_step(ctx, state, ep).stress - dmn::solve_step(ctx, state, em).stress) / (2.0 * h);
    }
    worst_fd = std::max(worst_fd, oracle::rel_frobenius(r.tangent, fd));
    worst_sym = std::max(worst_sym, (r.tangent - r.tangent.transpose()).norm() / r.tangent.norm());
  }
  const int plastic = probes;
  std::ostringstream os;
  os << fmt("max rel FD error %.3e", worst_fd) << fmt(", max asymmetry %.3e", worst_sym) << ", " << plastic
     << "/5 plastic probes of " << plastic_steps.size() << " plastic steps";
  return {worst_fd <= 1e-5 && worst_sym <= 1e-9 && plastic == 5, os.str()};
}

// 8 ----------------------------------------------------------------------------
Outcome thermodynamics() {
  const dmn::DmnModel model = oracle::random_model(4, dmn::InterpKind::Linear, 808, 0.25);
  const auto ctx = dmn::assemble_context(model, {0.5, 0.4}, dmn::glass_fiber(), dmn::polyamide_matrix());
  double min_loop = INFINITY, min_hyst = INFINITY;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 0.015);
  for (int loop = 0; loop < 10; ++loop) {
    // Closed polygon through random corners, 10 increments per edge.
    std::vector<dmn::SymMat> corners{dmn::SymMat::Zero()};
    for (int c = 0; c < 3; ++c) {
      dmn::SymMat e;
      for (int s = 0; s < 6; ++s) e[s] = g(rng);
      corners.push_back(e);
    }
    corners.push_back(dmn::SymMat::Zero());
    std::vector<dmn::LoadStep> schedule;
    for (std::size_t c = 1; c < corners.size(); ++c) {
      for (int s = 1; s <= 10; ++s) schedule.push_back({corners[c - 1] + (corners[c] - corners[c - 1]) * (s / 10.0), 1.0});
    }
    min_loop = std::min(min_loop, dmn::path_dissipation(dmn::drive_path(ctx, schedule)));
  }
  for (const auto& d : kDirections) {
    min_hyst = std::min(min_hyst, dmn::path_dissipation(dmn::drive_path(ctx, dmn::uniaxial_hysteresis(d[0], d[1]))));
  }
  std::ostringstream os;
  os << fmt("min dissipation over random loops %.4e", min_loop) << fmt(", min over hysteresis %.4e MPa", min_hyst);
  return {min_loop >= -1e-10 && min_hyst > 0.0, os.str()};
}

// 9 ----------------------------------------------------------------------------
Outcome linear_agreement() {
  const dmn::DmnModel model = oracle::random_model(5, dmn::InterpKind::Quadratic, 909, 0.2);
  const dmn::GsmSpec fiber = dmn::glass_fiber(), matrix = elastic_matrix();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    double a = u(rng), b = u(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const dmn::OrientationPoint p = dmn::from_barycentric({1.0 - a - b, a, b});
    const auto ctx = dmn::assemble_context(model, p, fiber, matrix);
    dmn::SymMat e;
    for (int s = 0; s < 6; ++s) e[s] = 0.01 * (u(rng) - 0.5);
    const auto r = dmn::solve_step(ctx, dmn::MaterialPointState::initial(ctx), e);
    const auto ref = dmn::forward_stiffness(model, fiber.elastic_stiffness(), matrix.elastic_stiffness(), p);
    worst = std::max(worst, oracle::rel_frobenius(r.tangent, ref));
  }
  return {worst <= 1e-9, fmt("max rel error %.3e", worst)};
}

// 10 ---------------------------------------------------------------------------
Outcome performance() {
  const dmn::DmnModel model = oracle::random_model(8, dmn::InterpKind::Linear, 1010);
  const auto ctx = dmn::assemble_context(model, {0.6, 0.3}, dmn::glass_fiber(), dmn::polyamide_matrix());
  const auto schedule = dmn::uniaxial_hysteresis(0, 0, 0.025, 80);
  std::vector<double> per_step;
  for (int rep = 0; rep < 5; ++rep) {
    dmn::MaterialPointState state = dmn::MaterialPointState::initial(ctx);
    for (const auto& step : schedule) {
      const auto t0 = Clock::now();
      dmn::StepResult r = dmn::solve_step(ctx, state, step.strain);
      per_step.push_back(seconds_since(t0));
      state = std::move(r.state);
    }
  }
  std::sort(per_step.begin(), per_step.end());
  const double med = per_step[per_step.size() / 2];
  std::ostringstream os;
  os << ctx.leaves.size() << " leaves, " << ctx.nodes.size() << " laminates" << fmt(", median step %.3f ms", 1e3 * med);
  return {med < 0.010, os.str()};
}

// 11 ---------------------------------------------------------------------------
Outcome shape_functions() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_sum = 0.0, worst_node = 0.0;
  const std::vector<std::pair<dmn::InterpKind, std::vector<dmn::Bary>>> families{
      {dmn::InterpKind::Linear, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}},
      {dmn::InterpKind::Trilinear, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1.0 / 3, 1.0 / 3, 1.0 / 3}}},
      {dmn::InterpKind::Quadratic, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}}}};
  for (const auto& [kind, nodes] : families) {
    for (int k = 0; k < 1000; ++k) {
      double a = u(rng), b = u(rng);
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      worst_sum = std::max(worst_sum, std::abs(dmn::shape_functions({1.0 - a - b, a, b}, kind).sum() - 1.0));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Eigen::VectorXd phi = dmn::shape_functions(nodes[i], kind);
      for (Eigen::Index j = 0; j < phi.size(); ++j) {
        worst_node = std::max(worst_node, std::abs(phi[j] - (j == static_cast<Eigen::Index>(i) ? 1.0 : 0.0)));
      }
    }
  }
  return {worst_sum <= 1e-12 && worst_node <= 1e-12,
          fmt("partition of unity %.2e", worst_sum) + fmt(", Kronecker %.2e", worst_node)};
}

// 12 ---------------------------------------------------------------------------
Outcome compression() {
  double worst_lin = 0.0, worst_online = 0.0;
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const dmn::DmnModel model = oracle::random_model(4 + trial % 3, dmn::InterpKind::Trilinear, 1200 + trial, 0.5);
    const dmn::OrientationPoint p = dmn::from_barycentric({0.2 + 0.1 * trial, 0.3, 0.5 - 0.1 * trial});
    const dmn::Stiffness c1 = oracle::random_isotropic(rng), c2 = oracle::random_isotropic(rng);
    worst_lin = std::max(worst_lin, oracle::rel_frobenius(dmn::forward_stiffness(model, c1, c2, p),
                                                          dmn::forward_stiffness_uncompressed(model, c1, c2, p)));
    const auto ca = dmn::assemble_context(model, p, dmn::glass_fiber(), dmn::polyamide_matrix(), true);
    const auto cu = dmn::assemble_context(model, p, dmn::glass_fiber(), dmn::polyamide_matrix(), false);
    const auto schedule = dmn::uniaxial_hysteresis(trial % 3, (trial + 1) % 3, 0.025, 40);
    const auto pa = dmn::drive_path(ca, schedule), pu = dmn::drive_path(cu, schedule);
    double scale = 0.0;
    for (const auto& s : pu.steps) scale = std::max(scale, s.stress.norm());
    for (std::size_t k = 0; k < pa.steps.size(); ++k) {
      worst_online = std::max(worst_online, (pa.steps[k].stress - pu.steps[k].stress).norm() / scale);
    }
  }
  return {worst_lin <= 1e-10 && worst_online <= 1e-10,
          fmt("forward %.3e", worst_lin) + fmt(", online %.3e", worst_online)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"laminate kernel exactness", laminate_exactness},
      {"FFT vs laminate cross-validation", fft_vs_laminate},
      {"gradient correctness", gradient_check},
      {"identifiability", identifiability},
      {"desk-scale end-to-end", desk_end_to_end},
      {"inelastic oracle equivalence", inelastic_oracle},
      {"tangent consistency", tangent_consistency},
      {"thermodynamic consistency", thermodynamics},
      {"linear pipeline agreement", linear_agreement},
      {"performance", performance},
      {"shape-function suite", shape_functions},
      {"compression equivalence", compression}};
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
  if (selected.empty()) {
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);
  }
  int failures = 0;
  for (int k : selected) {
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::printf("criterion %d: FAIL (no such criterion)\n", k);
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = criteria[k - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d %-36s %s  (%s)\n", k, criteria[k - 1].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
