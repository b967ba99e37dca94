#include "dmn/online.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "dmn/error.hpp"

namespace dmn {

namespace {

using SparseLdlt = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>>;

// Fraction of the mean phase stress magnitude below which the effective stress
// no longer scales the convergence test.
constexpr double kScaleFloor = 1e-3;

void collect_slots(const CompressedTopology& topo, const ChildRef& c, std::vector<int>& out) {
  if (c.leaf) {
    out.push_back(c.index);
    return;
  }
  const CompressedNode& node = topo.nodes[c.index];
  collect_slots(topo, node.left, out);
  collect_slots(topo, node.right, out);
}

void full_subtree_slots(int depth, int storage, std::vector<int>& out) {
  const int level = node_level(depth, storage);
  const int pos = node_position(depth, storage);
  const int span = 1 << (depth - level + 1);
  for (int s = pos * span; s < (pos + 1) * span; ++s) out.push_back(s);
}

void build_operator(GaussPointContext& ctx) {
  const int nl = static_cast<int>(ctx.leaves.size());
  const int nn = static_cast<int>(ctx.nodes.size());
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < nl; ++i) {
    for (const LeafCoupling& a : ctx.leaves[i].ancestors) {
      const JumpOperator& g = ctx.nodes[a.dof_node].jump;
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 3; ++c) {
          if (g(r, c) != 0.0) entries.emplace_back(6 * i + r, 3 * a.dof_node + c, a.coeff * g(r, c));
        }
      }
    }
  }
  ctx.gradient.resize(6 * nl, 3 * nn);
  ctx.gradient.setFromTriplets(entries.begin(), entries.end());

  // Block pattern of the Newton matrix: every pair of laminates sharing a leaf.
  std::map<std::pair<int, int>, int> block_id;
  std::vector<std::pair<int, int>> blocks;
  ctx.pattern.leaf_blocks.assign(nl, {});
  for (int i = 0; i < nl; ++i) {
    const auto& anc = ctx.leaves[i].ancestors;
    for (int x = 0; x < static_cast<int>(anc.size()); ++x) {
      for (int y = 0; y < static_cast<int>(anc.size()); ++y) {
        const int row = anc[x].dof_node, col = anc[y].dof_node;
        if (row < col) continue;
        auto [it, inserted] = block_id.try_emplace({row, col}, static_cast<int>(blocks.size()));
        if (inserted) blocks.emplace_back(row, col);
        ctx.pattern.leaf_blocks[i].push_back({it->second, x, y});
      }
    }
  }
  std::vector<Eigen::Triplet<double>> pattern;
  for (const auto& [row, col] : blocks) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (row == col && r < c) continue;
        pattern.emplace_back(3 * row + r, 3 * col + c, 0.0);
      }
    }
  }
  Eigen::SparseMatrix<double>& lower = ctx.pattern.lower;
  lower.resize(3 * nn, 3 * nn);
  lower.setFromTriplets(pattern.begin(), pattern.end());
  lower.makeCompressed();
  ctx.pattern.block_slots.assign(blocks.size(), {});
  auto slot_of = [&](int row, int col) {
    for (int k = lower.outerIndexPtr()[col]; k < lower.outerIndexPtr()[col + 1]; ++k) {
      if (lower.innerIndexPtr()[k] == row) return k;
    }
    throw NumericError("online: Newton matrix pattern is inconsistent");
  };
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto [row, col] = blocks[b];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        ctx.pattern.block_slots[b][3 * r + c] =
            (row == col && r < c) ? -1 : slot_of(3 * row + r, 3 * col + c);
      }
    }
  }
}

}  // namespace

GaussPointContext assemble_context(const DmnModel& model, const OrientationPoint& p, const GsmSpec& phase1,
                                   const GsmSpec& phase2, bool compress_tree) {
  phase1.validate();
  phase2.validate();
  GaussPointContext ctx;
  ctx.depth = model.depth;
  ctx.point = checked_orientation(p);
  ctx.phases = {phase1, phase2};
  ctx.compressed = compress_tree;
  const std::vector<Vec3> normals = normals_at(model, ctx.point);
  const CompressedTopology topo = compress(model);
  const double total = std::accumulate(topo.leaf_weights.begin(), topo.leaf_weights.end(), 0.0);

  std::vector<int> slot_to_leaf(model.leaf_count(), -1);
  if (compress_tree) {
    for (std::size_t k = 0; k < topo.leaves.size(); ++k) {
      slot_to_leaf[topo.leaves[k]] = static_cast<int>(k);
      ctx.leaves.push_back({topo.leaves[k], leaf_phase(topo.leaves[k]), topo.leaf_weights[k] / total, {}});
    }
  } else {
    const Eigen::VectorXd w = model.v.cwiseMax(0.0);
    for (int s = 0; s < model.leaf_count(); ++s) {
      slot_to_leaf[s] = s;
      ctx.leaves.push_back({s, leaf_phase(s), w[s] / total, {}});
    }
  }

  for (std::size_t k = 0; k < topo.nodes.size(); ++k) {
    const CompressedNode& cn = topo.nodes[k];
    OnlineNode node;
    node.storage = cn.storage;
    node.normal = normals[cn.storage];
    node.jump = jump_operator(node.normal);
    const int dof = static_cast<int>(ctx.nodes.size());
    ctx.nodes.push_back(node);
    std::vector<int> left, right;
    if (compress_tree) {
      collect_slots(topo, cn.left, left);
      collect_slots(topo, cn.right, right);
    } else {
      const auto [l, r] = full_children(model.depth, cn.storage);
      if (l.leaf) left.push_back(l.index); else full_subtree_slots(model.depth, l.index, left);
      if (r.leaf) right.push_back(r.index); else full_subtree_slots(model.depth, r.index, right);
    }
    const double frac_right = cn.weight_right / cn.weight;
    for (int s : left) ctx.leaves[slot_to_leaf[s]].ancestors.push_back({dof, -frac_right});
    for (int s : right) ctx.leaves[slot_to_leaf[s]].ancestors.push_back({dof, cn.frac_left});
  }
  build_operator(ctx);
  return ctx;
}

MaterialPointState MaterialPointState::initial(const GaussPointContext& ctx) {
  MaterialPointState s;
  s.leaves.assign(ctx.leaves.size(), GsmState{});
  s.jumps = Eigen::VectorXd::Zero(ctx.dof_count());
  return s;
}

int MaterialPointState::scalar_count(const GaussPointContext& ctx) const {
  int count = static_cast<int>(jumps.size());
  for (const OnlineLeaf& leaf : ctx.leaves) {
    if (ctx.phases[leaf.phase - 1].kind == GsmKind::J2Plastic) count += 6;
  }
  return count;
}

// ---------------------------------------------------------------------------

namespace {

struct Evaluation {
  std::vector<GsmResponse> leaf;
  std::vector<SymMat> strain;
  Eigen::VectorXd residual;
  SymMat stress = SymMat::Zero();
  double residual_norm = 0.0;
  double scale = 0.0;
};

Evaluation evaluate(const GaussPointContext& ctx, const MaterialPointState& state_n, const SymMat& strain,
                    const Eigen::VectorXd& jumps, double dt) {
  Evaluation ev;
  const int nl = static_cast<int>(ctx.leaves.size());
  ev.leaf.resize(nl);
  ev.strain.resize(nl);
  ev.residual = Eigen::VectorXd::Zero(ctx.dof_count());
  double magnitude = 0.0;
  for (int i = 0; i < nl; ++i) {
    const OnlineLeaf& leaf = ctx.leaves[i];
    SymMat eps = strain;
    for (const LeafCoupling& a : leaf.ancestors) {
      eps.noalias() += a.coeff * (ctx.nodes[a.dof_node].jump * jumps.segment<3>(3 * a.dof_node));
    }
    ev.strain[i] = eps;
    ev.leaf[i] = stress_and_tangent(ctx.phases[leaf.phase - 1], state_n.leaves[i], eps, dt);
    const SymMat& sigma = ev.leaf[i].stress;
    ev.stress.noalias() += leaf.weight * sigma;
    magnitude += leaf.weight * sigma.norm();
    for (const LeafCoupling& a : leaf.ancestors) {
      ev.residual.segment<3>(3 * a.dof_node).noalias() +=
          (leaf.weight * a.coeff) * (ctx.nodes[a.dof_node].jump.transpose() * sigma);
    }
  }
  ev.residual_norm = ev.residual.norm();
  ev.scale = std::max(ev.stress.norm(), kScaleFloor * magnitude);
  return ev;
}

bool converged(const GaussPointContext& ctx, const Evaluation& ev, double tol) {
  return ev.residual_norm <= tol * ctx.full_node_count() * ev.scale;
}

double normalised_residual(const GaussPointContext& ctx, const Evaluation& ev) {
  if (ev.residual_norm == 0.0) return 0.0;
  return ev.residual_norm / (ctx.full_node_count() * ev.scale);
}

void assemble_newton_matrix(const GaussPointContext& ctx, const Evaluation& ev, Eigen::SparseMatrix<double>& mat) {
  double* values = mat.valuePtr();
  std::fill(values, values + mat.nonZeros(), 0.0);
  std::vector<Eigen::Matrix<double, 6, 3>> g, h;
  for (std::size_t i = 0; i < ctx.leaves.size(); ++i) {
    const OnlineLeaf& leaf = ctx.leaves[i];
    if (leaf.weight == 0.0) continue;
    const Stiffness& d = ev.leaf[i].tangent;
    const std::size_t na = leaf.ancestors.size();
    g.resize(na);
    h.resize(na);
    for (std::size_t x = 0; x < na; ++x) {
      g[x] = leaf.ancestors[x].coeff * ctx.nodes[leaf.ancestors[x].dof_node].jump;
      h[x].noalias() = d * g[x];
    }
    for (const auto& [block, x, y] : ctx.pattern.leaf_blocks[i]) {
      const Eigen::Matrix3d contrib = leaf.weight * (g[x].transpose() * h[y]);
      const auto& slots = ctx.pattern.block_slots[block];
      for (int k = 0; k < 9; ++k) {
        if (slots[k] >= 0) values[slots[k]] += contrib(k / 3, k % 3);
      }
    }
  }
}

Stiffness effective_tangent(const GaussPointContext& ctx, const Evaluation& ev, const SparseLdlt* solver) {
  Stiffness mean = Stiffness::Zero();
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(ctx.dof_count(), 6);
  for (std::size_t i = 0; i < ctx.leaves.size(); ++i) {
    const OnlineLeaf& leaf = ctx.leaves[i];
    if (leaf.weight == 0.0) continue;
    const Stiffness& d = ev.leaf[i].tangent;
    mean.noalias() += leaf.weight * d;
    for (const LeafCoupling& a : leaf.ancestors) {
      coupling.middleRows<3>(3 * a.dof_node).noalias() +=
          (leaf.weight * a.coeff) * (ctx.nodes[a.dof_node].jump.transpose() * d);
    }
  }
  if (ctx.dof_count() == 0) return mean;
  const Eigen::MatrixXd x = solver->solve(coupling);
  return mean - coupling.transpose() * x;
}

std::string history_text(const std::vector<double>& history) {
  std::ostringstream os;
  os.precision(3);
  for (std::size_t k = 0; k < history.size(); ++k) os << (k ? ", " : "") << history[k];
  return os.str();
}

StepResult solve_single(const GaussPointContext& ctx, const MaterialPointState& state_n, const SymMat& strain,
                        double dt, const SolverOptions& opt) {
  const int ndof = ctx.dof_count();
  Eigen::VectorXd jumps = (opt.cold_start || state_n.jumps.size() != ndof) ? Eigen::VectorXd::Zero(ndof)
                                                                          : state_n.jumps;
  StepResult out;
  Evaluation ev = evaluate(ctx, state_n, strain, jumps, dt);
  out.residual_history.push_back(normalised_residual(ctx, ev));

  Eigen::SparseMatrix<double> mat = ctx.pattern.lower;
  SparseLdlt solver;
  if (ndof > 0) solver.analyzePattern(mat);
  auto factorize = [&](const Evaluation& at) {
    assemble_newton_matrix(ctx, at, mat);
    solver.factorize(mat);
    if (solver.info() != Eigen::Success) throw NumericError("online: singular Newton matrix");
  };

  int iter = 0;
  while (ndof > 0 && !converged(ctx, ev, opt.tolerance)) {
    if (iter == opt.max_iterations) {
      throw NumericError("online: Newton did not converge in " + std::to_string(opt.max_iterations) +
                         " iterations (residuals " + history_text(out.residual_history) + ")");
    }
    ++iter;
    factorize(ev);
    const Eigen::VectorXd delta = -solver.solve(ev.residual);
    double step = 1.0;
    Evaluation trial = evaluate(ctx, state_n, strain, jumps + delta, dt);
    if (opt.line_search) {
      Evaluation best = trial;
      double best_step = step;
      while (trial.residual_norm > (1.0 - opt.armijo * step) * ev.residual_norm) {
        step *= 0.5;
        if (step < opt.min_step) break;
        trial = evaluate(ctx, state_n, strain, jumps + step * delta, dt);
        if (trial.residual_norm < best.residual_norm) {
          best = trial;
          best_step = step;
        }
      }
      if (step < opt.min_step) {
        if (!(best.residual_norm <= ev.residual_norm)) {
          throw NumericError("online: line search found no decrease (residuals " +
                             history_text(out.residual_history) + ")");
        }
        trial = std::move(best);
        step = best_step;
      }
    }
    jumps += step * delta;
    ev = std::move(trial);
    out.residual_history.push_back(normalised_residual(ctx, ev));
  }

  if (ndof > 0) factorize(ev);
  out.tangent = effective_tangent(ctx, ev, ndof > 0 ? &solver : nullptr);
  out.stress = ev.stress;
  out.iterations = iter;
  out.residual = out.residual_history.back();
  out.state.jumps = jumps;
  out.state.strain = strain;
  out.state.leaves.resize(ctx.leaves.size());
  out.leaf_stresses.resize(ctx.leaves.size());
  out.leaf_strains = ev.strain;
  for (std::size_t i = 0; i < ctx.leaves.size(); ++i) {
    out.state.leaves[i] = ev.leaf[i].state;
    out.leaf_stresses[i] = ev.leaf[i].stress;
    out.free_energy += ctx.leaves[i].weight *
                       free_energy(ctx.phases[ctx.leaves[i].phase - 1], out.state.leaves[i], ev.strain[i]);
  }
  return out;
}

}  // namespace

StepResult solve_step(const GaussPointContext& ctx, const MaterialPointState& state_n, const SymMat& strain,
                      double dt, const SolverOptions& options) {
  if (state_n.leaves.size() != ctx.leaves.size()) {
    throw PreconditionError("online: material point state does not match the context");
  }
  try {
    return solve_single(ctx, state_n, strain, dt, options);
  } catch (const NumericError& first) {
    if (!options.substep_retry) throw;
    try {
      const SymMat middle = 0.5 * (state_n.strain + strain);
      StepResult half = solve_single(ctx, state_n, middle, 0.5 * dt, options);
      StepResult full = solve_single(ctx, half.state, strain, 0.5 * dt, options);
      full.substeps = 2;
      full.iterations += half.iterations;
      return full;
    } catch (const NumericError& second) {
      throw NumericError(std::string(first.what()) + "; retry with two substeps: " + second.what());
    }
  }
}

PathResult drive_path(const GaussPointContext& ctx, const std::vector<LoadStep>& schedule,
                      const SolverOptions& options) {
  PathResult path;
  MaterialPointState state = MaterialPointState::initial(ctx);
  PathRecord start;
  start.tangent = solve_step(ctx, state, SymMat::Zero(), 1.0, options).tangent;
  path.steps.push_back(start);
  double time = 0.0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    StepResult r;
    try {
      r = solve_step(ctx, state, schedule[k].strain, schedule[k].dt, options);
    } catch (const NumericError& e) {
      throw NumericError("step " + std::to_string(k + 1) + ": " + e.what());
    }
    time += schedule[k].dt;
    state = std::move(r.state);
    PathRecord rec;
    rec.time = time;
    rec.strain = schedule[k].strain;
    rec.stress = r.stress;
    rec.tangent = r.tangent;
    rec.iterations = r.iterations;
    rec.residual = r.residual;
    rec.free_energy = r.free_energy;
    path.steps.push_back(rec);
  }
  path.final_state = std::move(state);
  return path;
}

// ---------------------------------------------------------------------------

namespace {

int mandel_slot(int i, int j) {
  for (int s = 0; s < 6; ++s) {
    const auto& pr = kMandelPairs[s];
    if ((pr[0] == i && pr[1] == j) || (pr[0] == j && pr[1] == i)) return s;
  }
  throw PreconditionError("strain direction indices must lie in {0, 1, 2}");
}

}  // namespace

std::vector<LoadStep> uniaxial_hysteresis(int i, int j, double amplitude, int steps) {
  if (steps <= 0 || steps % 4 != 0) throw PreconditionError("hysteresis step count must be a positive multiple of 4");
  const int slot = mandel_slot(i, j);
  const double quarter = steps / 4;
  std::vector<LoadStep> out(steps);
  for (int k = 1; k <= steps; ++k) {
    double level;
    if (k <= quarter) {
      level = k / quarter;
    } else if (k <= 3 * quarter) {
      level = 1.0 - (k - quarter) / quarter;
    } else {
      level = -1.0 + (k - 3 * quarter) / quarter;
    }
    out[k - 1].strain[slot] = level * amplitude * mandel_factor(slot);
  }
  return out;
}

std::vector<LoadStep> linear_ramp(const SymMat& target, int steps) {
  if (steps <= 0) throw PreconditionError("ramp step count must be positive");
  std::vector<LoadStep> out(steps);
  for (int k = 1; k <= steps; ++k) out[k - 1].strain = (static_cast<double>(k) / steps) * target;
  return out;
}

ValidationMetrics validation_metrics(const std::vector<double>& times, const std::vector<SymMat>& dmn_stress,
                                     const std::vector<SymMat>& ref_stress) {
  const std::size_t n = times.size();
  if (n < 2 || dmn_stress.size() != n || ref_stress.size() != n) {
    throw PreconditionError("validation: paths must share a time grid of at least two points");
  }
  const double span = times.back() - times.front();
  if (!(span > 0.0)) throw PreconditionError("validation: time grid must be increasing");
  std::array<double, 6> ref_max{}, dmn_max{};
  double global = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (int s = 0; s < 6; ++s) {
      const double r = std::abs(ref_stress[k][s]) / mandel_factor(s);
      const double d = std::abs(dmn_stress[k][s]) / mandel_factor(s);
      ref_max[s] = std::max(ref_max[s], r);
      dmn_max[s] = std::max(dmn_max[s], d);
      global = std::max(global, r);
    }
  }
  ValidationMetrics m;
  for (int s = 0; s < 6; ++s) {
    if (ref_max[s] <= 1e-12 * global) {
      if (dmn_max[s] > 1e-8 * std::max(global, 1e-300)) {
        throw NumericError("validation: reference stress component " + std::to_string(s) +
                           " vanishes while the prediction does not");
      }
      continue;
    }
    auto eta = [&](std::size_t k) { return std::abs(dmn_stress[k][s] - ref_stress[k][s]) / mandel_factor(s) / ref_max[s]; };
    double integral = 0.0;
    double peak = eta(0);
    for (std::size_t k = 1; k < n; ++k) {
      integral += 0.5 * (eta(k) + eta(k - 1)) * (times[k] - times[k - 1]);
      peak = std::max(peak, eta(k));
    }
    m.eta_mean = std::max(m.eta_mean, integral / span);
    m.eta_max = std::max(m.eta_max, peak);
  }
  return m;
}

double path_work_trapezoid(const PathResult& path) {
  double work = 0.0;
  for (std::size_t k = 1; k < path.steps.size(); ++k) {
    const PathRecord& a = path.steps[k - 1];
    const PathRecord& b = path.steps[k];
    work += 0.5 * (a.stress + b.stress).dot(b.strain - a.strain);
  }
  return work;
}

double path_dissipation(const PathResult& path) {
  double dissipated = 0.0;
  for (std::size_t k = 1; k < path.steps.size(); ++k) {
    const PathRecord& a = path.steps[k - 1];
    const PathRecord& b = path.steps[k];
    dissipated += b.stress.dot(b.strain - a.strain) - (b.free_energy - a.free_energy);
  }
  return dissipated;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<const char*, 6> kComponentNames{"11", "22", "33", "23", "13", "12"};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  return out;
}

struct CsvTable {
  std::map<std::string, int> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    auto it = columns.find(name);
    return it == columns.end() ? -1 : it->second;
  }
};

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (header) {
      for (std::size_t k = 0; k < cells.size(); ++k) t.columns[cells[k]] = static_cast<int>(k);
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw IoError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(t.columns.size()) +
                    " fields");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw IoError("CSV line " + std::to_string(line_no) + ": not a number: '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

SymMat read_components(const CsvTable& t, const std::vector<double>& row, char prefix, bool& present) {
  SymMat v = SymMat::Zero();
  present = true;
  for (int s = 0; s < 6; ++s) {
    const int col = t.column(std::string(1, prefix) + kComponentNames[s]);
    if (col < 0) {
      present = false;
      return v;
    }
    v[s] = row[col] * mandel_factor(s);
  }
  return v;
}

}  // namespace

std::string path_to_csv(const PathResult& path) {
  std::ostringstream os;
  os.precision(17);
  os << "t";
  for (const char* c : kComponentNames) os << ",E" << c;
  for (const char* c : kComponentNames) os << ",S" << c;
  os << ",iterations,residual\n";
  for (const PathRecord& r : path.steps) {
    if (r.time == 0.0) continue;
    os << r.time;
    for (int s = 0; s < 6; ++s) os << ',' << r.strain[s] / mandel_factor(s);
    for (int s = 0; s < 6; ++s) os << ',' << r.stress[s] / mandel_factor(s);
    os << ',' << r.iterations << ',' << r.residual << '\n';
  }
  return os.str();
}

StressPath read_stress_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  if (t.column("t") < 0) throw IoError("stress CSV: missing column 't'");
  StressPath p;
  for (const auto& row : t.rows) {
    bool has_stress = false, has_strain = false;
    p.times.push_back(row[t.column("t")]);
    p.stresses.push_back(read_components(t, row, 'S', has_stress));
    if (!has_stress) throw IoError("stress CSV: missing one of the columns S11..S12");
    const SymMat e = read_components(t, row, 'E', has_strain);
    if (has_strain) p.strains.push_back(e);
  }
  return p;
}

std::vector<LoadStep> read_strain_schedule_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  if (t.column("t") < 0) throw IoError("strain CSV: missing column 't'");
  std::vector<LoadStep> out;
  double previous = 0.0;
  for (const auto& row : t.rows) {
    bool present = false;
    LoadStep step;
    step.strain = read_components(t, row, 'E', present);
    if (!present) throw IoError("strain CSV: missing one of the columns E11..E12");
    const double time = row[t.column("t")];
    if (time == 0.0 && out.empty() && step.strain.isZero(0.0)) continue;
    step.dt = time - previous;
    if (!(step.dt > 0.0)) throw IoError("strain CSV: times must increase");
    previous = time;
    out.push_back(step);
  }
  return out;
}

}  // namespace dmn
