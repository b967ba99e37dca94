#pragma once

// Inelastic evaluation of a trained network at one material point. The leaf
// strains are eps_i = E + (A a)_i with one displacement jump a_m per laminate;
// the jumps solve the Euler-Lagrange equations A^T W sigma(eps) = 0.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "dmn/gsm.hpp"
#include "dmn/model.hpp"

namespace dmn {

struct LeafCoupling {
  int dof_node = 0;  // index of the laminate in GaussPointContext::nodes
  double coeff = 0.0;
};

struct OnlineLeaf {
  int slot = 0;   // input slot of the full tree
  int phase = 1;  // 1 or 2
  double weight = 0.0;
  std::vector<LeafCoupling> ancestors;  // laminates with a jump degree of freedom
};

struct OnlineNode {
  int storage = 0;
  Vec3 normal = Vec3::UnitZ();
  JumpOperator jump;  // sym(a (x) n) as a 6x3 map
};

struct GaussPointContext {
  int depth = 1;
  OrientationPoint point;
  std::array<GsmSpec, 2> phases;
  std::vector<OnlineLeaf> leaves;
  std::vector<OnlineNode> nodes;  // children before parents
  Eigen::SparseMatrix<double> gradient;  // (6 leaves) x (3 nodes)
  bool compressed = true;

  int dof_count() const { return 3 * static_cast<int>(nodes.size()); }
  /// Full-tree laminate count 2^K - 1 used to scale the convergence test.
  int full_node_count() const { return (1 << depth) - 1; }

  struct Pattern {
    Eigen::SparseMatrix<double> lower;  // lower triangle of the Newton matrix
    std::vector<std::vector<std::array<int, 3>>> leaf_blocks;  // (block, row, col ancestor position) per leaf
    std::vector<std::array<int, 9>> block_slots;  // value index per entry, -1 above the diagonal
  } pattern;
};

/// Builds the gradient operator from the compressed tree. With compress =
/// false every slot of the perfect tree is kept (zero-weight leaves included)
/// and only laminates whose jump has no weighted effect carry no unknown.
GaussPointContext assemble_context(const DmnModel& model, const OrientationPoint& p, const GsmSpec& phase1,
                                   const GsmSpec& phase2, bool compress = true);

struct MaterialPointState {
  std::vector<GsmState> leaves;
  Eigen::VectorXd jumps;
  SymMat strain = SymMat::Zero();  // macroscopic strain of the last converged step

  static MaterialPointState initial(const GaussPointContext& ctx);
  /// Scalars held per material point: jumps plus plastic strain (5 deviatoric
  /// components) and accumulated plastic strain of every J2 leaf.
  int scalar_count(const GaussPointContext& ctx) const;
};

struct SolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
  bool line_search = true;
  double armijo = 1e-4;
  double min_step = 1.0 / 1024.0;
  bool cold_start = false;
  bool substep_retry = true;
};

struct StepResult {
  SymMat stress = SymMat::Zero();
  Stiffness tangent = Stiffness::Zero();
  MaterialPointState state;  // trial state
  std::vector<SymMat> leaf_stresses;
  std::vector<SymMat> leaf_strains;
  int iterations = 0;
  int substeps = 1;
  double residual = 0.0;  // normalised residual at convergence
  double free_energy = 0.0;  // volume average at the trial state
  std::vector<double> residual_history;
};

StepResult solve_step(const GaussPointContext& ctx, const MaterialPointState& state_n, const SymMat& strain,
                      double dt = 1.0, const SolverOptions& options = {});

struct LoadStep {
  SymMat strain = SymMat::Zero();
  double dt = 1.0;
};

struct PathRecord {
  double time = 0.0;
  SymMat strain = SymMat::Zero();
  SymMat stress = SymMat::Zero();
  Stiffness tangent = Stiffness::Zero();
  int iterations = 0;
  double residual = 0.0;
  double free_energy = 0.0;
};

/// Records start with the unloaded state at t = 0.
struct PathResult {
  std::vector<PathRecord> steps;
  MaterialPointState final_state;
};

/// Sequential solve and commit. Failures are rethrown naming the step.
PathResult drive_path(const GaussPointContext& ctx, const std::vector<LoadStep>& schedule,
                      const SolverOptions& options = {});

/// Strain cycle 0 -> +a -> -a -> 0 along e_i (x) e_j (symmetrised, so both
/// shear components equal a) in `steps` equal increments (a multiple of 4).
std::vector<LoadStep> uniaxial_hysteresis(int i, int j, double amplitude = 0.025, int steps = 80);

/// Linear ramp from the zero strain to `target` in `steps` increments.
std::vector<LoadStep> linear_ramp(const SymMat& target, int steps);

struct ValidationMetrics {
  double eta_mean = 0.0;
  double eta_max = 0.0;
};

/// Component-wise stress errors normalised by the largest reference magnitude
/// over time; the mean is a trapezoid time average.
ValidationMetrics validation_metrics(const std::vector<double>& times, const std::vector<SymMat>& dmn_stress,
                                     const std::vector<SymMat>& ref_stress);

/// Work done on the material along a path (trapezoid rule).
double path_work_trapezoid(const PathResult& path);
/// Sum over steps of sigma_{n+1} : (E_{n+1} - E_n) - (psi_{n+1} - psi_n).
double path_dissipation(const PathResult& path);

/// CSV: t, E11..E12, S11..S12 (tensor components), iterations, residual. One row
/// per load step; the unloaded initial state is omitted.
std::string path_to_csv(const PathResult& path);

struct StressPath {
  std::vector<double> times;
  std::vector<SymMat> strains;
  std::vector<SymMat> stresses;
};
/// Reads the columns t, S11..S12 (and E11..E12 when present) of a path CSV.
StressPath read_stress_csv(const std::string& text);

/// Custom path CSV with columns t, E11, E22, E33, E23, E13, E12.
std::vector<LoadStep> read_strain_schedule_csv(const std::string& text);

}  // namespace dmn
