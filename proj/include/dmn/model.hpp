#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dmn/laminate.hpp"
#include "dmn/mech.hpp"

namespace dmn {

/// Direct deep material network with orientation-interpolated lamination
/// directions.
///
/// Laminate nodes are stored level K first and the root last; within a level
/// nodes appear left to right. Row s of `p` and `q` holds the interpolation
/// coefficients of the polar and azimuthal angle of node s. Input slot j
/// (0-based) feeds phase 1 for even j and phase 2 for odd j.
struct DmnModel {
  int depth = 1;
  InterpKind interp = InterpKind::Linear;
  Eigen::MatrixXd p;  // (2^K - 1) x M
  Eigen::MatrixXd q;  // (2^K - 1) x M
  Eigen::VectorXd v;  // 2^K unconstrained input weights
  std::map<std::string, std::string> meta;

  int node_count() const { return (1 << depth) - 1; }
  int leaf_count() const { return 1 << depth; }
  int shape_count() const { return dmn::shape_count(interp); }
  /// Number of fitting parameters (p, q and v).
  int parameter_count() const { return 2 * node_count() * shape_count() + leaf_count(); }

  /// Zero-initialised model of the given shape.
  static DmnModel zeros(int depth, InterpKind interp);
  /// v ~ U[0,1] rescaled to unit sum, p and q entries ~ U[0, 2 pi].
  static DmnModel random(int depth, InterpKind interp, std::mt19937_64& rng);

  /// Throws PreconditionError if array shapes disagree with depth/interp.
  void validate() const;
};

// --- tree indexing (0-based positions) -------------------------------------

/// Storage index of the node at level k (1 = root) and horizontal position i.
int node_storage_index(int depth, int level, int position);
int node_level(int depth, int storage);
int node_position(int depth, int storage);

struct ChildRef {
  bool leaf = true;
  int index = 0;  // input slot (leaf) or node index in the owning container
};

/// Storage-order children of a node in the full tree.
std::pair<ChildRef, ChildRef> full_children(int depth, int storage);

inline int leaf_phase(int slot) { return slot % 2 == 0 ? 1 : 2; }

// --- weights -----------------------------------------------------------------

struct NodeWeights {
  Eigen::VectorXd leaf;  // max(v, 0)
  Eigen::VectorXd node;  // subtree sums, storage order
  Eigen::VectorXd frac;  // volume fraction of the left child; 0 for dead nodes
  std::vector<bool> dead;
};

/// Propagated weights and laminate volume fractions. Throws if all v <= 0.
NodeWeights effective_weights(const DmnModel& model);

// --- orientation interpolation -------------------------------------------------

/// Shape-function values at an orientation (checked against the triangle).
Eigen::VectorXd orientation_shape_values(const DmnModel& model, const OrientationPoint& p);

Vec3 spherical_direction(double polar, double azimuth);

/// Lamination direction of every node (storage order) at orientation p.
std::vector<Vec3> normals_at(const DmnModel& model, const OrientationPoint& p);

// --- compression ---------------------------------------------------------------

struct CompressedNode {
  int storage = 0;  // index in the full tree
  ChildRef left;    // leaf slot or index into CompressedTopology::nodes
  ChildRef right;
  double frac_left = 0.5;
  double weight = 0.0;
  double weight_left = 0.0;
  double weight_right = 0.0;
};

/// Tree with zero-weight subtrees removed and single-child laminates spliced
/// out. Nodes are children-first; the root is referenced by `root`.
struct CompressedTopology {
  int depth = 1;
  std::vector<CompressedNode> nodes;
  std::vector<int> leaves;            // surviving input slots, ascending
  std::vector<double> leaf_weights;   // max(v, 0) of the surviving slots
  ChildRef root;

  int surviving_nodes() const { return static_cast<int>(nodes.size()); }
};

CompressedTopology compress(const DmnModel& model);

// --- linear-elastic forward pass -------------------------------------------------

/// alpha <= 0 selects 2 x the largest phase eigenvalue, valid for every node.
Stiffness forward_stiffness(const DmnModel& model, const Stiffness& c1, const Stiffness& c2,
                            const OrientationPoint& p, double alpha = 0.0);

/// Forward pass over a precomputed topology.
Stiffness forward_stiffness(const DmnModel& model, const CompressedTopology& topo, const Stiffness& c1,
                            const Stiffness& c2, const OrientationPoint& p, double alpha = 0.0);

/// Evaluates every non-dead node of the perfect tree (no splicing).
Stiffness forward_stiffness_uncompressed(const DmnModel& model, const Stiffness& c1, const Stiffness& c2,
                                         const OrientationPoint& p, double alpha = 0.0);

/// Gradient of a scalar w.r.t. the fitting parameters.
struct ModelGradients {
  Eigen::MatrixXd p;
  Eigen::MatrixXd q;
  Eigen::VectorXd v;

  static ModelGradients zeros_like(const DmnModel& model);
  ModelGradients& operator+=(const ModelGradients& other);
};

/// Forward pass that records the laminate intermediates so that the gradient
/// of any scalar function of the output can be pulled back to p, q and v.
class ForwardTape {
 public:
  const Stiffness& forward(const DmnModel& model, const CompressedTopology& topo, const Stiffness& c1,
                           const Stiffness& c2, const OrientationPoint& p, double alpha = 0.0);
  const Stiffness& result() const { return result_; }
  /// Accumulates dL/d(parameters) into grad, given dL/dC_out.
  void backward(const Stiffness& d_cout, ModelGradients& grad) const;

 private:
  const DmnModel* model_ = nullptr;
  const CompressedTopology* topo_ = nullptr;
  Eigen::VectorXd shape_;
  std::vector<double> polar_, azimuth_;
  std::vector<detail::LaminateTape> tapes_;
  Stiffness result_;
};

// --- serialization ---------------------------------------------------------------

inline constexpr int kModelFormatVersion = 2;

/// Rescales v so that sum(max(v, 0)) = 1; the forward pass is unchanged.
void normalize_weights(DmnModel& model);

/// Self-describing JSON; deterministic field order.
std::string save_model(const DmnModel& model);
/// Accepts the current and the previous format version (the latter carried
/// unnormalised weights, which are rescaled on load).
DmnModel load_model(const std::string& text);

void save_model_file(const DmnModel& model, const std::string& path);
DmnModel load_model_file(const std::string& path);

}  // namespace dmn
