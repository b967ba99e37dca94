#include "dmn/model.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "dmn/error.hpp"

namespace dmn {

using ordered_json = nlohmann::ordered_json;

DmnModel DmnModel::zeros(int depth, InterpKind interp) {
  if (depth < 1 || depth > 16) throw PreconditionError("DMN depth must lie in [1, 16]");
  DmnModel m;
  m.depth = depth;
  m.interp = interp;
  m.p = Eigen::MatrixXd::Zero(m.node_count(), m.shape_count());
  m.q = Eigen::MatrixXd::Zero(m.node_count(), m.shape_count());
  m.v = Eigen::VectorXd::Zero(m.leaf_count());
  return m;
}

DmnModel DmnModel::random(int depth, InterpKind interp, std::mt19937_64& rng) {
  DmnModel m = zeros(depth, interp);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int i = 0; i < m.leaf_count(); ++i) m.v[i] = unit(rng);
  m.v /= m.v.sum();
  for (int s = 0; s < m.node_count(); ++s) {
    for (int j = 0; j < m.shape_count(); ++j) m.p(s, j) = angle(rng);
    for (int j = 0; j < m.shape_count(); ++j) m.q(s, j) = angle(rng);
  }
  return m;
}

void DmnModel::validate() const {
  if (depth < 1 || depth > 16) throw PreconditionError("DMN depth must lie in [1, 16]");
  if (p.rows() != node_count() || q.rows() != node_count() || p.cols() != shape_count() ||
      q.cols() != shape_count() || v.size() != leaf_count()) {
    throw PreconditionError("DMN parameter arrays do not match depth and interpolation kind");
  }
}

// ---------------------------------------------------------------------------

int node_storage_index(int depth, int level, int position) {
  return (1 << depth) - (1 << level) + position;
}

int node_level(int depth, int storage) {
  for (int level = depth; level >= 1; --level) {
    if (storage < (1 << depth) - (1 << (level - 1))) return level;
  }
  throw PreconditionError("node index out of range");
}

int node_position(int depth, int storage) {
  const int level = node_level(depth, storage);
  return storage - ((1 << depth) - (1 << level));
}

std::pair<ChildRef, ChildRef> full_children(int depth, int storage) {
  const int level = node_level(depth, storage);
  const int pos = node_position(depth, storage);
  if (level == depth) return {ChildRef{true, 2 * pos}, ChildRef{true, 2 * pos + 1}};
  return {ChildRef{false, node_storage_index(depth, level + 1, 2 * pos)},
          ChildRef{false, node_storage_index(depth, level + 1, 2 * pos + 1)}};
}

NodeWeights effective_weights(const DmnModel& model) {
  model.validate();
  NodeWeights w;
  w.leaf = model.v.cwiseMax(0.0);
  if (!(w.leaf.sum() > 0.0)) throw PreconditionError("DMN has no positive input weight");
  const int n = model.node_count();
  w.node = Eigen::VectorXd::Zero(n);
  w.frac = Eigen::VectorXd::Zero(n);
  w.dead.assign(n, false);
  auto weight_of = [&](const ChildRef& c) { return c.leaf ? w.leaf[c.index] : w.node[c.index]; };
  for (int s = 0; s < n; ++s) {
    const auto [l, r] = full_children(model.depth, s);
    const double wl = weight_of(l), wr = weight_of(r);
    w.node[s] = wl + wr;
    if (w.node[s] > 0.0) {
      w.frac[s] = wl / w.node[s];
    } else {
      w.dead[s] = true;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd orientation_shape_values(const DmnModel& model, const OrientationPoint& p) {
  return shape_functions(to_barycentric(checked_orientation(p)), model.interp);
}

Vec3 spherical_direction(double polar, double azimuth) {
  const double sa = std::sin(polar);
  return {sa * std::cos(azimuth), sa * std::sin(azimuth), std::cos(polar)};
}

std::vector<Vec3> normals_at(const DmnModel& model, const OrientationPoint& p) {
  model.validate();
  const Eigen::VectorXd phi = orientation_shape_values(model, p);
  const Eigen::VectorXd polar = model.p * phi;
  const Eigen::VectorXd azimuth = model.q * phi;
  std::vector<Vec3> normals(model.node_count());
  for (int s = 0; s < model.node_count(); ++s) normals[s] = spherical_direction(polar[s], azimuth[s]);
  return normals;
}

// ---------------------------------------------------------------------------

CompressedTopology compress(const DmnModel& model) {
  const NodeWeights w = effective_weights(model);
  CompressedTopology topo;
  topo.depth = model.depth;
  const int n = model.node_count();
  std::vector<std::optional<ChildRef>> ref(n);
  auto resolve = [&](const ChildRef& c) -> std::optional<ChildRef> {
    if (c.leaf) return w.leaf[c.index] > 0.0 ? std::optional<ChildRef>(c) : std::nullopt;
    return ref[c.index];
  };
  auto weight_of = [&](const ChildRef& c) { return c.leaf ? w.leaf[c.index] : w.node[c.index]; };
  for (int s = 0; s < n; ++s) {
    const auto [l, r] = full_children(model.depth, s);
    const double wl = weight_of(l), wr = weight_of(r);
    if (wl > 0.0 && wr > 0.0) {
      CompressedNode node;
      node.storage = s;
      node.left = *resolve(l);
      node.right = *resolve(r);
      node.weight = wl + wr;
      node.weight_left = wl;
      node.weight_right = wr;
      node.frac_left = wl / (wl + wr);
      ref[s] = ChildRef{false, static_cast<int>(topo.nodes.size())};
      topo.nodes.push_back(node);
    } else if (wl > 0.0) {
      ref[s] = resolve(l);
    } else if (wr > 0.0) {
      ref[s] = resolve(r);
    }
  }
  topo.root = *ref[n - 1];
  for (int slot = 0; slot < model.leaf_count(); ++slot) {
    if (w.leaf[slot] > 0.0) {
      topo.leaves.push_back(slot);
      topo.leaf_weights.push_back(w.leaf[slot]);
    }
  }
  return topo;
}

// ---------------------------------------------------------------------------

namespace {

double resolve_alpha(double alpha, const Stiffness& c1, const Stiffness& c2) {
  return alpha > 0.0 ? alpha : default_alpha(c1, c2);
}

}  // namespace

Stiffness forward_stiffness(const DmnModel& model, const CompressedTopology& topo, const Stiffness& c1,
                            const Stiffness& c2, const OrientationPoint& p, double alpha) {
  ForwardTape tape;
  return tape.forward(model, topo, c1, c2, p, alpha);
}

Stiffness forward_stiffness(const DmnModel& model, const Stiffness& c1, const Stiffness& c2,
                            const OrientationPoint& p, double alpha) {
  const CompressedTopology topo = compress(model);
  return forward_stiffness(model, topo, c1, c2, p, alpha);
}

Stiffness forward_stiffness_uncompressed(const DmnModel& model, const Stiffness& c1, const Stiffness& c2,
                                         const OrientationPoint& p, double alpha) {
  const NodeWeights w = effective_weights(model);
  const std::vector<Vec3> normals = normals_at(model, p);
  const double a = resolve_alpha(alpha, c1, c2);
  std::vector<Stiffness> value(model.node_count(), Stiffness::Zero());
  auto get = [&](const ChildRef& c) -> const Stiffness& {
    if (c.leaf) return leaf_phase(c.index) == 1 ? c1 : c2;
    return value[c.index];
  };
  detail::LaminateTape tape;
  for (int s = 0; s < model.node_count(); ++s) {
    if (w.dead[s]) continue;
    const auto [l, r] = full_children(model.depth, s);
    // A dead child carries zero weight; its sibling's stiffness stands in.
    const bool l_dead = !l.leaf && w.dead[l.index];
    const bool r_dead = !r.leaf && w.dead[r.index];
    const Stiffness& cl = l_dead ? get(r) : get(l);
    const Stiffness& cr = r_dead ? get(l) : get(r);
    try {
      detail::run_laminate(tape, cl, cr, w.frac[s], normals[s], a);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (node " + std::to_string(s) + ")");
    }
    value[s] = tape.result();
  }
  return value.back();
}

ModelGradients ModelGradients::zeros_like(const DmnModel& model) {
  return {Eigen::MatrixXd::Zero(model.p.rows(), model.p.cols()),
          Eigen::MatrixXd::Zero(model.q.rows(), model.q.cols()), Eigen::VectorXd::Zero(model.v.size())};
}

ModelGradients& ModelGradients::operator+=(const ModelGradients& other) {
  p += other.p;
  q += other.q;
  v += other.v;
  return *this;
}

const Stiffness& ForwardTape::forward(const DmnModel& model, const CompressedTopology& topo,
                                      const Stiffness& c1, const Stiffness& c2, const OrientationPoint& p,
                                      double alpha) {
  model_ = &model;
  topo_ = &topo;
  const double a = resolve_alpha(alpha, c1, c2);
  shape_ = orientation_shape_values(model, p);
  const std::size_t count = topo.nodes.size();
  polar_.resize(count);
  azimuth_.resize(count);
  tapes_.resize(count);
  auto get = [&](const ChildRef& c) -> const Stiffness& {
    if (c.leaf) return leaf_phase(c.index) == 1 ? c1 : c2;
    return tapes_[c.index].result();
  };
  for (std::size_t m = 0; m < count; ++m) {
    const CompressedNode& node = topo.nodes[m];
    polar_[m] = model.p.row(node.storage).dot(shape_);
    azimuth_[m] = model.q.row(node.storage).dot(shape_);
    const Vec3 n = spherical_direction(polar_[m], azimuth_[m]);
    try {
      detail::run_laminate(tapes_[m], get(node.left), get(node.right), node.frac_left, n, a);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (node " + std::to_string(node.storage) + ")");
    }
  }
  result_ = get(topo.root);
  return result_;
}

void ForwardTape::backward(const Stiffness& d_cout, ModelGradients& grad) const {
  const CompressedTopology& topo = *topo_;
  if (topo.root.leaf) return;
  const std::size_t count = topo.nodes.size();
  std::vector<Stiffness> g_out(count, Stiffness::Zero());
  std::vector<double> g_frac(count, 0.0);
  g_out[topo.root.index] = d_cout;
  Stiffness g_left, g_right;
  for (std::size_t m = count; m-- > 0;) {
    const CompressedNode& node = topo.nodes[m];
    g_left.setZero();
    g_right.setZero();
    Vec3 g_n = Vec3::Zero();
    tapes_[m].backward(g_out[m], g_left, g_right, g_frac[m], g_n);
    if (!node.left.leaf) g_out[node.left.index] += g_left;
    if (!node.right.leaf) g_out[node.right.index] += g_right;

    const double sa = std::sin(polar_[m]), ca = std::cos(polar_[m]);
    const double sb = std::sin(azimuth_[m]), cb = std::cos(azimuth_[m]);
    const Vec3 dn_dpolar(ca * cb, ca * sb, -sa);
    const Vec3 dn_dazimuth(-sa * sb, sa * cb, 0.0);
    grad.p.row(node.storage) += g_n.dot(dn_dpolar) * shape_.transpose();
    grad.q.row(node.storage) += g_n.dot(dn_dazimuth) * shape_.transpose();
  }

  // Volume fractions depend on v through the propagated subtree weights.
  std::vector<double> g_weight(count, 0.0);
  for (std::size_t m = count; m-- > 0;) {
    const CompressedNode& node = topo.nodes[m];
    const double w2 = node.weight * node.weight;
    const double to_left = g_weight[m] + g_frac[m] * node.weight_right / w2;
    const double to_right = g_weight[m] - g_frac[m] * node.weight_left / w2;
    for (const auto& [child, g] : {std::pair{node.left, to_left}, std::pair{node.right, to_right}}) {
      if (child.leaf) {
        if (model_->v[child.index] > 0.0) grad.v[child.index] += g;
      } else {
        g_weight[child.index] += g;
      }
    }
  }
}

// ---------------------------------------------------------------------------

void normalize_weights(DmnModel& model) {
  const double total = model.v.cwiseMax(0.0).sum();
  if (!(total > 0.0)) throw PreconditionError("DMN has no positive input weight");
  model.v /= total;
}

namespace {

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& rows, Eigen::Index n_rows, Eigen::Index n_cols,
                                 const char* name) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n_rows) {
    throw IoError(std::string("model file: field '") + name + "' has the wrong number of rows");
  }
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols) {
      throw IoError(std::string("model file: field '") + name + "' has a malformed row");
    }
    for (Eigen::Index j = 0; j < n_cols; ++j) m(i, j) = row[j].get<double>();
  }
  return m;
}

}  // namespace

std::string save_model(const DmnModel& model) {
  model.validate();
  const double total = model.v.cwiseMax(0.0).sum();
  if (std::abs(total - 1.0) > 1e-12) {
    throw PreconditionError("save_model: weights must be normalized (sum of positive parts = 1)");
  }
  ordered_json j;
  j["version"] = kModelFormatVersion;
  j["depth"] = model.depth;
  j["interp"] = std::string(to_string(model.interp));
  j["p"] = matrix_to_json(model.p);
  j["q"] = matrix_to_json(model.q);
  j["v"] = ordered_json::array();
  for (Eigen::Index i = 0; i < model.v.size(); ++i) j["v"].push_back(model.v[i]);
  j["meta"] = ordered_json::object();
  for (const auto& [key, value] : model.meta) j["meta"][key] = value;
  return j.dump(1);
}

DmnModel load_model(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model file: decode error: ") + e.what());
  }
  try {
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion && version != kModelFormatVersion - 1) {
      throw IoError("model file: unsupported format version " + std::to_string(version));
    }
    DmnModel m = DmnModel::zeros(j.at("depth").get<int>(), parse_interp_kind(j.at("interp").get<std::string>()));
    m.p = matrix_from_json(j.at("p"), m.node_count(), m.shape_count(), "p");
    m.q = matrix_from_json(j.at("q"), m.node_count(), m.shape_count(), "q");
    const auto& v = j.at("v");
    if (!v.is_array() || static_cast<int>(v.size()) != m.leaf_count()) {
      throw IoError("model file: field 'v' has the wrong length");
    }
    for (int i = 0; i < m.leaf_count(); ++i) m.v[i] = v[i].get<double>();
    if (j.contains("meta")) {
      for (const auto& [key, value] : j["meta"].items()) {
        m.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    if (version == kModelFormatVersion - 1) {
      normalize_weights(m);
      m.meta["upgraded_from_version"] = std::to_string(version);
    } else if (std::abs(m.v.cwiseMax(0.0).sum() - 1.0) > 1e-9) {
      throw IoError("model file: weights are not normalized");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model file: decode error: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("model file: ") + e.what());
  } catch (const PreconditionError& e) {
    throw IoError(std::string("model file: ") + e.what());
  }
}

void save_model_file(const DmnModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << save_model(model) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

DmnModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_model(buffer.str());
}

}  // namespace dmn
