#include "dmn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dmn/error.hpp"

namespace dmn {

void TrainConfig::validate() const {
  if (depth < 1 || depth > 16) throw ConfigError("training: depth must lie in [1, 16]");
  if (epochs < 0 || batch_size < 1 || half_period < 1) {
    throw ConfigError("training: epochs, batch size and half period must be positive");
  }
  if (!(lr_min > 0.0 && lr_max >= lr_min)) throw ConfigError("training: need 0 < lr_min <= lr_max");
  if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError("training: decay must lie in (0, 1]");
  if (!(penalty >= 0.0 && loss_p >= 1.0 && loss_q >= 1.0)) {
    throw ConfigError("training: need penalty >= 0 and loss exponents >= 1");
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("training: validation fraction must lie in [0, 1)");
  }
}

double learning_rate(const TrainConfig& c, int epoch) {
  const int m = epoch % (2 * c.half_period);
  const double wave = c.lr_min + 0.5 * (c.lr_max - c.lr_min) * (1.0 + std::cos(kPi * m / c.half_period));
  return std::pow(c.decay, c.decay_per_epoch ? epoch : m) * wave;
}

Batch make_batch(const std::vector<StiffnessSample>& samples) {
  Batch b;
  for (const auto& s : samples) b.push_back(&s);
  return b;
}

Batch make_batch(const std::vector<StiffnessSample>& samples, const std::vector<int>& indices) {
  Batch b;
  for (int i : indices) b.push_back(&samples.at(i));
  return b;
}

namespace {

double voigt_scale(int r, int c) { return 1.0 / (mandel_factor(r) * mandel_factor(c)); }

double entry_norm(const Stiffness& m, double p) {
  double sum = 0.0;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) sum += std::pow(std::abs(m(r, c) * voigt_scale(r, c)), p);
  }
  return std::pow(sum, 1.0 / p);
}

/// Gradient of ||pred - label||_p / ||label||_p with respect to pred (Mandel entries).
Stiffness relative_error_gradient(const Stiffness& pred, const Stiffness& label, double p) {
  const Stiffness diff = pred - label;
  const double denom = entry_norm(label, p);
  Stiffness g = Stiffness::Zero();
  if (p == 1.0) {
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        const double x = diff(r, c);
        g(r, c) = (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0)) * voigt_scale(r, c) / denom;
      }
    }
    return g;
  }
  const double num = entry_norm(diff, p);
  if (num == 0.0) return g;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      const double x = diff(r, c) * voigt_scale(r, c);
      const double sign = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      g(r, c) = sign * std::pow(std::abs(x) / num, p - 1.0) * voigt_scale(r, c) / denom;
    }
  }
  return g;
}

double penalty_excess(const DmnModel& model) { return model.v.cwiseMax(0.0).sum() - 1.0; }

/// (1/N) (sum r^q)^(1/q), computed with a max rescaling against overflow.
double aggregate(const std::vector<double>& r, double q, std::vector<double>* weights) {
  const double n = static_cast<double>(r.size());
  const double peak = *std::max_element(r.begin(), r.end());
  if (weights) weights->assign(r.size(), 0.0);
  if (peak == 0.0) return 0.0;
  double sum = 0.0;
  for (double x : r) sum += std::pow(x / peak, q);
  const double norm = peak * std::pow(sum, 1.0 / q);
  if (weights) {
    for (std::size_t s = 0; s < r.size(); ++s) (*weights)[s] = std::pow(r[s] / norm, q - 1.0) / n;
  }
  return norm / n;
}

}  // namespace

double relative_error(const Stiffness& prediction, const Stiffness& label, double p) {
  const double denom = entry_norm(label, p);
  if (!(denom > 0.0)) throw PreconditionError("relative error: label stiffness vanishes");
  return entry_norm(prediction - label, p) / denom;
}

LossValue loss(const DmnModel& model, const Batch& batch, const TrainConfig& config) {
  if (batch.empty()) throw PreconditionError("loss: empty batch");
  const CompressedTopology topo = compress(model);
  std::vector<double> r;
  r.reserve(batch.size());
  for (const StiffnessSample* s : batch) {
    if (!s->label) throw PreconditionError("loss: sample without label");
    r.push_back(relative_error(forward_stiffness(model, topo, s->c1, s->c2, s->point), *s->label, config.loss_p));
  }
  LossValue v;
  v.fit = aggregate(r, config.loss_q, nullptr);
  const double excess = penalty_excess(model);
  v.penalty = config.penalty * excess * excess;
  v.total = v.fit + v.penalty;
  return v;
}

LossGradient loss_gradients(const DmnModel& model, const Batch& batch, const TrainConfig& config) {
  if (batch.empty()) throw PreconditionError("loss: empty batch");
  const CompressedTopology topo = compress(model);
  std::vector<ForwardTape> tapes(batch.size());
  std::vector<double> r(batch.size());
  std::vector<Stiffness> dr(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const StiffnessSample& sample = *batch[s];
    if (!sample.label) throw PreconditionError("loss: sample without label");
    const Stiffness& pred = tapes[s].forward(model, topo, sample.c1, sample.c2, sample.point);
    r[s] = relative_error(pred, *sample.label, config.loss_p);
    dr[s] = relative_error_gradient(pred, *sample.label, config.loss_p);
  }
  LossGradient out;
  std::vector<double> weights;
  out.value.fit = aggregate(r, config.loss_q, &weights);
  const double excess = penalty_excess(model);
  out.value.penalty = config.penalty * excess * excess;
  out.value.total = out.value.fit + out.value.penalty;

  out.grad = ModelGradients::zeros_like(model);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    if (weights[s] != 0.0) tapes[s].backward(weights[s] * dr[s], out.grad);
  }
  for (int i = 0; i < model.leaf_count(); ++i) {
    if (model.v[i] > 0.0) out.grad.v[i] += 2.0 * config.penalty * excess;
  }
  return out;
}

ErrorReport error_report(const DmnModel& model, const Batch& samples) {
  ErrorReport rep;
  if (samples.empty()) return rep;
  const CompressedTopology topo = compress(model);
  for (const StiffnessSample* s : samples) {
    if (!s->label) throw PreconditionError("error report: sample without label");
    rep.per_sample.push_back(relative_error(forward_stiffness(model, topo, s->c1, s->c2, s->point), *s->label, 1.0));
  }
  rep.e_max = *std::max_element(rep.per_sample.begin(), rep.per_sample.end());
  rep.e_mean = std::accumulate(rep.per_sample.begin(), rep.per_sample.end(), 0.0) / rep.per_sample.size();
  return rep;
}

DataSplit split_dataset(int count, double validation_fraction, std::uint64_t seed) {
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const int n_val = static_cast<int>(std::lround(validation_fraction * count));
  DataSplit split;
  split.validation.assign(idx.begin(), idx.begin() + n_val);
  split.train.assign(idx.begin() + n_val, idx.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

// ---------------------------------------------------------------------------

AmsGrad::AmsGrad(int size, double beta1, double beta2, double eps)
    : m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)),
      v_max_(Eigen::VectorXd::Zero(size)),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {}

void AmsGrad::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  v_max_ = v_max_.cwiseMax(v_);
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const Eigen::VectorXd denom = (v_max_.cwiseSqrt() / std::sqrt(bias2)).array() + eps_;
  params.array() -= (lr / bias1) * m_.array() / denom.array();
}

Eigen::VectorXd flatten_parameters(const DmnModel& model) {
  Eigen::VectorXd flat(model.p.size() + model.q.size() + model.v.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < model.p.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.p.cols(); ++j) flat[k++] = model.p(i, j);
  }
  for (Eigen::Index i = 0; i < model.q.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.q.cols(); ++j) flat[k++] = model.q(i, j);
  }
  for (Eigen::Index i = 0; i < model.v.size(); ++i) flat[k++] = model.v[i];
  return flat;
}

void unflatten_parameters(const Eigen::VectorXd& flat, DmnModel& model) {
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < model.p.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.p.cols(); ++j) model.p(i, j) = flat[k++];
  }
  for (Eigen::Index i = 0; i < model.q.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.q.cols(); ++j) model.q(i, j) = flat[k++];
  }
  for (Eigen::Index i = 0; i < model.v.size(); ++i) model.v[i] = flat[k++];
}

Eigen::VectorXd flatten_gradients(const ModelGradients& g) {
  DmnModel shape;
  shape.p = g.p;
  shape.q = g.q;
  shape.v = g.v;
  return flatten_parameters(shape);
}

TrainResult train(const TrainConfig& config, const std::vector<StiffnessSample>& samples, std::uint64_t init_seed,
                  EpochCallback callback, void* user) {
  config.validate();
  for (const auto& s : samples) {
    if (!s.label) throw PreconditionError("training: dataset is not labeled");
  }
  TrainResult result;
  result.split = split_dataset(static_cast<int>(samples.size()), config.validation_fraction, config.seed);
  const int n_train = static_cast<int>(result.split.train.size());
  if (n_train < config.batch_size) {
    throw ConfigError("training: " + std::to_string(n_train) + " training samples are fewer than one batch of " +
                      std::to_string(config.batch_size));
  }
  const Batch train_all = make_batch(samples, result.split.train);
  const Batch val_all = make_batch(samples, result.split.validation);

  std::mt19937_64 init_rng(init_seed);
  DmnModel model = DmnModel::random(config.depth, config.interp, init_rng);
  Eigen::VectorXd params = flatten_parameters(model);
  AmsGrad opt(static_cast<int>(params.size()), config.beta1, config.beta2, config.adam_eps);
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<int> order = result.split.train;
  const int batches = n_train / config.batch_size;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = learning_rate(config, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0, penalty_sum = 0.0;
    for (int b = 0; b < batches; ++b) {
      Batch batch;
      for (int k = 0; k < config.batch_size; ++k) batch.push_back(&samples[order[b * config.batch_size + k]]);
      const LossGradient lg = loss_gradients(model, batch, config);
      const Eigen::VectorXd g = flatten_gradients(lg.grad);
      if (!std::isfinite(lg.value.total) || !g.allFinite()) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << ", batch " << b << " (loss " << lg.value.total
            << ", learning rate " << lr << ")";
        throw NumericError(msg.str());
      }
      loss_sum += lg.value.total;
      penalty_sum += lg.value.penalty;
      opt.step(params, g, lr);
      unflatten_parameters(params, model);
      if (!(model.v.maxCoeff() > 0.0)) {
        throw NumericError("training: every input weight became non-positive at epoch " + std::to_string(epoch));
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / batches;
    rec.penalty = penalty_sum / batches;
    rec.lr = lr;
    const ErrorReport tr = error_report(model, train_all);
    rec.e_mean_train = tr.e_mean;
    rec.e_max_train = tr.e_max;
    if (!val_all.empty()) {
      const ErrorReport va = error_report(model, val_all);
      rec.e_mean_val = va.e_mean;
      rec.e_max_val = va.e_max;
    }
    result.history.push_back(rec);
    if (callback && !callback(rec, user)) break;
  }
  normalize_weights(model);
  model.meta["epochs"] = std::to_string(result.history.size());
  model.meta["init_seed"] = std::to_string(init_seed);
  model.meta["split_seed"] = std::to_string(config.seed);
  if (!result.history.empty()) {
    std::ostringstream os;
    os.precision(6);
    os << result.history.back().e_mean_val;
    model.meta["e_mean_val"] = os.str();
  }
  result.model = std::move(model);
  return result;
}

std::string history_to_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os.precision(10);
  os << "epoch,loss,lr,e_mean_train,e_max_train,e_mean_val,e_max_val\n";
  for (const auto& r : history) {
    os << r.epoch << ',' << r.loss << ',' << r.lr << ',' << r.e_mean_train << ',' << r.e_max_train << ','
       << r.e_mean_val << ',' << r.e_max_val << '\n';
  }
  return os.str();
}

void label_with_model(const DmnModel& target, std::vector<StiffnessSample>& samples) {
  const CompressedTopology topo = compress(target);
  for (auto& s : samples) s.label = forward_stiffness(target, topo, s.c1, s.c2, s.point);
}

}  // namespace dmn
