#pragma once

// Offline identification of the network parameters from labeled stiffness
// samples: penalised relative-error loss, reverse-mode gradients, AMSGrad
// with a cosine-modulated, geometrically decaying learning rate.

#include <cstdint>
#include <string>
#include <vector>

#include "dmn/model.hpp"
#include "dmn/sampling.hpp"

namespace dmn {

struct TrainConfig {
  int depth = 8;
  InterpKind interp = InterpKind::Linear;
  int epochs = 3000;
  int batch_size = 32;
  double lr_min = 1.5e-3;
  double lr_max = 1.5e-2;
  int half_period = 50;   // M; the cosine period is 2M epochs
  double decay = 0.999;   // gamma
  bool decay_per_epoch = true;  // gamma^epoch, else gamma^(epoch mod 2M)
  double penalty = 1e3;   // lambda
  double loss_p = 1.0;    // entrywise norm exponent
  double loss_q = 10.0;   // sample aggregation exponent
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;       // split and batch shuffling
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

double learning_rate(const TrainConfig& config, int epoch);

using Batch = std::vector<const StiffnessSample*>;
Batch make_batch(const std::vector<StiffnessSample>& samples);
Batch make_batch(const std::vector<StiffnessSample>& samples, const std::vector<int>& indices);

/// ||a - b||_p / ||b||_p over the 36 Voigt components.
double relative_error(const Stiffness& prediction, const Stiffness& label, double p = 1.0);

struct LossValue {
  double total = 0.0;
  double fit = 0.0;      // (1/N_b) (sum r_s^q)^(1/q)
  double penalty = 0.0;  // lambda (sum <v>_+ - 1)^2
};

LossValue loss(const DmnModel& model, const Batch& batch, const TrainConfig& config);

struct LossGradient {
  LossValue value;
  ModelGradients grad;
};

LossGradient loss_gradients(const DmnModel& model, const Batch& batch, const TrainConfig& config);

struct ErrorReport {
  double e_mean = 0.0;
  double e_max = 0.0;
  std::vector<double> per_sample;
};

/// Sample-wise relative l1 errors (Voigt components) and their mean and max.
ErrorReport error_report(const DmnModel& model, const Batch& samples);

struct DataSplit {
  std::vector<int> train;
  std::vector<int> validation;
};
DataSplit split_dataset(int count, double validation_fraction, std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double penalty = 0.0;
  double lr = 0.0;
  double e_mean_train = 0.0;
  double e_max_train = 0.0;
  double e_mean_val = 0.0;
  double e_max_val = 0.0;
};

struct TrainResult {
  DmnModel model;  // weights normalised for export
  std::vector<EpochRecord> history;
  DataSplit split;
};

/// Observer called after every epoch; returning false stops training.
using EpochCallback = bool (*)(const EpochRecord&, void*);

TrainResult train(const TrainConfig& config, const std::vector<StiffnessSample>& samples, std::uint64_t init_seed,
                  EpochCallback callback = nullptr, void* user = nullptr);

std::string history_to_csv(const std::vector<EpochRecord>& history);

/// Labels every sample with the effective stiffness of a given network.
void label_with_model(const DmnModel& target, std::vector<StiffnessSample>& samples);

/// AMSGrad state over the flattened (p, q, v) parameter vector.
class AmsGrad {
 public:
  AmsGrad(int size, double beta1, double beta2, double eps);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr);

 private:
  Eigen::VectorXd m_, v_, v_max_;
  double beta1_, beta2_, eps_;
  long t_ = 0;
};

Eigen::VectorXd flatten_parameters(const DmnModel& model);
void unflatten_parameters(const Eigen::VectorXd& flat, DmnModel& model);
Eigen::VectorXd flatten_gradients(const ModelGradients& g);

}  // namespace dmn
