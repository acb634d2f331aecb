#pragma once

#include "nc/icnn.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nc {

struct TrainConfig {
  int epochs = 2000;
  int batch_size = 32;
  double learning_rate = 1e-3;
  // Halve the rate after this many epochs without validation improvement.
  int plateau_patience = 100;
  double plateau_factor = 0.5;
  double min_learning_rate = 1e-6;
  LossWeights weights;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double learning_rate = 0.0;
  LossBreakdown train;
  LossBreakdown validation;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  LossBreakdown best_validation;
  bool diverged = false;
  std::string message;
};

class Adam {
 public:
  Adam(Eigen::Index size, double beta1, double beta2, double epsilon);
  // theta -= lr * mhat / (sqrt(vhat) + eps)
  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& gradient, double learning_rate);

 private:
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  double beta1_;
  double beta2_;
  double epsilon_;
  long t_ = 0;
};

// Trains in place with minibatch Adam and Wz projection after every step.
// On return the model holds the parameters of the best validation epoch.
// A non-finite validation loss stops training early with diverged = true.
TrainResult train(IcnnModel& model, std::span<const ClosureSample> samples, const MomentBasis& basis,
                  const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch = {});

// Splits indices deterministically: returns (train, validation).
std::pair<std::vector<ClosureSample>, std::vector<ClosureSample>> split_dataset(
    std::span<const ClosureSample> samples, double validation_fraction, std::uint64_t seed);

}  // namespace nc
