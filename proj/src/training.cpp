#include "nc/training.hpp"

#include "nc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace nc {

void TrainConfig::validate() const {
  if (epochs < 1) throw UsageError("train: epochs must be positive");
  if (batch_size < 1) throw UsageError("train: batch_size must be positive");
  if (!(learning_rate > 0.0)) throw UsageError("train: learning_rate must be positive");
  if (plateau_patience < 1) throw UsageError("train: plateau_patience must be positive");
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) throw UsageError("train: plateau_factor must be in (0,1)");
  if (weights.h < 0.0 || weights.alpha < 0.0 || weights.u < 0.0) {
    throw UsageError("train: loss weights must be nonnegative");
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw UsageError("train: validation_fraction must be in [0,1)");
  }
}

Adam::Adam(Eigen::Index size, double beta1, double beta2, double epsilon)
    : m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)), beta1_(beta1), beta2_(beta2),
      epsilon_(epsilon) {}

void Adam::step(Eigen::VectorXd& theta, const Eigen::VectorXd& gradient, double learning_rate) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * gradient;
  v_ = beta2_ * v_ + (1.0 - beta2_) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  theta.array() -= learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + epsilon_);
}

std::pair<std::vector<ClosureSample>, std::vector<ClosureSample>> split_dataset(
    std::span<const ClosureSample> samples, double validation_fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(samples.size())));
  std::vector<ClosureSample> train_set;
  std::vector<ClosureSample> val_set;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    (k < n_val ? val_set : train_set).push_back(samples[idx[k]]);
  }
  return {std::move(train_set), std::move(val_set)};
}

namespace {

bool finite(const LossBreakdown& l) { return std::isfinite(l.total); }

}  // namespace

TrainResult train(IcnnModel& model, std::span<const ClosureSample> samples, const MomentBasis& basis,
                  const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (samples.empty()) throw EmptyDatasetError("train: dataset is empty");
  auto [train_set, val_set] = split_dataset(samples, cfg.validation_fraction, cfg.seed);
  if (train_set.empty()) throw UsageError("train: validation split leaves no training samples");
  // Without a held-out part the training set doubles as the monitor.
  const std::vector<ClosureSample>& monitor = val_set.empty() ? train_set : val_set;

  model.project_nonnegative();
  Eigen::VectorXd theta = model.parameters();
  Adam adam(theta.size(), cfg.beta1, cfg.beta2, cfg.epsilon);
  std::mt19937_64 rng(cfg.seed ^ 0x5bd1e995ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  const auto wz = model.wz_ranges();

  TrainResult result;
  Eigen::VectorXd best = theta;
  double best_loss = std::numeric_limits<double>::infinity();
  try {
    result.best_validation = loss(model, monitor, basis, cfg.weights);
    best_loss = result.best_validation.total;
  } catch (const NumericalError&) {
  }
  double lr = cfg.learning_rate;
  int since_improvement = 0;
  std::vector<ClosureSample> batch;
  Eigen::VectorXd grad;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = lr;
    try {
      for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
        batch.clear();
        for (std::size_t k = start; k < stop; ++k) batch.push_back(train_set[order[k]]);
        const LossBreakdown l = loss(model, batch, basis, cfg.weights, &grad);
        const double share = static_cast<double>(stop - start) / static_cast<double>(order.size());
        rec.train.total += share * l.total;
        rec.train.h += share * l.h;
        rec.train.alpha += share * l.alpha;
        rec.train.u += share * l.u;
        if (!grad.allFinite()) throw NumericalError("non-finite gradient");
        adam.step(theta, grad, lr);
        for (const auto& [lo, hi] : wz) theta.segment(lo, hi - lo) = theta.segment(lo, hi - lo).cwiseMax(0.0);
        model.set_parameters(theta);
      }
      rec.validation = loss(model, monitor, basis, cfg.weights);
    } catch (const NumericalError& e) {
      rec.validation.total = std::numeric_limits<double>::quiet_NaN();
      result.message = e.what();
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (!finite(rec.validation)) {
      result.diverged = true;
      if (result.message.empty()) result.message = "validation loss is not finite";
      result.message = "training stopped at epoch " + std::to_string(epoch) + ": " + result.message;
      break;
    }
    const bool significant = rec.validation.total < best_loss * (1.0 - 1e-4);
    since_improvement = significant ? 0 : since_improvement + 1;
    if (rec.validation.total < best_loss) {
      best_loss = rec.validation.total;
      best = theta;
      result.best_epoch = epoch;
      result.best_validation = rec.validation;
    }
    if (since_improvement >= cfg.plateau_patience) {
      lr = std::max(cfg.min_learning_rate, lr * cfg.plateau_factor);
      since_improvement = 0;
    }
  }
  model.set_parameters(best);
  return result;
}

}  // namespace nc
