#pragma once

#include "nc/entropy.hpp"
#include "nc/sampler.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nc {

// z_k = act(Wz z_{k-1} + Wx x + b). The first layer has no Wz (zero columns).
struct IcnnLayer {
  Eigen::MatrixXd wz;
  Eigen::MatrixXd wx;
  Eigen::VectorXd b;
  // identity activation instead of softplus
  bool linear = false;

  Eigen::Index width() const { return b.size(); }
};

class IcnnModel {
 public:
  IcnnModel() = default;
  // Throws UsageError if the layer shapes are inconsistent or the network
  // does not end in a single linear unit.
  IcnnModel(int input_dimension, std::vector<IcnnLayer> layers);

  // width x depth softplus block, a softplus bridge of width/2 and a linear
  // scalar output. All parameters zero.
  static IcnnModel build(int input_dimension, int width, int depth);

  int input_dimension() const { return input_dimension_; }
  // Block shape; 0 for models not made by build().
  int block_width() const { return block_width_; }
  int block_depth() const { return block_depth_; }
  const std::vector<IcnnLayer>& layers() const { return layers_; }
  std::vector<IcnnLayer>& mutable_layers() { return layers_; }

  // Flat parameter vector: per layer Wz (row-major), Wx (row-major), b.
  Eigen::Index parameter_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);

  // Index ranges in the flat vector that belong to Wz blocks.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> wz_ranges() const;

  // Clip Wz at zero.
  void project_nonnegative();
  // Smallest Wz entry (+inf if there are none).
  double min_wz() const;

  // Free-form training metadata (dataset hash, epochs, losses, quadrature).
  std::map<std::string, std::string> metadata;

 private:
  void validate() const;

  int input_dimension_ = 0;
  int block_width_ = 0;
  int block_depth_ = 0;
  std::vector<IcnnLayer> layers_;
};

// Wz ~ U(0, 1/fan_in), Wx Glorot-uniform, b = 0.
void initialize(IcnnModel& model, std::uint64_t seed);

double softplus(double x);
double sigmoid(double x);

double forward(const IcnnModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd input_gradient(const IcnnModel& model, const Eigen::VectorXd& x);

// Column-wise evaluation of N x B inputs. Either output may be null.
void evaluate_batch(const IcnnModel& model, const Eigen::MatrixXd& inputs, Eigen::RowVectorXd* values,
                    Eigen::MatrixXd* gradients);

struct InferenceResult {
  double h = 0.0;
  LagrangeMultipliers alpha;
  MomentVector u;
};

InferenceResult infer_normalized(const IcnnModel& model, const Eigen::VectorXd& reduced,
                                 const MomentBasis& basis);

// Normalizes u, infers, and adds ln u_0 to alpha_0. h and u stay those of
// the normalized problem.
InferenceResult infer_scaled(const IcnnModel& model, const MomentVector& u, const MomentBasis& basis);

// Batched infer_scaled; the network runs on all inputs at once.
std::vector<InferenceResult> infer_scaled_batch(const IcnnModel& model, std::span<const MomentVector> us,
                                                const MomentBasis& basis, bool parallel = true);

struct LossWeights {
  double h = 1.0;
  double alpha = 1.0;
  double u = 1.0;
  // Compare alpha_0 as well as alpha^r.
  bool full_alpha = true;
};

struct LossBreakdown {
  double total = 0.0;
  double h = 0.0;
  double alpha = 0.0;
  double u = 0.0;
};

// Unweighted terms are batch means of squared errors averaged over vector
// components; total applies the weights. If gradient is non-null it
// receives d total / d parameters in the flat layout.
LossBreakdown loss(const IcnnModel& model, std::span<const ClosureSample> batch, const MomentBasis& basis,
                   const LossWeights& weights = {}, Eigen::VectorXd* gradient = nullptr);

// Layout string "WxD" parsed into (width, depth).
std::pair<int, int> parse_layout(const std::string& text);

}  // namespace nc
