#pragma once

#include "nc/entropy.hpp"
#include "nc/newton.hpp"
#include "nc/realizability.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace nc {

// Training triplet for the normalized problem: u has u_0 = 1, alpha is the
// full multiplier vector and h = alpha.u - <exp(alpha.m)>.
struct ClosureSample {
  MomentVector u;
  LagrangeMultipliers alpha;
  double h = 0.0;
};

enum class SamplingAlgorithm { kUniformMoments, kUniformAlpha };

std::string to_string(SamplingAlgorithm alg);
SamplingAlgorithm parse_sampling_algorithm(const std::string& name);

struct SamplerConfig {
  int dimension = 1;
  int order = 1;
  long count = 1000;
  // Uniform-moment sampling keeps draws with delta < margin <= max_margin.
  double delta = 0.01;
  double max_margin = std::numeric_limits<double>::infinity();
  double tau = 1e-8;
  // Box for alpha^r, same bounds on every reduced component.
  double box_lo = -10.0;
  double box_hi = 10.0;
  std::uint64_t seed = 0;
  // Per-sample cap on rejected draws and the probe window length.
  long draw_window = 100000;
  // Abort when the probe window accepts less than this fraction.
  double min_acceptance = 0.01;

  void validate() const;
};

struct SamplingStats {
  long draws = 0;
  long accepted = 0;
  long newton_failures = 0;
  long overflow_discards = 0;
  double probe_acceptance = 1.0;
};

// Rejection sampling of the reduced realizable set followed by a Newton
// solve for each accepted moment.
std::vector<ClosureSample> sample_uniform_moments(const SamplerConfig& cfg, const MomentBasis& basis,
                                                  SamplingStats* stats = nullptr);

// Uniform alpha^r in the box; alpha_0 and u follow analytically.
std::vector<ClosureSample> sample_uniform_alpha(const SamplerConfig& cfg, const MomentBasis& basis,
                                                SamplingStats* stats = nullptr);

// The analytic label for one reduced multiplier vector.
ClosureSample sample_from_reduced_alpha(const Eigen::VectorXd& alpha_reduced, const MomentBasis& basis);

// Bounding box of the reduced realizable set, per component.
std::pair<Eigen::VectorXd, Eigen::VectorXd> realizable_bounding_box(int dimension, int order);

// Kershaw/M1 margin of a normalized sample.
double sample_margin(const ClosureSample& s, int dimension, int order);

}  // namespace nc
