#pragma once

#include "nc/entropy.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>

namespace nc {

// Normalized moments with the order-zero entry dropped.
struct ReducedMoments {
  Eigen::VectorXd values;
  int dimension = 1;
  int order = 1;
};

enum class Constraint {
  kNone,
  kFirstUpper,   // u1 <= 1
  kFirstLower,   // u1 >= -1
  kSecondUpper,  // u2 <= 1
  kSecondLower,  // u2 >= u1^2
  kThirdUpper,
  kThirdLower,
  kFourthUpper,
  kFourthLower,
  kNorm,         // ||u^r||_2 <= 1
};

std::string to_string(Constraint c);

struct RealizabilityReport {
  // Membership in the closed set; boundary points have margin 0.
  bool realizable = false;
  // Smallest signed slack over the active inequalities.
  double margin = 0.0;
  Constraint binding_constraint = Constraint::kNone;
};

// (u_0, [u_1/u_0, ..., u_N/u_0]).
std::pair<double, ReducedMoments> normalize(const MomentVector& u, int dimension, int order);
MomentVector denormalize(double u0, const ReducedMoments& reduced);

// Kershaw inequalities for 1D monomial moments of order 1..4 on [-1,1].
RealizabilityReport check_kershaw_1d(const ReducedMoments& reduced);

// margin = 1 - ||u^r||_2, the M1 condition in 1D and 2D.
RealizabilityReport check_m1_norm(const ReducedMoments& reduced);

// Kershaw chain in 1D, norm condition in 2D.
RealizabilityReport check_realizability(const ReducedMoments& reduced);

// Slack margin of the applicable check; throws DomainError when the input
// is not realizable.
double boundary_distance(const ReducedMoments& reduced);

}  // namespace nc
