#pragma once

#include "nc/entropy.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nc {

struct NewtonConfig {
  // Stop when ||<m exp(alpha.m)> - u||_inf <= tolerance * min(1, u_0).
  double tolerance = 1e-8;
  int max_iterations = 500;
  double shrink = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 60;
  // Diagonal shift on Cholesky failure, relative to max diag(H); grows x10.
  double regularization_floor = 1e-10;
  double regularization_ceiling = 1e-2;

  void validate() const;
};

struct ClosureResult {
  LagrangeMultipliers alpha;
  double h = 0.0;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  bool converged = false;
  // Empty on success; otherwise what stopped the iteration.
  std::string diagnostics;
};

// Minimizes <exp(alpha.m)> - alpha.u by damped Newton. Cold start is the
// isotropic optimizer [ln(u_0/<1>), 0, ..., 0].
//
// Exceeding max_iterations or exhausting the line search yields
// converged == false. A Hessian that stays indefinite after the largest
// regularization throws BoundaryProximityError.
//
// When objective_history is given, the objective of every accepted iterate
// (starting point included) is appended to it.
ClosureResult solve_dual(const MomentVector& u, const std::optional<LagrangeMultipliers>& warm_start,
                         const NewtonConfig& cfg, const MomentBasis& basis,
                         std::vector<double>* objective_history = nullptr);

// Element-wise solve_dual, order preserved. Exceptions are caught per
// element and reported through converged/diagnostics.
std::vector<ClosureResult> solve_dual_batch(std::span<const MomentVector> us, const NewtonConfig& cfg,
                                            const MomentBasis& basis, bool parallel = true);

}  // namespace nc
