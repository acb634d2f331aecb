#pragma once

#include "nc/quadrature.hpp"

#include <Eigen/Dense>

namespace nc {

// Moment coordinates u = <m f>; component 0 is the density u_0.
using MomentVector = Eigen::VectorXd;
// Dual variables alpha; alpha[1..] is the reduced part alpha^r.
using LagrangeMultipliers = Eigen::VectorXd;

// Exponents alpha . m(v_q) above this value are rejected as overflow.
inline constexpr double kExponentGuard = 700.0;

// Maxwell-Boltzmann entropy density and its Legendre dual.
double eta(double z);
double eta_prime(double z);
double eta_star(double y);
double eta_star_prime(double y);

// alpha . m(v_q) at every node; throws RangeError past kExponentGuard.
Eigen::VectorXd exponents(const LagrangeMultipliers& alpha, const MomentBasis& basis);

// f_q = exp(alpha . m(v_q)).
Eigen::VectorXd reconstruct_density(const LagrangeMultipliers& alpha, const MomentBasis& basis);

// Negated dual objective <exp(alpha . m)> - alpha . u (convex in alpha).
double dual_objective(const LagrangeMultipliers& alpha, const MomentVector& u,
                      const MomentBasis& basis);

// <m exp(alpha . m)> - u.
Eigen::VectorXd dual_gradient(const LagrangeMultipliers& alpha, const MomentVector& u,
                              const MomentBasis& basis);

// H = <m m^T exp(alpha . m)>.
Eigen::MatrixXd dual_hessian(const LagrangeMultipliers& alpha, const MomentBasis& basis);

// Cholesky check of the dual Hessian. Returns false for a numerically
// indefinite matrix instead of throwing.
bool hessian_is_positive_definite(const Eigen::MatrixXd& hessian);

// h(u) = alpha . u - <exp(alpha . m)>, alpha the dual optimizer for u.
double entropy_functional(const MomentVector& u, const LagrangeMultipliers& alpha,
                          const MomentBasis& basis);

// <eta(f)> for a nodal density; used only to cross-check entropy_functional.
double kinetic_entropy(const Eigen::VectorXd& density_at_nodes, const MomentBasis& basis);

// alpha_0 = -ln <exp(alpha^r . m^r)>, the multiplier that gives unit mass.
double alpha_zero_from_reduced(const Eigen::VectorXd& alpha_reduced, const MomentBasis& basis);

// [alpha_0(alpha^r), alpha^r].
LagrangeMultipliers assemble_normalized_alpha(const Eigen::VectorXd& alpha_reduced,
                                              const MomentBasis& basis);

// Multipliers of u = u0 * u_bar from those of u_bar: adds ln u0 to component 0.
LagrangeMultipliers rescale_alpha(const LagrangeMultipliers& alpha_normalized, double u0);

}  // namespace nc
