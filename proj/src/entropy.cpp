#include "nc/entropy.hpp"

#include "nc/errors.hpp"

#include <cmath>
#include <sstream>

namespace nc {

double eta(double z) {
  if (!(z > 0.0)) throw DomainError("eta: argument must be positive");
  return z * std::log(z) - z;
}

double eta_prime(double z) {
  if (!(z > 0.0)) throw DomainError("eta_prime: argument must be positive");
  return std::log(z);
}

double eta_star(double y) { return std::exp(y); }

double eta_star_prime(double y) { return std::exp(y); }

Eigen::VectorXd exponents(const LagrangeMultipliers& alpha, const MomentBasis& basis) {
  if (alpha.size() != basis.size()) {
    throw UsageError("multiplier length " + std::to_string(alpha.size()) +
                     " does not match basis size " + std::to_string(basis.size()));
  }
  Eigen::VectorXd e = basis.table().transpose() * alpha;
  for (Eigen::Index q = 0; q < e.size(); ++q) {
    if (!(e(q) <= kExponentGuard)) {
      std::ostringstream msg;
      msg << "exponent overflow at quadrature node " << q << ": alpha.m = " << e(q);
      throw RangeError(msg.str(), static_cast<std::size_t>(q), e(q));
    }
  }
  return e;
}

Eigen::VectorXd reconstruct_density(const LagrangeMultipliers& alpha, const MomentBasis& basis) {
  return exponents(alpha, basis).array().exp().matrix();
}

double dual_objective(const LagrangeMultipliers& alpha, const MomentVector& u,
                      const MomentBasis& basis) {
  const Eigen::VectorXd f = reconstruct_density(alpha, basis);
  return bracket(f, basis.rule()) - alpha.dot(u);
}

Eigen::VectorXd dual_gradient(const LagrangeMultipliers& alpha, const MomentVector& u,
                              const MomentBasis& basis) {
  const Eigen::VectorXd f = reconstruct_density(alpha, basis);
  return moments_of(f, basis) - u;
}

Eigen::MatrixXd dual_hessian(const LagrangeMultipliers& alpha, const MomentBasis& basis) {
  const Eigen::VectorXd wf = basis.weights().cwiseProduct(reconstruct_density(alpha, basis));
  const auto& m = basis.table();
  Eigen::MatrixXd h = m * wf.asDiagonal() * m.transpose();
  // force exact symmetry
  return 0.5 * (h + h.transpose());
}

bool hessian_is_positive_definite(const Eigen::MatrixXd& hessian) {
  Eigen::LLT<Eigen::MatrixXd> llt(hessian);
  return llt.info() == Eigen::Success;
}

double entropy_functional(const MomentVector& u, const LagrangeMultipliers& alpha,
                          const MomentBasis& basis) {
  return alpha.dot(u) - bracket(reconstruct_density(alpha, basis), basis.rule());
}

double kinetic_entropy(const Eigen::VectorXd& density_at_nodes, const MomentBasis& basis) {
  Eigen::VectorXd values(density_at_nodes.size());
  for (Eigen::Index q = 0; q < values.size(); ++q) values(q) = eta(density_at_nodes(q));
  return bracket(values, basis.rule());
}

double alpha_zero_from_reduced(const Eigen::VectorXd& alpha_reduced, const MomentBasis& basis) {
  if (alpha_reduced.size() != basis.reduced_size()) {
    throw UsageError("reduced multiplier length does not match basis");
  }
  Eigen::VectorXd alpha(basis.size());
  alpha(0) = 0.0;
  alpha.tail(alpha_reduced.size()) = alpha_reduced;
  const Eigen::VectorXd e = exponents(alpha, basis);
  // log-sum-exp keeps large but admissible exponents accurate
  const double shift = e.maxCoeff();
  const double sum = bracket((e.array() - shift).exp().matrix().eval(), basis.rule());
  return -(shift + std::log(sum));
}

LagrangeMultipliers assemble_normalized_alpha(const Eigen::VectorXd& alpha_reduced,
                                              const MomentBasis& basis) {
  LagrangeMultipliers alpha(basis.size());
  alpha(0) = alpha_zero_from_reduced(alpha_reduced, basis);
  alpha.tail(alpha_reduced.size()) = alpha_reduced;
  return alpha;
}

LagrangeMultipliers rescale_alpha(const LagrangeMultipliers& alpha_normalized, double u0) {
  if (!(u0 > 0.0)) throw DomainError("rescale_alpha: u0 must be positive");
  LagrangeMultipliers alpha = alpha_normalized;
  alpha(0) += std::log(u0);
  return alpha;
}

}  // namespace nc
