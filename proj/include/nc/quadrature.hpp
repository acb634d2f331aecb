#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

namespace nc {

// Velocity-space quadrature. In 1D the nodes are scalar directions mu in
// [-1,1]; in 2D they are points (v_x, v_y) of the unit disk obtained by
// projecting a tensorized rule on the sphere.
struct QuadratureRule {
  int dimension = 1;
  // dimension x n_q, column q is v_q
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;
  // Construction parameters, kept for metadata (n_mu == n_q in 1D).
  int n_mu = 0;
  int n_phi = 0;

  Eigen::Index size() const { return weights.size(); }
  double total_weight() const { return weights.sum(); }
};

// n-point Gauss-Legendre rule on [-1,1].
QuadratureRule build_gauss_legendre(int n_q);

// Gauss-Legendre in mu times uniform midpoint nodes in phi, projected onto
// the unit disk: v = (sqrt(1-mu^2) cos phi, sqrt(1-mu^2) sin phi).
// Weights sum to 2 pi.
QuadratureRule build_projected_sphere(int n_mu, int n_phi);

// Sum_q w_q values_q.
double bracket(std::span<const double> values_at_nodes, const QuadratureRule& rule);
double bracket(const Eigen::VectorXd& values_at_nodes, const QuadratureRule& rule);

// Monomial moment basis evaluated on a fixed quadrature rule.
//   1D: m = [1, mu, ..., mu^N]
//   2D: m = [1, v_x, v_y]   (order 1 only)
class MomentBasis {
 public:
  MomentBasis(std::shared_ptr<const QuadratureRule> rule, int order);

  // Convenience overload that copies the rule.
  MomentBasis(const QuadratureRule& rule, int order);

  int order() const { return order_; }
  int dimension() const { return rule_->dimension; }
  Eigen::Index size() const { return table_.rows(); }
  Eigen::Index reduced_size() const { return table_.rows() - 1; }

  const QuadratureRule& rule() const { return *rule_; }
  std::shared_ptr<const QuadratureRule> rule_ptr() const { return rule_; }

  // basis_size x n_q table of m_i(v_q); row 0 is all ones.
  const Eigen::MatrixXd& table() const { return table_; }
  const Eigen::VectorXd& weights() const { return rule_->weights; }

  // <m> for each basis function.
  const Eigen::VectorXd& mean() const { return mean_; }

 private:
  std::shared_ptr<const QuadratureRule> rule_;
  int order_;
  Eigen::MatrixXd table_;
  Eigen::VectorXd mean_;
};

// u_i = sum_q w_q m_i(v_q) f(v_q). Small negative densities (below -1e-12)
// are reported once on stderr but do not abort.
Eigen::VectorXd moments_of(const Eigen::VectorXd& density_at_nodes, const MomentBasis& basis);

}  // namespace nc
