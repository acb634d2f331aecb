#include "nc/quadrature.hpp"

#include "nc/errors.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

namespace nc {

namespace {

// Legendre polynomial P_n(x) and its derivative by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

std::atomic<bool> negative_density_reported{false};

}  // namespace

QuadratureRule build_gauss_legendre(int n_q) {
  if (n_q < 1) {
    throw UsageError("build_gauss_legendre: node count must be positive, got " +
                     std::to_string(n_q));
  }
  QuadratureRule rule;
  rule.dimension = 1;
  rule.n_mu = n_q;
  rule.n_phi = 0;
  rule.nodes.resize(1, n_q);
  rule.weights.resize(n_q);

  // Roots come in +-pairs; solve for the positive half and mirror so the
  // rule is exactly symmetric.
  const int half = (n_q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n_q + 0.5));
    double p = 0.0;
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n_q, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n_q, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // ascending order: node i from the left is -x
    rule.nodes(0, i) = -x;
    rule.nodes(0, n_q - 1 - i) = x;
    rule.weights(i) = w;
    rule.weights(n_q - 1 - i) = w;
  }
  if (n_q % 2 == 1) rule.nodes(0, n_q / 2) = 0.0;
  return rule;
}

QuadratureRule build_projected_sphere(int n_mu, int n_phi) {
  if (n_mu < 1 || n_phi < 1) {
    throw UsageError("build_projected_sphere: n_mu and n_phi must be positive");
  }
  const QuadratureRule mu_rule = build_gauss_legendre(n_mu);
  QuadratureRule rule;
  rule.dimension = 2;
  rule.n_mu = n_mu;
  rule.n_phi = n_phi;
  const int n_q = n_mu * n_phi;
  rule.nodes.resize(2, n_q);
  rule.weights.resize(n_q);

  // Sphere measure is 4 pi; the projection is normalized to 2 pi so that the
  // isotropic kernel is 1/(2 pi).
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  int q = 0;
  for (int i = 0; i < n_mu; ++i) {
    const double mu = mu_rule.nodes(0, i);
    const double radius = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int j = 0; j < n_phi; ++j, ++q) {
      const double phi = (j + 0.5) * dphi;
      rule.nodes(0, q) = radius * std::cos(phi);
      rule.nodes(1, q) = radius * std::sin(phi);
      rule.weights(q) = 0.5 * mu_rule.weights(i) * dphi;
    }
  }
  return rule;
}

double bracket(std::span<const double> values_at_nodes, const QuadratureRule& rule) {
  if (static_cast<Eigen::Index>(values_at_nodes.size()) != rule.size()) {
    throw std::logic_error("bracket: value count " + std::to_string(values_at_nodes.size()) +
                           " does not match quadrature size " + std::to_string(rule.size()));
  }
  double sum = 0.0;
  for (Eigen::Index q = 0; q < rule.size(); ++q) sum += rule.weights(q) * values_at_nodes[q];
  return sum;
}

double bracket(const Eigen::VectorXd& values_at_nodes, const QuadratureRule& rule) {
  return bracket(std::span<const double>(values_at_nodes.data(), values_at_nodes.size()), rule);
}

MomentBasis::MomentBasis(std::shared_ptr<const QuadratureRule> rule, int order)
    : rule_(std::move(rule)), order_(order) {
  if (!rule_) throw UsageError("MomentBasis: null quadrature rule");
  if (order < 0) throw UsageError("MomentBasis: order must be nonnegative");
  const Eigen::Index n_q = rule_->size();
  if (rule_->dimension == 1) {
    table_.resize(order + 1, n_q);
    for (Eigen::Index q = 0; q < n_q; ++q) {
      double power = 1.0;
      for (int i = 0; i <= order; ++i) {
        table_(i, q) = power;
        power *= rule_->nodes(0, q);
      }
    }
  } else if (rule_->dimension == 2) {
    if (order != 1) {
      throw UsageError("MomentBasis: only order 1 (M1) is supported in 2D, got " +
                       std::to_string(order));
    }
    table_.resize(3, n_q);
    table_.row(0).setOnes();
    table_.row(1) = rule_->nodes.row(0);
    table_.row(2) = rule_->nodes.row(1);
  } else {
    throw UsageError("MomentBasis: unsupported velocity dimension");
  }
  mean_ = table_ * rule_->weights;
}

MomentBasis::MomentBasis(const QuadratureRule& rule, int order)
    : MomentBasis(std::make_shared<const QuadratureRule>(rule), order) {}

Eigen::VectorXd moments_of(const Eigen::VectorXd& density_at_nodes, const MomentBasis& basis) {
  const auto& w = basis.weights();
  assert(density_at_nodes.size() == w.size());
  if (density_at_nodes.minCoeff() < -1e-12 &&
      !negative_density_reported.exchange(true)) {
    std::cerr << "warning: moments_of received negative nodal density "
              << density_at_nodes.minCoeff() << "\n";
  }
  // Row 0 is accumulated in the same order as bracket().
  Eigen::VectorXd u(basis.size());
  const auto& table = basis.table();
  for (Eigen::Index i = 0; i < basis.size(); ++i) {
    double sum = 0.0;
    for (Eigen::Index q = 0; q < w.size(); ++q) sum += w(q) * (table(i, q) * density_at_nodes(q));
    u(i) = sum;
  }
  return u;
}

}  // namespace nc
