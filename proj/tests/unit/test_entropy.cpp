#include <doctest.h>

#include "nc/entropy.hpp"
#include "nc/errors.hpp"
#include "nc/newton.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nc;

namespace {

MomentBasis basis1d(int order, int n = 28) {
  return MomentBasis(std::make_shared<const QuadratureRule>(build_gauss_legendre(n)), order);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

}  // namespace

TEST_CASE("Maxwell-Boltzmann entropy pair") {
  CHECK(eta(1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(eta_star(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eta(eta_star_prime(0.0)) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(eta_prime(eta_star_prime(0.7)) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(eta(0.0), DomainError);
  // Fenchel-Young equality at y = eta'(z)
  for (double z : {0.1, 1.0, 3.5}) CHECK(eta(z) + eta_star(eta_prime(z)) == doctest::Approx(z * eta_prime(z)));
}

TEST_CASE("density reconstruction") {
  const auto b = basis1d(1);
  CHECK((reconstruct_density(vec({0, 0}), b).array() == 1.0).all());
  CHECK((reconstruct_density(vec({-std::log(2.0), 0}), b).array() - 0.5).abs().maxCoeff() <= 1e-15);
  const Eigen::VectorXd f = reconstruct_density(vec({0, 1}), b);
  const Eigen::VectorXd u = moments_of(f, b);
  CHECK(std::abs(u(0) - (std::exp(1.0) - std::exp(-1.0))) <= 1e-12);
  CHECK(std::abs(u(1) - 2.0 / std::exp(1.0)) <= 1e-12);
  CHECK_THROWS_AS(reconstruct_density(vec({800, 0}), b), RangeError);
}

TEST_CASE("dual objective, gradient and Hessian") {
  const auto b = basis1d(1);
  CHECK(dual_objective(vec({0, 0}), vec({2, 0}), b) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dual_objective(vec({-std::log(2.0), 0}), vec({1, 0}), b) ==
        doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-14));
  CHECK(dual_gradient(vec({-std::log(2.0), 0}), vec({1, 0}), b).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(dual_gradient(vec({0, 0}), vec({2, 0}), b).cwiseAbs().maxCoeff() <= 1e-14);
  const Eigen::VectorXd g = dual_gradient(vec({0, 1}), vec({0, 0}), b);
  CHECK(std::abs(g(0) - (std::exp(1.0) - std::exp(-1.0))) <= 1e-12);
  CHECK(std::abs(g(1) - 2.0 / std::exp(1.0)) <= 1e-12);

  const Eigen::MatrixXd h0 = dual_hessian(vec({0, 0}), b);
  CHECK(std::abs(h0(0, 0) - 2.0) <= 1e-14);
  CHECK(std::abs(h0(0, 1)) <= 1e-14);
  CHECK(std::abs(h0(1, 1) - 2.0 / 3.0) <= 1e-14);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int order = 1; order <= 4; ++order) {
    const auto bb = basis1d(order);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd a(order + 1), u(order + 1);
      for (int i = 0; i <= order; ++i) {
        a(i) = U(rng);
        u(i) = U(rng);
      }
      const Eigen::VectorXd grad = dual_gradient(a, u, bb);
      const Eigen::MatrixXd hess = dual_hessian(a, bb);
      CHECK(hess == hess.transpose());
      CHECK(hessian_is_positive_definite(hess));
      const double step = 1e-6;
      for (int i = 0; i <= order; ++i) {
        Eigen::VectorXd ap = a, am = a;
        ap(i) += step;
        am(i) -= step;
        const double fd = (dual_objective(ap, u, bb) - dual_objective(am, u, bb)) / (2 * step);
        CHECK(std::abs(fd - grad(i)) <= 1e-6 * std::max(1.0, std::abs(grad(i))));
        const Eigen::VectorXd fdh = (dual_gradient(ap, u, bb) - dual_gradient(am, u, bb)) / (2 * step);
        CHECK((fdh - hess.col(i)).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, hess.col(i).cwiseAbs().maxCoeff()));
      }
    }
  }
  CHECK_FALSE(hessian_is_positive_definite(Eigen::MatrixXd::Zero(2, 2)));
}

TEST_CASE("entropy functional") {
  const auto b = basis1d(1);
  CHECK(entropy_functional(vec({1, 0}), vec({-std::log(2.0), 0}), b) ==
        doctest::Approx(-std::log(2.0) - 1.0).epsilon(1e-14));
  CHECK(entropy_functional(vec({2, 0}), vec({0, 0}), b) == doctest::Approx(-2.0).epsilon(1e-14));
  // Both formulas agree for Newton-converged pairs.
  NewtonConfig cfg;
  cfg.tolerance = 1e-12;
  for (int order = 1; order <= 4; ++order) {
    const auto bb = basis1d(order);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(order + 1);
    for (int i = 1; i <= order; ++i) a(i) = 0.3 * (i % 2 ? 1 : -1) / i;
    const Eigen::VectorXd u = moments_of(reconstruct_density(a, bb), bb);
    const auto r = solve_dual(u, std::nullopt, cfg, bb);
    REQUIRE(r.converged);
    CHECK(std::abs(entropy_functional(u, r.alpha, bb) - kinetic_entropy(reconstruct_density(r.alpha, bb), bb)) <=
          1e-10);
  }
}

TEST_CASE("normalized multipliers") {
  const auto b = basis1d(1);
  CHECK(alpha_zero_from_reduced(vec({0}), b) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  MomentBasis b2(build_projected_sphere(5, 20), 1);
  CHECK(alpha_zero_from_reduced(vec({0, 0}), b2) == doctest::Approx(-std::log(2.0 * std::numbers::pi)).epsilon(1e-14));

  const Eigen::VectorXd a = assemble_normalized_alpha(vec({1.0}), b);
  const Eigen::VectorXd u = moments_of(reconstruct_density(a, b), b);
  CHECK(std::abs(u(0) - 1.0) <= 1e-14);
  // <mu e^{a mu}> / <e^{a mu}> = coth(a) - 1/a
  CHECK(std::abs(u(1) - (1.0 / std::tanh(1.0) - 1.0)) <= 1e-12);
}

TEST_CASE("scaling law") {
  const auto b = basis1d(1);
  const Eigen::VectorXd a = rescale_alpha(vec({-std::log(2.0), 0}), 2.0);
  CHECK(std::abs(a(0)) <= 1e-15);
  CHECK(a(1) == 0.0);
  CHECK(rescale_alpha(vec({0.3, -0.2}), 1.0) == vec({0.3, -0.2}));
  CHECK_THROWS_AS(rescale_alpha(vec({0.3, -0.2}), 0.0), DomainError);

  NewtonConfig cfg;
  cfg.tolerance = 1e-12;
  const auto b2 = basis1d(2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (int trial = 0; trial < 10; ++trial) {
    const double u1 = U(rng);
    const double u2 = u1 * u1 + (1 - u1 * u1) * (0.2 + 0.6 * std::abs(U(rng)));
    const Eigen::VectorXd ubar = vec({1.0, u1, u2});
    const auto rn = solve_dual(ubar, std::nullopt, cfg, b2);
    const auto rs = solve_dual(3.7 * ubar, std::nullopt, cfg, b2);
    REQUIRE(rn.converged);
    REQUIRE(rs.converged);
    CHECK((rescale_alpha(rn.alpha, 3.7) - rs.alpha).cwiseAbs().maxCoeff() <= 1e-8);
  }
}
