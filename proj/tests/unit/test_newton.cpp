#include <doctest.h>

#include "nc/errors.hpp"
#include "nc/newton.hpp"

#include <cmath>
#include <random>

using namespace nc;

namespace {

MomentBasis basis1d(int order) {
  return MomentBasis(std::make_shared<const QuadratureRule>(build_gauss_legendre(28)), order);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

double residual(const ClosureResult& r, const MomentVector& u, const MomentBasis& b) {
  return (moments_of(reconstruct_density(r.alpha, b), b) - u).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("isotropic closures") {
  const auto b = basis1d(1);
  NewtonConfig cfg;
  const auto r1 = solve_dual(vec({1, 0}), std::nullopt, cfg, b);
  REQUIRE(r1.converged);
  CHECK(std::abs(r1.alpha(0) + std::log(2.0)) <= 1e-10);
  CHECK(std::abs(r1.alpha(1)) <= 1e-10);
  CHECK(r1.iterations <= 3);
  CHECK(std::abs(r1.h - (-std::log(2.0) - 1.0)) <= 1e-10);
  const auto r2 = solve_dual(vec({2, 0}), std::nullopt, cfg, b);
  REQUIRE(r2.converged);
  CHECK(r2.alpha.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(std::abs(r2.h + 2.0) <= 1e-10);
}

TEST_CASE("harder moments need more iterations") {
  const auto b = basis1d(1);
  NewtonConfig cfg;
  const auto near = solve_dual(vec({1, 0.9}), std::nullopt, cfg, b);
  const auto far = solve_dual(vec({1, 0.1}), std::nullopt, cfg, b);
  REQUIRE(near.converged);
  REQUIRE(far.converged);
  CHECK(near.iterations > far.iterations);
  CHECK(residual(near, vec({1, 0.9}), b) <= cfg.tolerance);
  CHECK(residual(far, vec({1, 0.1}), b) <= cfg.tolerance);
  // M1 closed form: u1 = coth(a) - 1/a
  const double a = near.alpha(1);
  CHECK(std::abs(1.0 / std::tanh(a) - 1.0 / a - 0.9) <= 1e-7);
}

TEST_CASE("objective decreases along accepted iterates") {
  const auto b = basis1d(3);
  NewtonConfig cfg;
  std::vector<double> hist;
  const auto r = solve_dual(vec({1, 0.3, 0.4, 0.2}), std::nullopt, cfg, b, &hist);
  REQUIRE(r.converged);
  REQUIRE(hist.size() >= 2);
  for (std::size_t k = 1; k < hist.size(); ++k) CHECK(hist[k] <= hist[k - 1]);
}

TEST_CASE("warm start") {
  const auto b = basis1d(2);
  NewtonConfig cfg;
  const Eigen::VectorXd u = vec({1.3, 0.2, 0.5});
  const auto cold = solve_dual(u, std::nullopt, cfg, b);
  const auto warm = solve_dual(u, cold.alpha, cfg, b);
  CHECK(warm.converged);
  CHECK(warm.iterations <= 1);
}

TEST_CASE("batch solve") {
  const auto b = basis1d(1);
  NewtonConfig cfg;
  const std::vector<MomentVector> same(3, vec({1, 0}));
  const auto rs = solve_dual_batch(same, cfg, b, true);
  REQUIRE(rs.size() == 3);
  CHECK(rs[0].alpha == rs[1].alpha);
  CHECK(rs[1].alpha == rs[2].alpha);

  const auto b4 = basis1d(4);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  std::vector<MomentVector> us;
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd a(5);
    for (int k = 0; k < 5; ++k) a(k) = U(rng);
    us.push_back(moments_of(reconstruct_density(a, b4), b4));
  }
  us.push_back(vec({-1, 0, 0, 0, 0}));
  const auto batch = solve_dual_batch(us, cfg, b4, false);
  for (std::size_t i = 0; i + 1 < us.size(); ++i) {
    const auto single = solve_dual(us[i], std::nullopt, cfg, b4);
    CHECK(batch[i].alpha == single.alpha);
    CHECK(batch[i].iterations == single.iterations);
  }
  // a bad element is reported in place, not thrown
  CHECK_FALSE(batch.back().converged);
  CHECK_FALSE(batch.back().diagnostics.empty());
}

TEST_CASE("invalid inputs") {
  const auto b = basis1d(1);
  NewtonConfig cfg;
  CHECK_THROWS_AS(solve_dual(vec({0, 0}), std::nullopt, cfg, b), DomainError);
  CHECK_THROWS_AS(solve_dual(vec({1, 0, 0}), std::nullopt, cfg, b), UsageError);
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  NewtonConfig few;
  few.max_iterations = 2;
  const auto r = solve_dual(vec({1, 0.95}), std::nullopt, few, b);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.diagnostics.empty());
}
