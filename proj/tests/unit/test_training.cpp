#include <doctest.h>

#include "nc/errors.hpp"
#include "nc/training.hpp"

#include <cmath>

using namespace nc;

namespace {

MomentBasis basis1d(int order) {
  return MomentBasis(std::make_shared<const QuadratureRule>(build_gauss_legendre(28)), order);
}

}  // namespace

TEST_CASE("Adam step") {
  Adam opt(2, 0.9, 0.999, 1e-8);
  Eigen::VectorXd th = Eigen::Vector2d(1.0, -1.0);
  opt.step(th, Eigen::Vector2d(0.5, -2.0), 0.1);
  // first bias-corrected step moves every coordinate by lr against the sign
  CHECK(th(0) == doctest::Approx(0.9).epsilon(1e-7));
  CHECK(th(1) == doctest::Approx(-0.9).epsilon(1e-7));
}

TEST_CASE("dataset split") {
  std::vector<ClosureSample> s(20);
  for (int i = 0; i < 20; ++i) s[i].h = i;
  const auto [tr, va] = split_dataset(s, 0.25, 3);
  CHECK(tr.size() == 15);
  CHECK(va.size() == 5);
  const auto [tr2, va2] = split_dataset(s, 0.25, 3);
  for (std::size_t i = 0; i < va.size(); ++i) CHECK(va[i].h == va2[i].h);
  double sum = 0;
  for (const auto& x : tr) sum += x.h;
  for (const auto& x : va) sum += x.h;
  CHECK(sum == 190);
}

TEST_CASE("training overfits a small dataset") {
  const auto b = basis1d(1);
  SamplerConfig sc;
  sc.count = 10;
  sc.seed = 2;
  // away from the boundary; near it alpha ~ 1/(1-u1) makes the fit stiff
  sc.delta = 0.3;
  const auto data = sample_uniform_moments(sc, b);
  IcnnModel m = IcnnModel::build(1, 10, 7);
  initialize(m, 1);
  TrainConfig cfg;
  cfg.epochs = 5000;
  cfg.batch_size = 10;
  cfg.learning_rate = 1e-2;
  cfg.plateau_patience = 200;
  cfg.validation_fraction = 0.0;
  double min_wz = 0.0;
  const auto r = train(m, data, b, cfg, [&](const EpochRecord&) { min_wz = std::min(min_wz, m.min_wz()); });
  CHECK_FALSE(r.diverged);
  CHECK(r.history.size() == 5000);
  CHECK(min_wz >= 0.0);
  CHECK(loss(m, data, b).total < 1e-6);
}

TEST_CASE("training is deterministic and keeps Wz nonnegative") {
  const auto b = basis1d(2);
  SamplerConfig sc;
  sc.order = 2;
  sc.count = 60;
  const auto data = sample_uniform_moments(sc, b);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.learning_rate = 5e-2;
  auto run = [&] {
    IcnnModel m = IcnnModel::build(2, 6, 3);
    initialize(m, 7);
    train(m, data, b, cfg);
    return m;
  };
  const IcnnModel a = run();
  const IcnnModel c = run();
  CHECK(a.parameters() == c.parameters());
  CHECK(a.min_wz() >= 0.0);
}

TEST_CASE("training configuration") {
  TrainConfig c;
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = TrainConfig{};
  c.weights.h = -1;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = TrainConfig{};
  c.validation_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), UsageError);
}
