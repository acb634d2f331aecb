#include <doctest.h>

#include "nc/errors.hpp"
#include "nc/icnn.hpp"
#include "nc/model_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace nc;
namespace fs = std::filesystem;

namespace {

MomentBasis basis1d(int order) {
  return MomentBasis(std::make_shared<const QuadratureRule>(build_gauss_legendre(28)), order);
}

IcnnModel random_model(int n, int w, int d, std::uint64_t seed) {
  IcnnModel m = IcnnModel::build(n, w, d);
  initialize(m, seed);
  // nonzero biases so that the test covers them
  Eigen::VectorXd th = m.parameters();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (Eigen::Index i = 0; i < th.size(); ++i) th(i) += 0.1 * U(rng);
  m.set_parameters(th);
  m.project_nonnegative();
  return m;
}

// One softplus unit followed by a linear output.
IcnnModel one_unit() {
  IcnnLayer hidden;
  hidden.wz = Eigen::MatrixXd::Zero(0, 0);
  hidden.wx = Eigen::MatrixXd::Ones(1, 1);
  hidden.b = Eigen::VectorXd::Zero(1);
  IcnnLayer out;
  out.wz = Eigen::MatrixXd::Ones(1, 1);
  out.wx = Eigen::MatrixXd::Zero(1, 1);
  out.b = Eigen::VectorXd::Zero(1);
  out.linear = true;
  return IcnnModel(1, {hidden, out});
}

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nc_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("network shape") {
  const IcnnModel m = IcnnModel::build(2, 18, 8);
  CHECK(m.layers().size() == 10);
  CHECK(m.layers()[0].wz.cols() == 0);
  CHECK(m.layers()[8].width() == 9);
  CHECK(m.layers()[9].width() == 1);
  CHECK(m.layers()[9].linear);
  CHECK(m.block_width() == 18);
  CHECK(m.block_depth() == 8);
  CHECK(parse_layout("10x7") == std::pair{10, 7});
  CHECK_THROWS_AS(parse_layout("10-7"), UsageError);
  CHECK_THROWS_AS(IcnnModel::build(1, 1, 3), UsageError);
}

TEST_CASE("zero and one-unit networks") {
  const IcnnModel z = IcnnModel::build(2, 10, 3);
  Eigen::VectorXd x(2);
  x << 0.3, -0.7;
  CHECK(forward(z, x) == 0.0);
  CHECK(input_gradient(z, x).cwiseAbs().maxCoeff() == 0.0);

  const IcnnModel u = one_unit();
  for (double v : {-3.0, 0.0, 0.4, 20.0}) {
    Eigen::VectorXd in(1);
    in << v;
    CHECK(forward(u, in) == doctest::Approx(std::log1p(std::exp(v))).epsilon(1e-14));
    CHECK(input_gradient(u, in)(0) == doctest::Approx(1.0 / (1.0 + std::exp(-v))).epsilon(1e-14));
  }
  CHECK(softplus(800.0) == 800.0);
  CHECK(std::isfinite(softplus(-800.0)));
}

TEST_CASE("input convexity and gradient") {
  const IcnnModel m = random_model(3, 10, 4, 8);
  CHECK(m.min_wz() >= 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a(i) = U(rng);
      b(i) = U(rng);
    }
    CHECK(forward(m, 0.5 * (a + b)) <= 0.5 * (forward(m, a) + forward(m, b)) + 1e-9);
  }
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = U(rng);
    const Eigen::VectorXd g = input_gradient(m, x);
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-6;
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (forward(m, xp) - forward(m, xm)) / (2 * h);
      CHECK(std::abs(fd - g(i)) <= 1e-6 * std::max(1.0, std::abs(g(i))));
    }
    // Hessian by differences of the exact gradient is positive semidefinite.
    Eigen::Matrix3d hess;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += 1e-5;
      xm(i) -= 1e-5;
      hess.col(i) = (input_gradient(m, xp) - input_gradient(m, xm)) / 2e-5;
    }
    const Eigen::Matrix3d sym = 0.5 * (hess + hess.transpose());
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym).eigenvalues().minCoeff() >= -1e-6);
  }

  Eigen::MatrixXd xs(3, 5);
  xs.setRandom();
  Eigen::RowVectorXd vals;
  Eigen::MatrixXd grads;
  evaluate_batch(m, xs, &vals, &grads);
  for (int j = 0; j < 5; ++j) {
    CHECK(vals(j) == doctest::Approx(forward(m, xs.col(j))).epsilon(1e-14));
    CHECK((grads.col(j) - input_gradient(m, xs.col(j))).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("parameters and projection") {
  IcnnModel m = random_model(2, 6, 3, 2);
  const Eigen::VectorXd th = m.parameters();
  CHECK(th.size() == m.parameter_count());
  Eigen::VectorXd neg = th;
  for (auto [lo, hi] : m.wz_ranges())
    for (Eigen::Index i = lo; i < hi; ++i) neg(i) = -1.0;
  m.set_parameters(neg);
  CHECK(m.min_wz() == -1.0);
  m.project_nonnegative();
  CHECK(m.min_wz() == 0.0);
  CHECK_THROWS_AS(m.set_parameters(Eigen::VectorXd::Zero(3)), UsageError);
}

TEST_CASE("inference") {
  const auto b = basis1d(1);
  const IcnnModel z = IcnnModel::build(1, 10, 7);
  Eigen::VectorXd r(1);
  r << 0.0;
  const auto iso = infer_normalized(z, r, b);
  CHECK(iso.alpha(0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(iso.alpha(1) == 0.0);
  CHECK(iso.h == 0.0);

  const IcnnModel m = random_model(2, 8, 3, 6);
  const auto b2 = basis1d(2);
  Eigen::VectorXd u(3);
  u << 1.0, 0.2, 0.4;
  const auto a = infer_scaled(m, u, b2);
  CHECK(std::abs(a.u(0) - 1.0) <= 1e-12);
  CHECK((a.u - moments_of(reconstruct_density(a.alpha, b2), b2)).cwiseAbs().maxCoeff() <= 1e-14);
  const auto n = infer_normalized(m, u.tail(2), b2);
  CHECK(a.alpha == n.alpha);
  const auto c = infer_scaled(m, 2.5 * u, b2);
  Eigen::VectorXd diff = c.alpha - a.alpha;
  CHECK(diff(0) == doctest::Approx(std::log(2.5)).epsilon(1e-14));
  CHECK(diff.tail(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(infer_scaled(m, -u, b2), DomainError);
  CHECK_THROWS_AS(infer_normalized(m, u.tail(1), basis1d(1)), HeaderMismatchError);

  const std::vector<MomentVector> us{u, 2.5 * u, 0.5 * u};
  const auto batch = infer_scaled_batch(m, us, b2);
  for (std::size_t i = 0; i < us.size(); ++i) {
    const auto s = infer_scaled(m, us[i], b2);
    CHECK((batch[i].alpha - s.alpha).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(batch[i].h == doctest::Approx(s.h).epsilon(1e-13));
  }
}

TEST_CASE("loss values and parameter gradient") {
  const auto b = basis1d(1);
  const IcnnModel z = IcnnModel::build(1, 10, 7);
  ClosureSample iso;
  iso.u = Eigen::Vector2d(1.0, 0.0);
  iso.alpha = Eigen::Vector2d(-std::log(2.0), 0.0);
  iso.h = -std::log(2.0) - 1.0;
  const std::vector<ClosureSample> one{iso};
  const auto l0 = loss(z, one, b);
  CHECK(l0.h == doctest::Approx(std::pow(std::log(2.0) + 1.0, 2)).epsilon(1e-14));
  CHECK(l0.h == doctest::Approx(2.8667).epsilon(1e-4));
  CHECK(l0.alpha == 0.0);
  CHECK(std::abs(l0.u) <= 1e-30);

  // Labels produced by the model itself: the h and alpha terms vanish, the
  // u term is the model's own reconstruction error at that input.
  const IcnnModel m = random_model(2, 6, 3, 10);
  const auto b2 = basis1d(2);
  Eigen::VectorXd r(2);
  r << 0.1, 0.5;
  const auto inf = infer_normalized(m, r, b2);
  ClosureSample self{Eigen::Vector3d(1.0, 0.1, 0.5), inf.alpha, inf.h};
  const std::vector<ClosureSample> mine{self};
  const auto ls = loss(m, mine, b2);
  CHECK(ls.h <= 1e-20);
  CHECK(ls.alpha <= 1e-20);
  CHECK(ls.u == doctest::Approx((self.u - inf.u).squaredNorm() / 3).epsilon(1e-12));
  CHECK(loss(m, mine, b2, LossWeights{1, 1, 0, true}).total <= 1e-20);

  std::vector<ClosureSample> batch;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int i = 0; i < 8; ++i) batch.push_back(sample_from_reduced_alpha(Eigen::Vector2d(U(rng), U(rng)), b2));
  for (bool full : {true, false}) {
    LossWeights w{0.7, 1.3, 2.0, full};
    Eigen::VectorXd g;
    loss(m, batch, b2, w, &g);
    const Eigen::VectorXd th = m.parameters();
    REQUIRE(g.size() == th.size());
    IcnnModel probe = m;
    for (int k = 0; k < 12; ++k) {
      // ten spread-out entries plus the output weights and bias
      const Eigen::Index i = k < 10 ? (k * 37 + 3) % th.size() : th.size() - 12 + k;
      const double h = 1e-6 * std::max(1.0, std::abs(th(i)));
      Eigen::VectorXd tp = th, tm = th;
      tp(i) += h;
      tm(i) -= h;
      probe.set_parameters(tp);
      const double lp = loss(probe, batch, b2, w).total;
      probe.set_parameters(tm);
      const double lm = loss(probe, batch, b2, w).total;
      const double fd = (lp - lm) / (2 * h);
      CHECK(std::abs(fd - g(i)) <= 1e-4 * std::max(std::abs(g(i)), 1e-3));
    }
  }
}

TEST_CASE("model files") {
  IcnnModel m = random_model(2, 8, 3, 21);
  m.metadata["quadrature"] = "gauss-legendre:28";
  m.metadata["odd value"] = "a=b\nc";
  const fs::path p = temp_file("model.icnn");
  save_model(m, p);
  const IcnnModel r = load_model(p, 2);
  CHECK(r.parameters() == m.parameters());
  CHECK(r.metadata == m.metadata);
  CHECK(r.block_width() == 8);
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd x(2);
    x << U(rng), U(rng);
    CHECK(forward(r, x) == forward(m, x));
    CHECK(input_gradient(r, x) == input_gradient(m, x));
  }
  CHECK_THROWS_AS(load_model(p, 1), HeaderMismatchError);

  std::string text;
  {
    std::ifstream in(p);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const fs::path bad = temp_file("bad.icnn");
  {
    std::ofstream out(bad);
    out << "XXCICNN" << text.substr(6);
  }
  CHECK_THROWS_AS(load_model(bad), ModelFormatError);
  {
    std::ofstream out(bad);
    out << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_model(bad), ModelFormatError);
  CHECK_THROWS_AS(load_model(temp_file("nope.icnn")), IoError);
}
