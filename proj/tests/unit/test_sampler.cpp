#include <doctest.h>

#include "nc/dataset.hpp"
#include "nc/errors.hpp"
#include "nc/sampler.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace nc;
namespace fs = std::filesystem;

namespace {

MomentBasis basis1d(int order) {
  return MomentBasis(std::make_shared<const QuadratureRule>(build_gauss_legendre(28)), order);
}

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nc_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("uniform moment sampling") {
  const auto b = basis1d(1);
  SamplerConfig cfg;
  cfg.count = 300;
  cfg.seed = 4;
  const auto s = sample_uniform_moments(cfg, b);
  REQUIRE(s.size() == 300);
  for (const auto& x : s) {
    CHECK(x.u(0) == 1.0);
    CHECK(std::abs(x.u(1)) <= 0.99);
    CHECK((moments_of(reconstruct_density(x.alpha, b), b) - x.u).cwiseAbs().maxCoeff() <= cfg.tau);
    CHECK(x.h == doctest::Approx(entropy_functional(x.u, x.alpha, b)).epsilon(1e-14));
  }
  const auto again = sample_uniform_moments(cfg, b);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].u == again[i].u);
    CHECK(s[i].alpha == again[i].alpha);
  }

  SamplerConfig shell = cfg;
  shell.order = 2;
  shell.delta = 0.02;
  shell.max_margin = 0.05;
  shell.min_acceptance = 0.0;
  shell.draw_window = 1000000;
  shell.count = 50;
  const auto b2 = basis1d(2);
  for (const auto& x : sample_uniform_moments(shell, b2)) {
    const double m = sample_margin(x, 1, 2);
    CHECK(m > 0.02);
    CHECK(m <= 0.05);
  }
}

TEST_CASE("uniform multiplier sampling") {
  const auto b = basis1d(2);
  SamplerConfig cfg;
  cfg.order = 2;
  cfg.count = 200;
  for (const auto& x : sample_uniform_alpha(cfg, b)) {
    CHECK(std::abs(moments_of(reconstruct_density(x.alpha, b), b)(0) - 1.0) <= 1e-12);
    CHECK(x.alpha.tail(2).cwiseAbs().maxCoeff() <= 10.0);
  }
  const auto iso = sample_from_reduced_alpha(Eigen::VectorXd::Zero(1), basis1d(1));
  CHECK(iso.u(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(iso.u(1)) <= 1e-15);
  CHECK(iso.alpha(0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(iso.h == doctest::Approx(-std::log(2.0) - 1.0).epsilon(1e-14));

  // 2D: wide box, samples stay strictly inside the unit disk.
  MomentBasis b2(build_projected_sphere(5, 40), 1);
  SamplerConfig c2;
  c2.dimension = 2;
  c2.box_lo = -50;
  c2.box_hi = 50;
  c2.count = 500;
  double largest = 0.0;
  double close = 0;
  for (const auto& x : sample_uniform_alpha(c2, b2)) {
    largest = std::max(largest, x.u.tail(2).norm());
    if (sample_margin(x, 2, 1) < 0.05) close += 1;
  }
  CHECK(largest < 1.0);
  CHECK(close / 500 > 0.5);
}

TEST_CASE("sampler configuration") {
  SamplerConfig c;
  c.delta = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = SamplerConfig{};
  c.dimension = 2;
  c.order = 2;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = SamplerConfig{};
  c.box_lo = 1;
  c.box_hi = 1;
  CHECK_THROWS_AS(c.validate(), UsageError);
  CHECK(parse_sampling_algorithm("uniform-alpha") == SamplingAlgorithm::kUniformAlpha);
  CHECK_THROWS_AS(parse_sampling_algorithm("x"), UsageError);
  // Margin window so thin that the probe rejects everything.
  const auto b = basis1d(2);
  SamplerConfig thin;
  thin.order = 2;
  thin.delta = 1e-9;
  thin.max_margin = 2e-9;
  thin.draw_window = 1000;
  CHECK_THROWS_AS(sample_uniform_moments(thin, b), UsageError);
}

TEST_CASE("dataset round trip") {
  const auto b = basis1d(2);
  SamplerConfig cfg;
  cfg.order = 2;
  cfg.count = 1000;
  cfg.seed = 12;
  Dataset d;
  d.samples = sample_uniform_moments(cfg, b);
  d.header.dimension = 1;
  d.header.order = 2;
  d.header.algorithm = "uniform-u";
  d.header.seed = 12;
  d.header.delta = 0.01;
  d.header.tau = 1e-8;
  d.header.n_mu = 28;
  d.header.extra["note"] = "x";
  const fs::path p = temp_file("round.csv");
  write_dataset(d, p);
  const Dataset r = read_dataset(p, std::pair{1, 2});
  REQUIRE(r.samples.size() == d.samples.size());
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    CHECK(r.samples[i].u == d.samples[i].u);
    CHECK(r.samples[i].alpha == d.samples[i].alpha);
    CHECK(r.samples[i].h == d.samples[i].h);
  }
  CHECK(r.header.seed == 12);
  CHECK(r.header.extra.at("note") == "x");
  CHECK_THROWS_AS(read_dataset(p, std::pair{1, 3}), HeaderMismatchError);

  Dataset empty = d;
  empty.samples.clear();
  const fs::path pe = temp_file("empty.csv");
  write_dataset(empty, pe);
  CHECK_THROWS_AS(read_dataset(pe), EmptyDatasetError);

  const fs::path pb = temp_file("broken.csv");
  {
    std::ifstream in(p);
    std::ofstream out(pb);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      if (++n == 20) line = "1,2,oops";
      out << line << "\n";
    }
  }
  try {
    read_dataset(pb);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 20);
  }
  CHECK_THROWS_AS(read_dataset(temp_file("missing.csv")), IoError);
}

TEST_CASE("shortest round-trip doubles") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(parse_double(format_double(x)) == x);
  CHECK(format_double(0.5) == "0.5");
  CHECK(parse_double(" +1e-3") == 1e-3);
  CHECK_THROWS_AS(parse_double("1.0x"), UsageError);
}
