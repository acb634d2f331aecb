#include <doctest.h>

#include "nc/bench.hpp"
#include "nc/config.hpp"
#include "nc/errors.hpp"
#include "nc/metrics.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace nc;

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "epochs = 1e4\n"
      "\n"
      "lr=3e-3   # trailing\n"
      "box = -50 50\n"
      "parallel = yes\n"
      "name = a b\n");
  const Config c = Config::parse(in, "test");
  CHECK(c.get_long("epochs") == 10000);
  CHECK(c.get_int("epochs") == 10000);
  CHECK(c.get_double("lr") == 3e-3);
  CHECK(c.get_string("box") == "-50 50");
  CHECK(c.get_bool("parallel"));
  CHECK(c.get_string("name") == "a b");
  CHECK_THROWS_AS(c.get_int("lr"), UsageError);
  CHECK_THROWS_AS(c.get_double("name"), UsageError);
  CHECK_THROWS_AS(c.get_string("missing"), UsageError);
  CHECK_THROWS_AS(c.require_known({"epochs"}), UsageError);
  CHECK_NOTHROW(c.require_known({"epochs", "lr", "box", "parallel", "name"}));

  std::istringstream bad("just words\n");
  CHECK_THROWS_AS(Config::parse(bad, "bad"), UsageError);

  const auto p = std::filesystem::temp_directory_path() / "nc_unit_cfg.cfg";
  c.write(p);
  const Config back = Config::load(p);
  CHECK(back.entries() == c.entries());
  CHECK_THROWS_AS(Config::load("/nonexistent/x.cfg"), IoError);
}

TEST_CASE("error metrics against hand values") {
  auto rule = std::make_shared<const QuadratureRule>(build_gauss_legendre(28));
  MomentBasis b(rule, 1);
  const IcnnModel z = IcnnModel::build(1, 4, 2);
  // zero network predicts alpha = [-ln 2, 0], u = [1, 0], h = 0
  ClosureSample s1;
  s1.u = Eigen::Vector2d(1.0, 0.0);
  s1.alpha = Eigen::Vector2d(-std::log(2.0), 0.0);
  s1.h = -1.0;
  ClosureSample s2;
  s2.u = Eigen::Vector2d(1.0, 0.5);
  s2.alpha = Eigen::Vector2d(-std::log(2.0), 2.0);
  s2.h = 3.0;
  const std::vector<ClosureSample> set{s1, s2};
  const ErrorMetrics m = evaluate_model(z, set, b);
  CHECK(m.count == 2);
  CHECK(m.mse_h == doctest::Approx((1.0 + 9.0) / 2));
  CHECK(m.mae_h == doctest::Approx(2.0));
  CHECK(m.mae_alpha == doctest::Approx((0.0 + 1.0) / 2));
  CHECK(m.mse_alpha == doctest::Approx((0.0 + 2.0) / 2));
  CHECK(m.mse_u == doctest::Approx((0.0 + 0.125) / 2));
  const std::string table = format_metrics_table(m, "zero");
  CHECK(table.find("MAE(alpha)") != std::string::npos);
  CHECK(table.find("zero") != std::string::npos);
}

TEST_CASE("timing summary") {
  const TimingStats t = summarize({1.0, 2.0, 3.0});
  CHECK(t.mean == 2.0);
  CHECK(t.stddev == doctest::Approx(1.0));
  CHECK(t.repetitions == 3);
  CHECK(summarize({}).repetitions == 0);
}

TEST_CASE("benchmark populations") {
  auto rule = std::make_shared<const QuadratureRule>(build_gauss_legendre(28));
  MomentBasis b(rule, 2);
  BenchConfig cfg;
  cfg.seed = 3;
  const auto shell = population_moments(Population::kBoundary, 50, b, cfg);
  const auto inner = population_moments(Population::kInterior, 50, b, cfg);
  REQUIRE(shell.size() == 50);
  REQUIRE(inner.size() == 50);
  for (const auto& u : shell) {
    const double m = boundary_distance(normalize(u, 1, 2).second);
    CHECK(m > 0.005);
    CHECK(m <= 0.01);
  }
  for (const auto& u : inner) CHECK(boundary_distance(normalize(u, 1, 2).second) > 0.4);
  CHECK(parse_population("boundary") == Population::kBoundary);
  CHECK_THROWS_AS(parse_population("edge"), UsageError);

  const IcnnModel z = IcnnModel::build(2, 4, 2);
  cfg.populations = {Population::kInterior};
  cfg.batch_sizes = {1, 20};
  cfg.repetitions = 3;
  const auto rows = run_bench(z, b, cfg);
  CHECK(rows.size() == 4);
  CHECK(per_sample_mean(rows, Population::kInterior, "icnn", 20) > 0.0);
  CHECK(std::isnan(per_sample_mean(rows, Population::kUniform, "icnn", 20)));
}
