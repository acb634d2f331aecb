#include "nc/bench.hpp"

#include "nc/errors.hpp"
#include "nc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nc {

std::string to_string(Population p) {
  switch (p) {
    case Population::kUniform: return "uniform";
    case Population::kBoundary: return "boundary";
    case Population::kInterior: return "interior";
  }
  return "?";
}

Population parse_population(const std::string& name) {
  if (name == "uniform") return Population::kUniform;
  if (name == "boundary") return Population::kBoundary;
  if (name == "interior") return Population::kInterior;
  throw UsageError("unknown population '" + name + "' (expected uniform, boundary or interior)");
}

void BenchConfig::validate() const {
  if (populations.empty()) throw UsageError("bench: no populations");
  if (batch_sizes.empty()) throw UsageError("bench: no batch sizes");
  for (long b : batch_sizes)
    if (b < 1) throw UsageError("bench: batch sizes must be positive");
  if (repetitions < 2) throw UsageError("bench: need at least 2 repetitions for a standard deviation");
  if (!(boundary_margin > 0.0)) throw UsageError("bench: boundary_margin must be positive");
  if (!(interior_margin > boundary_margin)) throw UsageError("bench: interior_margin must exceed boundary_margin");
  if (!(uniform_margin > 0.0)) throw UsageError("bench: uniform_margin must be positive");
  newton.validate();
}

std::vector<MomentVector> population_moments(Population p, long count, const MomentBasis& basis,
                                             const BenchConfig& cfg) {
  SamplerConfig sc;
  sc.dimension = basis.dimension();
  sc.order = basis.order();
  sc.count = count;
  sc.tau = cfg.newton.tolerance;
  sc.seed = cfg.seed + 1000 * (static_cast<std::uint64_t>(p) + 1);
  // thin shells accept few box draws; that is expected here
  sc.min_acceptance = 0.0;
  sc.draw_window = 10000000;
  switch (p) {
    case Population::kUniform:
      sc.delta = cfg.uniform_margin;
      break;
    case Population::kBoundary:
      sc.delta = 0.5 * cfg.boundary_margin;
      sc.max_margin = cfg.boundary_margin;
      break;
    case Population::kInterior:
      sc.delta = cfg.interior_margin;
      break;
  }
  const auto samples = sample_uniform_moments(sc, basis);
  std::vector<MomentVector> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.u);
  return out;
}

std::vector<BenchRow> run_bench(const IcnnModel& model, const MomentBasis& basis, const BenchConfig& cfg) {
  cfg.validate();
  const long largest = *std::max_element(cfg.batch_sizes.begin(), cfg.batch_sizes.end());
  std::vector<BenchRow> rows;
  for (Population p : cfg.populations) {
    const std::vector<MomentVector> moments = population_moments(p, largest, basis, cfg);
    for (long b : cfg.batch_sizes) {
      const std::span<const MomentVector> batch(moments.data(), static_cast<std::size_t>(b));
      std::vector<double> newton_times;
      std::vector<double> icnn_times;
      long failures = 0;
      for (int r = 0; r < cfg.repetitions; ++r) {
        Stopwatch sw;
        const auto res = solve_dual_batch(batch, cfg.newton, basis, cfg.parallel);
        newton_times.push_back(sw.seconds());
        if (r == 0) failures = std::count_if(res.begin(), res.end(), [](const auto& x) { return !x.converged; });
        Stopwatch sw2;
        [[maybe_unused]] const auto inf = infer_scaled_batch(model, batch, basis, cfg.parallel);
        icnn_times.push_back(sw2.seconds());
      }
      auto add = [&](const std::string& backend, const std::vector<double>& t, long fails) {
        BenchRow row;
        row.population = p;
        row.backend = backend;
        row.batch_size = b;
        row.total = summarize(t);
        std::vector<double> per(t.size());
        std::transform(t.begin(), t.end(), per.begin(), [b](double s) { return s / static_cast<double>(b); });
        row.per_sample = summarize(per);
        row.failures = fails;
        rows.push_back(row);
      };
      add("newton", newton_times, failures);
      add("icnn", icnn_times, 0);
    }
  }
  return rows;
}

double per_sample_mean(const std::vector<BenchRow>& rows, Population p, const std::string& backend, long batch) {
  for (const auto& r : rows)
    if (r.population == p && r.backend == backend && r.batch_size == batch) return r.per_sample.mean;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace nc
