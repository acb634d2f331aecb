#pragma once

#include "nc/icnn.hpp"
#include "nc/metrics.hpp"
#include "nc/newton.hpp"

#include <string>
#include <vector>

namespace nc {

// Moment populations for timing: uniform over the realizable set, a thin
// shell near its boundary, and the deep interior.
enum class Population { kUniform, kBoundary, kInterior };

std::string to_string(Population p);
Population parse_population(const std::string& name);

struct BenchConfig {
  std::vector<Population> populations{Population::kUniform, Population::kBoundary, Population::kInterior};
  std::vector<long> batch_sizes{1000};
  int repetitions = 20;
  // Shell (boundary_margin / 2, boundary_margin].
  double boundary_margin = 0.01;
  // margin >= interior_margin
  double interior_margin = 0.4;
  // Standoff for the uniform population.
  double uniform_margin = 1e-3;
  NewtonConfig newton;
  std::uint64_t seed = 0;
  bool parallel = true;

  void validate() const;
};

struct BenchRow {
  Population population = Population::kUniform;
  std::string backend;
  long batch_size = 0;
  TimingStats total;
  TimingStats per_sample;
  // Newton solves that did not converge in the timed batches.
  long failures = 0;
};

// Normalized moments of one population (Newton-solvable ones only).
std::vector<MomentVector> population_moments(Population p, long count, const MomentBasis& basis,
                                             const BenchConfig& cfg);

std::vector<BenchRow> run_bench(const IcnnModel& model, const MomentBasis& basis, const BenchConfig& cfg);

// Mean per-sample time of one (population, backend, batch size) row; NaN if absent.
double per_sample_mean(const std::vector<BenchRow>& rows, Population p, const std::string& backend, long batch);

}  // namespace nc
