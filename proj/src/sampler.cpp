#include "nc/sampler.hpp"

#include "nc/errors.hpp"
#include "nc/rng.hpp"

#include <cmath>
#include <sstream>

namespace nc {

std::string to_string(SamplingAlgorithm alg) {
  return alg == SamplingAlgorithm::kUniformMoments ? "uniform-u" : "uniform-alpha";
}

SamplingAlgorithm parse_sampling_algorithm(const std::string& name) {
  if (name == "uniform-u") return SamplingAlgorithm::kUniformMoments;
  if (name == "uniform-alpha") return SamplingAlgorithm::kUniformAlpha;
  throw UsageError("unknown sampling algorithm '" + name + "' (expected uniform-u or uniform-alpha)");
}

void SamplerConfig::validate() const {
  if (dimension == 1) {
    if (order < 1 || order > 4) throw UsageError("sampler: 1D order must be between 1 and 4");
  } else if (dimension == 2) {
    if (order != 1) throw UsageError("sampler: 2D supports order 1 only");
  } else {
    throw UsageError("sampler: dimension must be 1 or 2");
  }
  if (count < 1) throw UsageError("sampler: count must be positive");
  if (!(delta > 0.0)) throw UsageError("sampler: delta must be positive");
  if (!(max_margin > delta)) throw UsageError("sampler: max_margin must exceed delta");
  if (!(tau > 0.0)) throw UsageError("sampler: tau must be positive");
  if (!(box_hi > box_lo) || !std::isfinite(box_lo) || !std::isfinite(box_hi)) {
    throw UsageError("sampler: alpha box must be bounded with lo < hi");
  }
  if (draw_window < 1) throw UsageError("sampler: draw_window must be positive");
  if (!(min_acceptance >= 0.0 && min_acceptance < 1.0)) throw UsageError("sampler: min_acceptance must be in [0,1)");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> realizable_bounding_box(int dimension, int order) {
  const int n = dimension == 2 ? 2 : order;
  Eigen::VectorXd lo(n);
  Eigen::VectorXd hi(n);
  for (int i = 0; i < n; ++i) {
    // even 1D moments of a probability measure on [-1,1] lie in [0,1]
    const bool even = dimension == 1 && (i % 2 == 1);
    lo(i) = even ? 0.0 : -1.0;
    hi(i) = 1.0;
  }
  return {lo, hi};
}

double sample_margin(const ClosureSample& s, int dimension, int order) {
  ReducedMoments r{s.u.tail(s.u.size() - 1), dimension, order};
  return check_realizability(r).margin;
}

namespace {

Eigen::VectorXd draw_in_box(SplitMix64& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = rng.uniform(lo(i), hi(i));
  return x;
}

bool accept_margin(const Eigen::VectorXd& reduced, const SamplerConfig& cfg) {
  const double margin = check_realizability(ReducedMoments{reduced, cfg.dimension, cfg.order}).margin;
  return margin > cfg.delta && margin <= cfg.max_margin;
}

void check_basis(const SamplerConfig& cfg, const MomentBasis& basis) {
  if (basis.dimension() != cfg.dimension || basis.order() != cfg.order) {
    throw UsageError("sampler: basis does not match configured dimension/order");
  }
}

}  // namespace

std::vector<ClosureSample> sample_uniform_moments(const SamplerConfig& cfg, const MomentBasis& basis,
                                                  SamplingStats* stats) {
  cfg.validate();
  check_basis(cfg, basis);
  const auto [lo, hi] = realizable_bounding_box(cfg.dimension, cfg.order);

  // Probe window: a region that accepts almost none of the box draws is
  // mis-specified (delta too large for the order).
  {
    SplitMix64 probe(stream_seed(cfg.seed, ~0ULL));
    long hits = 0;
    for (long k = 0; k < cfg.draw_window; ++k) {
      if (accept_margin(draw_in_box(probe, lo, hi), cfg)) ++hits;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(cfg.draw_window);
    if (stats) stats->probe_acceptance = rate;
    if (rate < cfg.min_acceptance || hits == 0) {
      std::ostringstream msg;
      msg << "sample_uniform_moments: acceptance rate " << rate << " over " << cfg.draw_window
          << " draws is below " << cfg.min_acceptance << " (dimension " << cfg.dimension << ", order " << cfg.order
          << ", delta " << cfg.delta << ", max_margin " << cfg.max_margin << ")";
      throw UsageError(msg.str());
    }
  }

  NewtonConfig newton;
  newton.tolerance = cfg.tau;

  std::vector<ClosureSample> samples(static_cast<std::size_t>(cfg.count));
  long draws = 0;
  long failures = 0;
  bool exhausted = false;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : draws, failures) reduction(|| : exhausted)
  for (long j = 0; j < cfg.count; ++j) {
    SplitMix64 rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(j)));
    bool done = false;
    for (long attempt = 0; attempt < cfg.draw_window && !done; ++attempt) {
      ++draws;
      const Eigen::VectorXd reduced = draw_in_box(rng, lo, hi);
      if (!accept_margin(reduced, cfg)) continue;
      MomentVector u(basis.size());
      u(0) = 1.0;
      u.tail(reduced.size()) = reduced;
      try {
        ClosureResult r = solve_dual(u, std::nullopt, newton, basis);
        if (!r.converged) {
          ++failures;
          continue;
        }
        samples[j] = ClosureSample{u, r.alpha, r.h};
        done = true;
      } catch (const NumericalError&) {
        ++failures;
      }
    }
    if (!done) exhausted = true;
  }
  if (exhausted) {
    throw NumericalError("sample_uniform_moments: a sample exhausted its draw window without an "
                         "accepted, solvable moment");
  }
  if (stats) {
    stats->draws += draws;
    stats->accepted += cfg.count;
    stats->newton_failures += failures;
  }
  return samples;
}

ClosureSample sample_from_reduced_alpha(const Eigen::VectorXd& alpha_reduced, const MomentBasis& basis) {
  ClosureSample s;
  s.alpha = assemble_normalized_alpha(alpha_reduced, basis);
  const Eigen::VectorXd f = reconstruct_density(s.alpha, basis);
  s.u = moments_of(f, basis);
  s.h = s.alpha.dot(s.u) - bracket(f, basis.rule());
  return s;
}

std::vector<ClosureSample> sample_uniform_alpha(const SamplerConfig& cfg, const MomentBasis& basis,
                                                SamplingStats* stats) {
  cfg.validate();
  check_basis(cfg, basis);
  const Eigen::Index n = basis.reduced_size();
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, cfg.box_lo);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, cfg.box_hi);

  std::vector<ClosureSample> samples(static_cast<std::size_t>(cfg.count));
  long draws = 0;
  long overflow = 0;
  bool exhausted = false;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : draws, overflow) reduction(|| : exhausted)
  for (long j = 0; j < cfg.count; ++j) {
    SplitMix64 rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(j)));
    bool done = false;
    for (long attempt = 0; attempt < cfg.draw_window && !done; ++attempt) {
      ++draws;
      try {
        samples[j] = sample_from_reduced_alpha(draw_in_box(rng, lo, hi), basis);
        done = true;
      } catch (const RangeError&) {
        ++overflow;
      }
    }
    if (!done) exhausted = true;
  }
  if (exhausted) {
    throw NumericalError("sample_uniform_alpha: every draw in the window overflowed; shrink the box");
  }
  if (stats) {
    stats->draws += draws;
    stats->accepted += cfg.count;
    stats->overflow_discards += overflow;
  }
  return samples;
}

}  // namespace nc
