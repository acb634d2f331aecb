#include "nc/newton.hpp"

#include "nc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nc {

void NewtonConfig::validate() const {
  if (!(tolerance > 0.0)) throw UsageError("newton: tolerance must be positive");
  if (max_iterations < 1) throw UsageError("newton: max_iterations must be at least 1");
  if (!(shrink > 0.0 && shrink < 1.0)) throw UsageError("newton: shrink must lie in (0,1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw UsageError("newton: armijo must lie in (0,1)");
  if (max_backtracks < 1) throw UsageError("newton: max_backtracks must be at least 1");
  if (!(regularization_floor > 0.0) || regularization_ceiling < regularization_floor) {
    throw UsageError("newton: invalid regularization range");
  }
}

namespace {

// Objective, density and gradient at one iterate.
struct Iterate {
  Eigen::VectorXd alpha;
  Eigen::VectorXd density;
  Eigen::VectorXd gradient;
  double objective = 0.0;
  double scale = 0.0;
};

// Returns false when some exponent exceeds the overflow guard.
bool evaluate(const Eigen::VectorXd& alpha, const MomentVector& u, const MomentBasis& basis,
              Iterate& it) {
  const auto& table = basis.table();
  const auto& w = basis.weights();
  Eigen::VectorXd e = table.transpose() * alpha;
  if (!(e.maxCoeff() <= kExponentGuard) || !e.allFinite()) return false;
  it.alpha = alpha;
  it.density = e.array().exp().matrix();
  const Eigen::VectorXd wf = w.cwiseProduct(it.density);
  const double mass = wf.sum();
  const double au = alpha.dot(u);
  it.objective = mass - au;
  it.scale = mass + std::abs(au);
  it.gradient = table * wf - u;
  return true;
}

Eigen::MatrixXd hessian_at(const Iterate& it, const MomentBasis& basis) {
  const auto& table = basis.table();
  const Eigen::VectorXd wf = basis.weights().cwiseProduct(it.density);
  Eigen::MatrixXd h = table * wf.asDiagonal() * table.transpose();
  return 0.5 * (h + h.transpose());
}

}  // namespace

ClosureResult solve_dual(const MomentVector& u, const std::optional<LagrangeMultipliers>& warm_start,
                         const NewtonConfig& cfg, const MomentBasis& basis,
                         std::vector<double>* objective_history) {
  if (u.size() != basis.size()) throw UsageError("solve_dual: moment length does not match basis");
  if (!u.allFinite()) throw DomainError("solve_dual: moment vector is not finite");
  if (!(u(0) > 0.0)) throw DomainError("solve_dual: u_0 must be positive");

  const double threshold = cfg.tolerance * std::min(1.0, u(0));
  constexpr double eps = std::numeric_limits<double>::epsilon();

  Iterate current;
  bool started = false;
  if (warm_start && warm_start->size() == basis.size() && warm_start->allFinite()) {
    started = evaluate(*warm_start, u, basis, current);
  }
  if (!started) {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(basis.size());
    alpha(0) = std::log(u(0) / basis.rule().total_weight());
    if (!evaluate(alpha, u, basis, current)) {
      throw RangeError("solve_dual: cold start overflows", 0, alpha(0));
    }
  }

  if (objective_history) objective_history->push_back(current.objective);

  ClosureResult result;
  Iterate trial;
  int iteration = 0;
  for (;;) {
    const double gnorm = current.gradient.lpNorm<Eigen::Infinity>();
    if (gnorm <= threshold) {
      result.converged = true;
      break;
    }
    if (iteration >= cfg.max_iterations) {
      result.diagnostics = "maximum iterations reached";
      break;
    }

    const Eigen::MatrixXd hess = hessian_at(current, basis);
    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) {
      const double diag = hess.diagonal().maxCoeff();
      double lambda = cfg.regularization_floor;
      for (; lambda <= cfg.regularization_ceiling * (1.0 + 1e-12); lambda *= 10.0) {
        llt.compute(hess + lambda * diag * Eigen::MatrixXd::Identity(hess.rows(), hess.cols()));
        if (llt.info() == Eigen::Success) break;
      }
      if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "solve_dual: Hessian indefinite after regularization " << cfg.regularization_ceiling
            << " at iteration " << iteration << " (moment too close to the realizable boundary)";
        throw BoundaryProximityError(msg.str());
      }
    }
    const Eigen::VectorXd direction = -llt.solve(current.gradient);
    const double slope = current.gradient.dot(direction);

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt, step *= cfg.shrink) {
      if (!evaluate(current.alpha + step * direction, u, basis, trial)) continue;
      // roundoff slack so that steps taken at machine precision still pass
      const double slack = 8.0 * eps * current.scale;
      if (trial.objective <= current.objective + cfg.armijo * step * slope + slack) {
        accepted = true;
        break;
      }
    }
    ++iteration;
    if (!accepted) {
      result.diagnostics = "line search failed";
      break;
    }
    std::swap(current, trial);
    if (objective_history) objective_history->push_back(current.objective);
  }

  result.alpha = current.alpha;
  result.iterations = iteration;
  result.final_gradient_norm = current.gradient.lpNorm<Eigen::Infinity>();
  result.h = current.alpha.dot(u) - (basis.weights().cwiseProduct(current.density)).sum();
  return result;
}

std::vector<ClosureResult> solve_dual_batch(std::span<const MomentVector> us, const NewtonConfig& cfg,
                                            const MomentBasis& basis, bool parallel) {
  std::vector<ClosureResult> results(us.size());
  const auto n = static_cast<long>(us.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (long j = 0; j < n; ++j) {
    try {
      results[j] = solve_dual(us[j], std::nullopt, cfg, basis);
    } catch (const std::exception& e) {
      results[j].converged = false;
      results[j].diagnostics = e.what();
      results[j].alpha = Eigen::VectorXd::Constant(basis.size(), std::numeric_limits<double>::quiet_NaN());
      results[j].h = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return results;
}

}  // namespace nc
