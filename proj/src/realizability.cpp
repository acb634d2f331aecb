#include "nc/realizability.hpp"

#include "nc/errors.hpp"

#include <cmath>
#include <limits>

namespace nc {

namespace {

constexpr double kDenominatorGuard = 1e-14;

struct Tracker {
  double margin = std::numeric_limits<double>::infinity();
  Constraint binding = Constraint::kNone;

  void add(double slack, Constraint c) {
    if (slack < margin) {
      margin = slack;
      binding = c;
    }
  }
};

RealizabilityReport finish(const Tracker& t) {
  RealizabilityReport report;
  report.margin = t.margin;
  report.binding_constraint = t.binding;
  report.realizable = t.margin >= 0.0;
  return report;
}

}  // namespace

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::kNone: return "none";
    case Constraint::kFirstUpper: return "u1<=1";
    case Constraint::kFirstLower: return "u1>=-1";
    case Constraint::kSecondUpper: return "u2<=1";
    case Constraint::kSecondLower: return "u2>=u1^2";
    case Constraint::kThirdUpper: return "u3<=upper3";
    case Constraint::kThirdLower: return "u3>=lower3";
    case Constraint::kFourthUpper: return "u4<=upper4";
    case Constraint::kFourthLower: return "u4>=lower4";
    case Constraint::kNorm: return "|u|<=1";
  }
  return "unknown";
}

std::pair<double, ReducedMoments> normalize(const MomentVector& u, int dimension, int order) {
  if (u.size() < 1) throw UsageError("normalize: empty moment vector");
  const double u0 = u(0);
  if (!(u0 > 0.0)) throw DomainError("normalize: u_0 must be positive");
  ReducedMoments reduced;
  reduced.values = u.tail(u.size() - 1) / u0;
  reduced.dimension = dimension;
  reduced.order = order;
  return {u0, std::move(reduced)};
}

MomentVector denormalize(double u0, const ReducedMoments& reduced) {
  MomentVector u(reduced.values.size() + 1);
  u(0) = u0;
  u.tail(reduced.values.size()) = u0 * reduced.values;
  return u;
}

RealizabilityReport check_kershaw_1d(const ReducedMoments& reduced) {
  const auto& v = reduced.values;
  const Eigen::Index n = v.size();
  if (n < 1 || n > 4) throw UsageError("check_kershaw_1d: order must be between 1 and 4");

  Tracker t;
  const double u1 = v(0);
  t.add(1.0 - u1, Constraint::kFirstUpper);
  t.add(u1 + 1.0, Constraint::kFirstLower);
  if (n >= 2) {
    const double u2 = v(1);
    t.add(1.0 - u2, Constraint::kSecondUpper);
    t.add(u2 - u1 * u1, Constraint::kSecondLower);
    if (n >= 3) {
      const double u3 = v(2);
      const double d_minus = 1.0 - u1;
      const double d_plus = 1.0 + u1;
      if (std::abs(d_minus) < kDenominatorGuard || std::abs(d_plus) < kDenominatorGuard) {
        t.add(0.0, std::abs(d_minus) < kDenominatorGuard ? Constraint::kThirdUpper
                                                          : Constraint::kThirdLower);
      } else {
        const double upper = u2 - (u1 - u2) * (u1 - u2) / d_minus;
        const double lower = -u2 + (u1 + u2) * (u1 + u2) / d_plus;
        t.add(upper - u3, Constraint::kThirdUpper);
        t.add(u3 - lower, Constraint::kThirdLower);
      }
      if (n >= 4) {
        const double u4 = v(3);
        const double var = u2 - u1 * u1;
        const double d2 = 1.0 - u2;
        if (std::abs(var) < kDenominatorGuard || std::abs(d2) < kDenominatorGuard) {
          t.add(0.0, std::abs(var) < kDenominatorGuard ? Constraint::kFourthLower
                                                        : Constraint::kFourthUpper);
        } else {
          // Hankel determinant of [1,u1,u2; u1,u2,u3; u2,u3,u4] >= 0 and the
          // (1 - mu^2)-localized matrix >= 0.
          const double lower = (u2 * u2 * u2 + u3 * u3 - 2.0 * u1 * u2 * u3) / var;
          const double upper = u2 - (u1 - u3) * (u1 - u3) / d2;
          t.add(upper - u4, Constraint::kFourthUpper);
          t.add(u4 - lower, Constraint::kFourthLower);
        }
      }
    }
  }
  return finish(t);
}

RealizabilityReport check_m1_norm(const ReducedMoments& reduced) {
  Tracker t;
  t.add(1.0 - reduced.values.norm(), Constraint::kNorm);
  return finish(t);
}

RealizabilityReport check_realizability(const ReducedMoments& reduced) {
  if (reduced.dimension == 1) return check_kershaw_1d(reduced);
  if (reduced.dimension == 2 && reduced.order == 1) return check_m1_norm(reduced);
  throw UsageError("check_realizability: no criterion for this dimension/order");
}

double boundary_distance(const ReducedMoments& reduced) {
  const RealizabilityReport report = check_realizability(reduced);
  if (!report.realizable) {
    throw DomainError("boundary_distance: moment is not realizable (binding " +
                      to_string(report.binding_constraint) + ")");
  }
  return report.margin;
}

}  // namespace nc
