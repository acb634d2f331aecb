#include "nc/metrics.hpp"

#include "nc/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace nc {

ErrorMetrics evaluate_model(const IcnnModel& model, std::span<const ClosureSample> samples,
                            const MomentBasis& basis) {
  if (samples.empty()) throw UsageError("evaluate_model: no samples");
  std::vector<MomentVector> us;
  us.reserve(samples.size());
  for (const auto& s : samples) us.push_back(s.u);
  const auto pred = infer_scaled_batch(model, us, basis);
  ErrorMetrics m;
  m.count = samples.size();
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    const auto& p = pred[k];
    // labels are normalized, so the rescale in infer_scaled is a no-op up
    // to ln(u_0) = ln(1) = 0
    const double dh = s.h - p.h;
    const Eigen::VectorXd da = s.alpha - p.alpha;
    const Eigen::VectorXd du = s.u - p.u;
    m.mse_h += dh * dh * inv;
    m.mae_h += std::abs(dh) * inv;
    m.mse_alpha += da.squaredNorm() / static_cast<double>(da.size()) * inv;
    m.mae_alpha += da.cwiseAbs().mean() * inv;
    m.mse_u += du.squaredNorm() / static_cast<double>(du.size()) * inv;
    m.mae_u += du.cwiseAbs().mean() * inv;
  }
  return m;
}

std::string format_metrics_table(const ErrorMetrics& m, const std::string& label) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-12s %-11s %-11s %-11s %-11s %-11s %-11s\n%-12s %-11.3e %-11.3e %-11.3e %-11.3e %-11.3e %-11.3e\n",
                "model", "MSE(h)", "MAE(h)", "MSE(alpha)", "MAE(alpha)", "MSE(u)", "MAE(u)", label.c_str(), m.mse_h,
                m.mae_h, m.mse_alpha, m.mae_alpha, m.mse_u, m.mae_u);
  return buf;
}

TimingStats summarize(const std::vector<double>& seconds) {
  TimingStats t;
  t.repetitions = static_cast<int>(seconds.size());
  if (seconds.empty()) return t;
  t.mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(seconds.size());
  if (seconds.size() > 1) {
    double ss = 0.0;
    for (double s : seconds) ss += (s - t.mean) * (s - t.mean);
    t.stddev = std::sqrt(ss / static_cast<double>(seconds.size() - 1));
  }
  return t;
}

}  // namespace nc
