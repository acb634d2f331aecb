#pragma once

#include "nc/icnn.hpp"

#include <chrono>
#include <span>
#include <string>
#include <vector>

namespace nc {

// Held-out errors in the layout of the validation-loss table: h is scalar,
// alpha and u are averaged over their components.
struct ErrorMetrics {
  double mse_h = 0.0;
  double mae_h = 0.0;
  double mse_alpha = 0.0;
  double mae_alpha = 0.0;
  double mse_u = 0.0;
  double mae_u = 0.0;
  std::size_t count = 0;
};

ErrorMetrics evaluate_model(const IcnnModel& model, std::span<const ClosureSample> samples,
                            const MomentBasis& basis);

// "MSE(h) MAE(h) MSE(alpha) MAE(alpha) MSE(u) MAE(u)" header plus one row.
std::string format_metrics_table(const ErrorMetrics& m, const std::string& label);

struct TimingStats {
  double mean = 0.0;
  double stddev = 0.0;
  int repetitions = 0;
};

// Sample mean and standard deviation (n - 1 denominator).
TimingStats summarize(const std::vector<double>& seconds);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace nc
