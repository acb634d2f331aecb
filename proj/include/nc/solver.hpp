#pragma once

#include "nc/icnn.hpp"
#include "nc/mesh.hpp"
#include "nc/newton.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nc {

enum class CaseId { kInflow1dM1, kInflow1dM2, kPeriodic2dM1 };

std::string to_string(CaseId id);
CaseId parse_case_id(const std::string& name);

struct CaseConfig {
  CaseId id = CaseId::kInflow1dM1;
  double t_final = 0.7;
  int nx = 100;
  int ny = 1;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  // 1D: number of Gauss-Legendre nodes. 2D: n_mu * n_phi.
  int n_v = 28;
  int n_mu = 0;
  int n_phi = 0;
  double cfl = 0.05;
  double sigma = 1.0;
  int order = 1;
  // Isotropic density that stands in for vacuum.
  double floor_density = 1e-6;
  // Density entering through the 1D left boundary for mu > 0.
  double inflow_density = 0.5;
  // Unset: on for the ICNN backend, off for Newton.
  std::optional<bool> reconstruction;
  NewtonConfig newton;

  // Defaults of the three shipped cases.
  static CaseConfig defaults(CaseId id);
  int dimension() const { return id == CaseId::kPeriodic2dM1 ? 2 : 1; }
  void validate() const;
};

// Splits N_V into (n_mu, n_phi) for the projected sphere rule when the
// config does not give them: n_mu = 5, n_phi = N_V / 5.
std::pair<int, int> sphere_split(int n_v);

std::shared_ptr<const QuadratureRule> make_quadrature(const CaseConfig& cfg);
Mesh make_mesh(const CaseConfig& cfg);

// CFL * dx / d.
double timestep_size(const CaseConfig& cfg, const Mesh& mesh);
// Number of steps of size dt that end strictly before t_final.
int step_count(double t_final, double dt);

// sum_q w_q (v_q.n) m(v_q) f_upwind(v_q).
Eigen::VectorXd upwind_flux(const Eigen::VectorXd& f_left, const Eigen::VectorXd& f_right,
                            const Eigen::Vector2d& normal, const MomentBasis& basis);

// Moments of sigma (k <f> - f), k = 1 / sum w, with component 0 set to zero.
Eigen::VectorXd collision_moments(const Eigen::VectorXd& f_at_nodes, double sigma, const MomentBasis& basis);
// Same from moments, assuming u = <m f>.
Eigen::VectorXd collision_moments_from_u(const MomentVector& u, double sigma, const MomentBasis& basis);

class ClosureBackend {
 public:
  virtual ~ClosureBackend() = default;
  virtual std::string name() const = 0;
  // alpha holds the previous multipliers on entry (may be empty vectors).
  virtual void close(const std::vector<MomentVector>& u, std::vector<LagrangeMultipliers>& alpha,
                     const MomentBasis& basis) = 0;
  virtual bool default_reconstruction() const = 0;
};

class NewtonBackend : public ClosureBackend {
 public:
  explicit NewtonBackend(NewtonConfig cfg) : cfg_(cfg) {}
  std::string name() const override { return "newton"; }
  // Throws NonConvergenceError naming the first failing cell.
  void close(const std::vector<MomentVector>& u, std::vector<LagrangeMultipliers>& alpha,
             const MomentBasis& basis) override;
  bool default_reconstruction() const override { return false; }

 private:
  NewtonConfig cfg_;
};

class IcnnBackend : public ClosureBackend {
 public:
  explicit IcnnBackend(const IcnnModel& model) : model_(model) {}
  std::string name() const override { return "icnn"; }
  void close(const std::vector<MomentVector>& u, std::vector<LagrangeMultipliers>& alpha,
             const MomentBasis& basis) override;
  bool default_reconstruction() const override { return true; }

 private:
  const IcnnModel& model_;
};

struct SolverState {
  std::vector<MomentVector> u;
  std::vector<LagrangeMultipliers> alpha;
  double t = 0.0;
  int step = 0;
};

struct StepDiagnostics {
  int step = 0;
  double t = 0.0;
  double mass = 0.0;
  double entropy = 0.0;
};

// One case run: close(), diagnostics(), advance() per step. run_case()
// drives the whole loop.
class Simulation {
 public:
  Simulation(const CaseConfig& cfg, ClosureBackend& backend);

  const CaseConfig& config() const { return cfg_; }
  const Mesh& mesh() const { return mesh_; }
  const MomentBasis& basis() const { return *basis_; }
  const SolverState& state() const { return state_; }
  double dt() const { return dt_; }
  int steps() const { return n_steps_; }
  bool reconstruction() const { return reconstruction_; }

  // Closure for the current state, then the optional reconstruction step.
  void close();
  // Uses the multipliers of the last close().
  StepDiagnostics diagnostics() const;
  // Fluxes, collisions and the Euler update; checks realizability.
  void advance();

  // Nodal densities of the last close().
  const std::vector<Eigen::VectorXd>& densities() const { return f_; }

 private:
  void initialize();
  void check_realizable() const;

  CaseConfig cfg_;
  ClosureBackend& backend_;
  std::shared_ptr<const QuadratureRule> rule_;
  std::unique_ptr<MomentBasis> basis_;
  Mesh mesh_;
  double dt_ = 0.0;
  int n_steps_ = 0;
  bool reconstruction_ = false;
  SolverState state_;
  std::vector<Eigen::VectorXd> f_;
  Eigen::VectorXd inflow_f_;
  Eigen::VectorXd farfield_f_;
};

struct RunResult {
  std::vector<StepDiagnostics> diagnostics;
  SolverState final_state;
};

// Runs the configured number of steps; diagnostics has steps + 1 rows.
RunResult run_case(const CaseConfig& cfg, ClosureBackend& backend,
                   const std::function<void(const StepDiagnostics&)>& on_step = {});

struct CompareResult {
  RunResult newton;
  RunResult icnn;
  // Per step, over cells: |u0_icnn - u0_newton| / |u0_newton|.
  std::vector<double> mean_relative_error;
  std::vector<double> max_relative_error;
  // Per cell at the final step.
  Eigen::VectorXd final_relative_error;
};

// Both backends advance in lockstep on identical configurations.
CompareResult run_compare(const CaseConfig& cfg, const IcnnModel& model,
                          const std::function<void(int, double)>& on_step = {});

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<StepDiagnostics>& rows,
                           const std::vector<double>* mean_rel = nullptr, const std::vector<double>* max_rel = nullptr);
void write_field_csv(const std::filesystem::path& path, const Mesh& mesh, const std::vector<MomentVector>& u,
                     const Eigen::VectorXd* relative_error = nullptr);

}  // namespace nc
