#include "nc/solver.hpp"

#include "nc/dataset.hpp"
#include "nc/errors.hpp"
#include "nc/realizability.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace nc {

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::kInflow1dM1: return "inflow-1d-m1";
    case CaseId::kInflow1dM2: return "inflow-1d-m2";
    case CaseId::kPeriodic2dM1: return "periodic-2d-m1";
  }
  return "?";
}

CaseId parse_case_id(const std::string& name) {
  if (name == "inflow-1d-m1") return CaseId::kInflow1dM1;
  if (name == "inflow-1d-m2") return CaseId::kInflow1dM2;
  if (name == "periodic-2d-m1") return CaseId::kPeriodic2dM1;
  throw UsageError("unknown case '" + name + "' (expected inflow-1d-m1, inflow-1d-m2 or periodic-2d-m1)");
}

CaseConfig CaseConfig::defaults(CaseId id) {
  CaseConfig c;
  c.id = id;
  if (id == CaseId::kPeriodic2dM1) {
    c.t_final = 1.84;
    c.nx = 100;
    c.ny = 100;
    c.x_lo = c.y_lo = -1.5;
    c.x_hi = c.y_hi = 1.5;
    c.n_v = 200;
    c.cfl = 0.1;
    c.sigma = 0.0;
    c.order = 1;
  } else {
    c.order = id == CaseId::kInflow1dM2 ? 2 : 1;
  }
  return c;
}

void CaseConfig::validate() const {
  if (!(t_final > 0.0)) throw UsageError("case: t_final must be positive");
  if (nx < 1 || (dimension() == 2 && ny < 1)) throw UsageError("case: nx/ny must be positive");
  if (!(cfl > 0.0)) throw UsageError("case: cfl must be positive");
  if (!(sigma >= 0.0)) throw UsageError("case: sigma must be nonnegative");
  if (!(floor_density > 0.0)) throw UsageError("case: floor_density must be positive");
  if (!(inflow_density > 0.0)) throw UsageError("case: inflow_density must be positive");
  if (n_v < 1) throw UsageError("case: n_v must be positive");
  if (dimension() == 1 && (order < 1 || order > 4)) throw UsageError("case: 1D order must be in 1..4");
  if (dimension() == 2 && order != 1) throw UsageError("case: 2D supports order 1 only");
  if (dimension() == 2 && (n_mu > 0) != (n_phi > 0)) throw UsageError("case: give both n_mu and n_phi or neither");
  newton.validate();
}

std::pair<int, int> sphere_split(int n_v) {
  if (n_v < 5 || n_v % 5 != 0) throw UsageError("case: 2D n_v must be a positive multiple of 5");
  return {5, n_v / 5};
}

std::shared_ptr<const QuadratureRule> make_quadrature(const CaseConfig& cfg) {
  if (cfg.dimension() == 1) return std::make_shared<const QuadratureRule>(build_gauss_legendre(cfg.n_v));
  auto [n_mu, n_phi] = cfg.n_mu > 0 ? std::pair{cfg.n_mu, cfg.n_phi} : sphere_split(cfg.n_v);
  return std::make_shared<const QuadratureRule>(build_projected_sphere(n_mu, n_phi));
}

Mesh make_mesh(const CaseConfig& cfg) {
  if (cfg.dimension() == 1) return Mesh::interval(cfg.x_lo, cfg.x_hi, cfg.nx);
  return Mesh::periodic_rectangle(cfg.x_lo, cfg.x_hi, cfg.y_lo, cfg.y_hi, cfg.nx, cfg.ny);
}

double timestep_size(const CaseConfig& cfg, const Mesh& mesh) {
  const double h = mesh.dimension() == 1 ? mesh.dx() : std::min(mesh.dx(), mesh.dy());
  return cfg.cfl * h / mesh.dimension();
}

int step_count(double t_final, double dt) {
  const double ratio = t_final / dt;
  return static_cast<int>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio))) - 1;
}

namespace {

Eigen::VectorXd normal_speeds(const Eigen::Vector2d& normal, const QuadratureRule& rule) {
  Eigen::VectorXd vn = rule.nodes.row(0).transpose() * normal(0);
  if (rule.dimension == 2) vn += rule.nodes.row(1).transpose() * normal(1);
  return vn;
}

}  // namespace

Eigen::VectorXd upwind_flux(const Eigen::VectorXd& f_left, const Eigen::VectorXd& f_right,
                            const Eigen::Vector2d& normal, const MomentBasis& basis) {
  const auto& rule = basis.rule();
  const Eigen::VectorXd vn = normal_speeds(normal, rule);
  Eigen::VectorXd g(vn.size());
  for (Eigen::Index q = 0; q < vn.size(); ++q) {
    const double up = vn(q) > 0.0 ? f_left(q) : (vn(q) < 0.0 ? f_right(q) : 0.0);
    g(q) = rule.weights(q) * vn(q) * up;
  }
  return basis.table() * g;
}

Eigen::VectorXd collision_moments(const Eigen::VectorXd& f_at_nodes, double sigma, const MomentBasis& basis) {
  const double k = 1.0 / basis.rule().total_weight();
  const Eigen::VectorXd u = moments_of(f_at_nodes, basis);
  Eigen::VectorXd d = sigma * (k * u(0) * basis.mean() - u);
  d(0) = 0.0;
  return d;
}

Eigen::VectorXd collision_moments_from_u(const MomentVector& u, double sigma, const MomentBasis& basis) {
  const double k = 1.0 / basis.rule().total_weight();
  Eigen::VectorXd d = sigma * (k * u(0) * basis.mean() - u);
  d(0) = 0.0;
  return d;
}

namespace {

std::string vector_text(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v(i));
  os << "]";
  return os.str();
}

}  // namespace

void NewtonBackend::close(const std::vector<MomentVector>& u, std::vector<LagrangeMultipliers>& alpha,
                          const MomentBasis& basis) {
  const int n = static_cast<int>(u.size());
  alpha.resize(u.size());
  int first_bad = std::numeric_limits<int>::max();
  std::string reason;
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) {
    std::optional<LagrangeMultipliers> warm;
    if (alpha[i].size() == basis.size() && alpha[i].allFinite()) warm = alpha[i];
    std::string why;
    try {
      ClosureResult r = solve_dual(u[i], warm, cfg_, basis);
      if (r.converged) {
        alpha[i] = std::move(r.alpha);
        continue;
      }
      why = r.diagnostics;
    } catch (const Error& e) {
      why = e.what();
    }
#pragma omp critical
    if (i < first_bad) {
      first_bad = i;
      reason = why;
    }
  }
  if (first_bad != std::numeric_limits<int>::max()) {
    throw NonConvergenceError("Newton closure failed in cell " + std::to_string(first_bad) + " for u = " +
                              vector_text(u[first_bad]) + ": " + reason);
  }
}

void IcnnBackend::close(const std::vector<MomentVector>& u, std::vector<LagrangeMultipliers>& alpha,
                        const MomentBasis& basis) {
  auto results = infer_scaled_batch(model_, u, basis);
  alpha.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) alpha[i] = std::move(results[i].alpha);
}

Simulation::Simulation(const CaseConfig& cfg, ClosureBackend& backend) : cfg_(cfg), backend_(backend) {
  cfg_.validate();
  rule_ = make_quadrature(cfg_);
  basis_ = std::make_unique<MomentBasis>(rule_, cfg_.order);
  mesh_ = make_mesh(cfg_);
  dt_ = timestep_size(cfg_, mesh_);
  n_steps_ = step_count(cfg_.t_final, dt_);
  reconstruction_ = cfg_.reconstruction.value_or(backend_.default_reconstruction());
  initialize();
}

void Simulation::initialize() {
  const int n_cells = mesh_.cell_count();
  const Eigen::Index nq = rule_->size();
  state_.u.assign(n_cells, MomentVector());
  state_.alpha.assign(n_cells, LagrangeMultipliers());
  farfield_f_ = Eigen::VectorXd::Constant(nq, cfg_.floor_density);
  inflow_f_ = farfield_f_;
  if (mesh_.dimension() == 1) {
    for (Eigen::Index q = 0; q < nq; ++q)
      if (rule_->nodes(0, q) > 0.0) inflow_f_(q) = cfg_.inflow_density;
    const MomentVector vacuum = cfg_.floor_density * basis_->mean();
    for (auto& u : state_.u) u = vacuum;
  } else {
    for (int c = 0; c < n_cells; ++c) {
      const Eigen::Vector2d x = mesh_.cell_center(c);
      const double u0 = 1.5 + std::cos(2.0 * M_PI * x(0)) * std::cos(2.0 * M_PI * x(1));
      MomentVector u(3);
      u << u0, 0.3 * u0, 0.3 * u0;
      state_.u[c] = u;
    }
  }
  state_.t = 0.0;
  state_.step = 0;
}

void Simulation::close() {
  try {
    backend_.close(state_.u, state_.alpha, *basis_);
  } catch (const NumericalError& e) {
    std::ostringstream msg;
    msg << "step " << state_.step << " (t = " << state_.t << "): " << e.what();
    throw NonConvergenceError(msg.str());
  }
  const int n_cells = mesh_.cell_count();
  f_.resize(n_cells);
  bool overflow = false;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n_cells; ++c) {
    try {
      f_[c] = reconstruct_density(state_.alpha[c], *basis_);
      if (reconstruction_) state_.u[c] = moments_of(f_[c], *basis_);
    } catch (const RangeError&) {
#pragma omp atomic write
      overflow = true;
    }
  }
  if (overflow) throw RangeError("closure produced an overflowing density", 0, kExponentGuard);
}

StepDiagnostics Simulation::diagnostics() const {
  StepDiagnostics d;
  d.step = state_.step;
  d.t = state_.t;
  // serial sums keep the totals reproducible
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const double a = mesh_.cell_area(c);
    d.mass += a * state_.u[c](0);
    d.entropy += a * (state_.alpha[c].dot(state_.u[c]) - bracket(f_[c], *rule_));
  }
  return d;
}

void Simulation::advance() {
  if (static_cast<int>(f_.size()) != mesh_.cell_count()) throw std::logic_error("advance() before close()");
  const auto& faces = mesh_.faces();
  const int n_faces = static_cast<int>(faces.size());
  std::vector<Eigen::VectorXd> flux(faces.size());
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n_faces; ++k) {
    const Face& face = faces[k];
    const Eigen::VectorXd& fl = face.left >= 0 ? f_[face.left] : inflow_f_;
    const Eigen::VectorXd& fr = face.right >= 0 ? f_[face.right] : farfield_f_;
    flux[k] = face.length * upwind_flux(fl, fr, face.normal, *basis_);
  }
  const int n_cells = mesh_.cell_count();
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n_cells; ++c) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(basis_->size());
    for (const auto& [k, sign] : mesh_.cell_faces(c)) g += sign * flux[k];
    g /= mesh_.cell_area(c);
    const Eigen::VectorXd d = collision_moments(f_[c], cfg_.sigma, *basis_);
    state_.u[c] += dt_ * (d - g);
  }
  ++state_.step;
  state_.t = state_.step * dt_;
  check_realizable();
}

void Simulation::check_realizable() const {
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const MomentVector& u = state_.u[c];
    std::string why;
    if (!u.allFinite()) {
      why = "non-finite moments";
    } else if (!(u(0) > 0.0)) {
      why = "nonpositive density";
    } else {
      const auto [u0, reduced] = normalize(u, mesh_.dimension(), cfg_.order);
      const RealizabilityReport rep = check_realizability(reduced);
      if (rep.realizable && rep.margin > 0.0) continue;
      why = "constraint " + to_string(rep.binding_constraint) + " violated, margin " + format_double(rep.margin);
    }
    const Eigen::Vector2d x = mesh_.cell_center(c);
    std::ostringstream msg;
    msg << "realizability lost after step " << state_.step << " in cell " << c << " at (" << x(0);
    if (mesh_.dimension() == 2) msg << ", " << x(1);
    msg << "), u = " << vector_text(u) << ": " << why;
    throw RealizabilityError(msg.str());
  }
}

RunResult run_case(const CaseConfig& cfg, ClosureBackend& backend,
                   const std::function<void(const StepDiagnostics&)>& on_step) {
  Simulation sim(cfg, backend);
  RunResult out;
  out.diagnostics.reserve(static_cast<std::size_t>(sim.steps()) + 1);
  for (int k = 0;; ++k) {
    sim.close();
    out.diagnostics.push_back(sim.diagnostics());
    if (on_step) on_step(out.diagnostics.back());
    if (k == sim.steps()) break;
    sim.advance();
  }
  out.final_state = sim.state();
  return out;
}

CompareResult run_compare(const CaseConfig& cfg, const IcnnModel& model,
                          const std::function<void(int, double)>& on_step) {
  NewtonBackend newton(cfg.newton);
  IcnnBackend icnn(model);
  Simulation a(cfg, newton);
  Simulation b(cfg, icnn);
  CompareResult out;
  const int n_cells = a.mesh().cell_count();
  for (int k = 0;; ++k) {
    a.close();
    b.close();
    out.newton.diagnostics.push_back(a.diagnostics());
    out.icnn.diagnostics.push_back(b.diagnostics());
    Eigen::VectorXd rel(n_cells);
    for (int c = 0; c < n_cells; ++c) {
      const double ref = a.state().u[c](0);
      rel(c) = std::abs(b.state().u[c](0) - ref) / std::abs(ref);
    }
    out.mean_relative_error.push_back(rel.mean());
    out.max_relative_error.push_back(rel.maxCoeff());
    if (on_step) on_step(k, rel.mean());
    if (k == a.steps()) {
      out.final_relative_error = rel;
      break;
    }
    a.advance();
    b.advance();
  }
  out.newton.final_state = a.state();
  out.icnn.final_state = b.state();
  return out;
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<StepDiagnostics>& rows,
                           const std::vector<double>* mean_rel, const std::vector<double>* max_rel) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "step,t,mass,entropy";
  if (mean_rel) out << ",mean_rel_err_u0";
  if (max_rel) out << ",max_rel_err_u0";
  out << "\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    out << r.step << "," << format_double(r.t) << "," << format_double(r.mass) << "," << format_double(r.entropy);
    if (mean_rel) out << "," << format_double((*mean_rel)[k]);
    if (max_rel) out << "," << format_double((*max_rel)[k]);
    out << "\n";
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_field_csv(const std::filesystem::path& path, const Mesh& mesh, const std::vector<MomentVector>& u,
                     const Eigen::VectorXd* relative_error) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "x";
  if (mesh.dimension() == 2) out << ",y";
  const Eigen::Index n = u.empty() ? 0 : u.front().size();
  for (Eigen::Index i = 0; i < n; ++i) out << ",u" << i;
  if (relative_error) out << ",rel_err_u0";
  out << "\n";
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const Eigen::Vector2d x = mesh.cell_center(c);
    out << format_double(x(0));
    if (mesh.dimension() == 2) out << "," << format_double(x(1));
    for (Eigen::Index i = 0; i < n; ++i) out << "," << format_double(u[c](i));
    if (relative_error) out << "," << format_double((*relative_error)(c));
    out << "\n";
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace nc
