#include "commands.hpp"

#include "nc/bench.hpp"
#include "nc/dataset.hpp"
#include "nc/errors.hpp"
#include "nc/metrics.hpp"
#include "nc/model_io.hpp"
#include "nc/realizability.hpp"
#include "nc/sampler.hpp"
#include "nc/solver.hpp"
#include "nc/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using namespace nc;

namespace ncl {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

bool is_set(const Config& c, const std::string& key) { return c.has(key) && !c.get_string(key).empty(); }

std::pair<double, double> get_pair(const Config& c, const std::string& key) {
  const auto parts = split(c.get_string(key), ' ');
  if (parts.size() != 2) throw UsageError("config key '" + key + "': expected two numbers");
  try {
    return {parse_double(parts[0]), parse_double(parts[1])};
  } catch (const UsageError&) {
    throw UsageError("config key '" + key + "': expected two numbers, got '" + c.get_string(key) + "'");
  }
}

Eigen::VectorXd parse_vector(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty()) throw UsageError("empty moment vector");
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_double(parts[i]);
  return v;
}

std::shared_ptr<const QuadratureRule> make_rule(int dim, const Config& c, int default_n_v) {
  if (dim == 1) {
    const int n = is_set(c, "n-v") ? c.get_int("n-v") : default_n_v;
    return std::make_shared<const QuadratureRule>(build_gauss_legendre(n));
  }
  if (is_set(c, "n-mu") || is_set(c, "n-phi")) {
    return std::make_shared<const QuadratureRule>(build_projected_sphere(c.get_int("n-mu"), c.get_int("n-phi")));
  }
  const auto [n_mu, n_phi] = sphere_split(is_set(c, "n-v") ? c.get_int("n-v") : default_n_v);
  return std::make_shared<const QuadratureRule>(build_projected_sphere(n_mu, n_phi));
}

std::string quadrature_tag(const QuadratureRule& rule) {
  if (rule.dimension == 1) return "gauss-legendre:" + std::to_string(rule.size());
  return "sphere:" + std::to_string(rule.n_mu) + "x" + std::to_string(rule.n_phi);
}

fs::path prepare_out_dir(const Config& c) {
  const fs::path dir = c.get_string("out-dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  c.write(dir / "resolved.cfg");
  return dir;
}

std::uint64_t file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::pair<int, int> default_layout(int dim, int order) {
  if (dim == 2) return {18, 8};
  return order == 1 ? std::pair{10, 7} : std::pair{15, 7};
}

void warn_quadrature_mismatch(const IcnnModel& model, const QuadratureRule& rule) {
  const auto it = model.metadata.find("quadrature");
  if (it != model.metadata.end() && it->second != quadrature_tag(rule)) {
    std::cerr << "warning: model was trained on quadrature " << it->second << ", evaluating on "
              << quadrature_tag(rule) << "\n";
  }
}

// ---------------------------------------------------------------- sample

int cmd_sample(const Config& c) {
  SamplerConfig sc;
  sc.dimension = c.get_int("dim");
  sc.order = c.get_int("order");
  sc.count = c.get_long("count");
  sc.delta = c.get_double("delta");
  if (is_set(c, "max-margin")) sc.max_margin = c.get_double("max-margin");
  sc.tau = c.get_double("tau");
  std::tie(sc.box_lo, sc.box_hi) = get_pair(c, "box");
  sc.seed = c.get_u64("seed");
  sc.draw_window = c.get_long("draw-window");
  const auto alg = parse_sampling_algorithm(c.get_string("alg"));
  sc.validate();
  auto rule = make_rule(sc.dimension, c, sc.dimension == 1 ? 28 : 200);
  MomentBasis basis(rule, sc.order);
  const fs::path dir = prepare_out_dir(c);

  SamplingStats stats;
  Dataset data;
  data.samples = alg == SamplingAlgorithm::kUniformMoments ? sample_uniform_moments(sc, basis, &stats)
                                                           : sample_uniform_alpha(sc, basis, &stats);
  auto& h = data.header;
  h.dimension = sc.dimension;
  h.order = sc.order;
  h.algorithm = to_string(alg);
  h.seed = sc.seed;
  h.delta = alg == SamplingAlgorithm::kUniformMoments ? sc.delta : 0.0;
  h.tau = sc.tau;
  h.box_lo = alg == SamplingAlgorithm::kUniformAlpha ? sc.box_lo : 0.0;
  h.box_hi = alg == SamplingAlgorithm::kUniformAlpha ? sc.box_hi : 0.0;
  h.n_mu = rule->dimension == 1 ? static_cast<int>(rule->size()) : rule->n_mu;
  h.n_phi = rule->n_phi;
  if (std::isfinite(sc.max_margin)) h.extra["max_margin"] = format_double(sc.max_margin);
  write_dataset(data, dir / "dataset.csv");

  std::printf("wrote %zu samples to %s\n", data.samples.size(), (dir / "dataset.csv").string().c_str());
  std::printf("draws %ld, accepted %ld, acceptance rate %.4f", stats.draws, stats.accepted,
              static_cast<double>(stats.accepted) / static_cast<double>(std::max(1L, stats.draws)));
  if (alg == SamplingAlgorithm::kUniformMoments) {
    std::printf(", probe acceptance %.4f, Newton failures %ld\n", stats.probe_acceptance, stats.newton_failures);
  } else {
    std::printf(", overflow discards %ld\n", stats.overflow_discards);
  }
  std::vector<double> margins;
  for (const auto& s : data.samples) margins.push_back(sample_margin(s, sc.dimension, sc.order));
  const double top = *std::max_element(margins.begin(), margins.end());
  const int bins = 10;
  std::vector<long> hist(bins, 0);
  for (double m : margins) hist[std::min(bins - 1, static_cast<int>(bins * std::max(0.0, m) / top))]++;
  std::printf("margin histogram (%d bins over [0, %.4g]):\n", bins, top);
  for (int b = 0; b < bins; ++b) {
    std::printf("  [%.4f, %.4f) %ld\n", top * b / bins, top * (b + 1) / bins, hist[b]);
  }
  return 0;
}

// ---------------------------------------------------------------- train

int cmd_train(const Config& c) {
  const fs::path data_path = c.get_string("data");
  if (data_path.empty()) throw UsageError("train: --data is required");
  const Dataset data = read_dataset(data_path);
  const int dim = data.header.dimension;
  const int order = data.header.order;
  if (is_set(c, "dim") && c.get_int("dim") != dim) {
    throw HeaderMismatchError("train: dataset has dimension " + std::to_string(dim));
  }
  if (is_set(c, "order") && c.get_int("order") != order) {
    throw HeaderMismatchError("train: dataset has order " + std::to_string(order));
  }
  std::shared_ptr<const QuadratureRule> rule;
  if (is_set(c, "n-v") || is_set(c, "n-mu")) {
    rule = make_rule(dim, c, 0);
  } else if (dim == 1) {
    rule = std::make_shared<const QuadratureRule>(build_gauss_legendre(data.header.n_mu > 0 ? data.header.n_mu : 28));
  } else if (data.header.n_mu > 0) {
    rule = std::make_shared<const QuadratureRule>(build_projected_sphere(data.header.n_mu, data.header.n_phi));
  } else {
    rule = make_rule(dim, c, 200);
  }
  MomentBasis basis(rule, order);

  TrainConfig tc;
  tc.epochs = c.get_int("epochs");
  tc.batch_size = c.get_int("batch-size");
  tc.learning_rate = c.get_double("lr");
  tc.plateau_patience = c.get_int("patience");
  tc.min_learning_rate = c.get_double("min-lr");
  tc.validation_fraction = c.get_double("val-fraction");
  tc.weights.h = c.get_double("w-h");
  tc.weights.alpha = c.get_double("w-alpha");
  tc.weights.u = c.get_double("w-u");
  const std::string alpha_term = c.get_string("alpha-term");
  if (alpha_term != "full" && alpha_term != "reduced") {
    throw UsageError("config key 'alpha-term': expected full or reduced");
  }
  tc.weights.full_alpha = alpha_term == "full";
  tc.seed = c.get_u64("seed");
  tc.validate();
  const auto [width, depth] = is_set(c, "layout") ? parse_layout(c.get_string("layout")) : default_layout(dim, order);
  const fs::path dir = prepare_out_dir(c);

  IcnnModel model = IcnnModel::build(basis.reduced_size(), width, depth);
  initialize(model, is_set(c, "init-seed") ? c.get_u64("init-seed") : tc.seed);
  const int log_every = c.get_int("log-every");
  Stopwatch sw;
  const TrainResult result = train(model, data.samples, basis, tc, [&](const EpochRecord& e) {
    if (log_every > 0 && e.epoch % log_every == 0) {
      std::printf("epoch %6d  lr %.3g  train %.4e  validation %.4e (h %.3e alpha %.3e u %.3e)\n", e.epoch,
                  e.learning_rate, e.train.total, e.validation.total, e.validation.h, e.validation.alpha,
                  e.validation.u);
      std::fflush(stdout);
    }
  });
  if (result.diverged) std::fprintf(stderr, "warning: %s; keeping the best checkpoint\n", result.message.c_str());

  model.metadata["dataset"] = data_path.string();
  model.metadata["dataset_hash"] = hex(file_hash(data_path));
  model.metadata["dimension"] = std::to_string(dim);
  model.metadata["order"] = std::to_string(order);
  model.metadata["quadrature"] = quadrature_tag(*rule);
  model.metadata["epochs_run"] = std::to_string(result.history.size());
  model.metadata["best_epoch"] = std::to_string(result.best_epoch);
  model.metadata["validation_total"] = format_double(result.best_validation.total);
  model.metadata["validation_h"] = format_double(result.best_validation.h);
  model.metadata["validation_alpha"] = format_double(result.best_validation.alpha);
  model.metadata["validation_u"] = format_double(result.best_validation.u);
  save_model(model, dir / "model.icnn");

  {
    std::ofstream out(dir / "history.csv");
    if (!out) throw IoError("cannot write history.csv");
    out << "epoch,lr,train_total,train_h,train_alpha,train_u,val_total,val_h,val_alpha,val_u\n";
    for (const auto& e : result.history) {
      out << e.epoch << "," << format_double(e.learning_rate) << "," << format_double(e.train.total) << ","
          << format_double(e.train.h) << "," << format_double(e.train.alpha) << "," << format_double(e.train.u)
          << "," << format_double(e.validation.total) << "," << format_double(e.validation.h) << ","
          << format_double(e.validation.alpha) << "," << format_double(e.validation.u) << "\n";
    }
  }
  const auto [train_set, val_set] = split_dataset(data.samples, tc.validation_fraction, tc.seed);
  const ErrorMetrics m = evaluate_model(model, val_set.empty() ? train_set : val_set, basis);
  std::printf("trained %dx%d for %zu epochs in %.1f s (best epoch %d)\n", width, depth, result.history.size(),
              sw.seconds(), result.best_epoch);
  std::printf("%s", format_metrics_table(m, (dim == 2 ? "M1 2D " : "M" + std::to_string(order) + " 1D ") +
                                             std::to_string(width) + "x" + std::to_string(depth))
                        .c_str());
  return 0;
}

// ---------------------------------------------------------------- closure

int cmd_closure(const Config& c) {
  const int dim = c.get_int("dim");
  if (dim != 1 && dim != 2) throw UsageError("config key 'dim': expected 1 or 2");
  std::vector<MomentVector> us;
  if (is_set(c, "u")) {
    for (const auto& item : split(c.get_string("u"), ';')) us.push_back(parse_vector(item));
  }
  if (is_set(c, "input")) {
    std::ifstream in(c.get_string("input"));
    if (!in) throw IoError("cannot open '" + c.get_string("input") + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
      try {
        us.push_back(parse_vector(line));
      } catch (const UsageError& e) {
        throw ParseError(e.what(), line_no);
      }
    }
  }
  if (us.empty()) throw UsageError("closure: give moments with --u or --input");
  const Eigen::Index len = us.front().size();
  for (const auto& u : us)
    if (u.size() != len) throw UsageError("closure: all moment vectors must have the same length");
  const int order = dim == 2 ? 1 : static_cast<int>(len) - 1;
  if ((dim == 2 && len != 3) || (dim == 1 && (order < 1 || order > 4))) {
    throw UsageError("closure: moment vectors must have length 2..5 in 1D or 3 in 2D");
  }
  auto rule = make_rule(dim, c, dim == 1 ? 28 : 200);
  MomentBasis basis(rule, order);

  const std::string backend = c.get_string("backend");
  if (backend != "newton" && backend != "icnn" && backend != "both") {
    throw UsageError("config key 'backend': expected newton, icnn or both");
  }
  std::optional<IcnnModel> model;
  if (backend != "newton") {
    if (!is_set(c, "model")) throw UsageError("closure: the icnn backend needs --model");
    model = load_model(c.get_string("model"), static_cast<int>(basis.reduced_size()));
    warn_quadrature_mismatch(*model, *rule);
  }
  NewtonConfig nc_cfg;
  nc_cfg.tolerance = c.get_double("tau");
  nc_cfg.max_iterations = c.get_int("max-iter");
  nc_cfg.validate();

  // Realizability first: a bad input is reported, not closed.
  for (std::size_t k = 0; k < us.size(); ++k) {
    const auto& u = us[k];
    RealizabilityReport rep;
    if (u(0) > 0.0) rep = check_realizability(normalize(u, dim, order).second);
    if (!(u(0) > 0.0) || !rep.realizable || rep.margin <= 0.0) {
      std::ostringstream msg;
      msg << "moment " << k << " is not realizable";
      if (u(0) > 0.0) {
        msg << ": constraint " << to_string(rep.binding_constraint) << " violated, margin " << rep.margin;
      } else {
        msg << ": u_0 must be positive";
      }
      throw RealizabilityError(msg.str());
    }
  }

  std::ostringstream out;
  out << "backend";
  for (Eigen::Index i = 0; i < len; ++i) out << ",u" << i;
  for (Eigen::Index i = 0; i < len; ++i) out << ",alpha" << i;
  out << ",h";
  for (Eigen::Index i = 0; i < len; ++i) out << ",urec" << i;
  out << "\n";
  auto emit = [&](const std::string& name, const MomentVector& u, const LagrangeMultipliers& a) {
    const Eigen::VectorXd f = reconstruct_density(a, basis);
    const Eigen::VectorXd urec = moments_of(f, basis);
    out << name;
    for (Eigen::Index i = 0; i < len; ++i) out << "," << format_double(u(i));
    for (Eigen::Index i = 0; i < len; ++i) out << "," << format_double(a(i));
    out << "," << format_double(entropy_functional(u, a, basis));
    for (Eigen::Index i = 0; i < len; ++i) out << "," << format_double(urec(i));
    out << "\n";
  };
  int status = 0;
  for (const auto& u : us) {
    std::optional<LagrangeMultipliers> a_newton;
    std::optional<LagrangeMultipliers> a_icnn;
    if (backend != "icnn") {
      const ClosureResult r = solve_dual(u, std::nullopt, nc_cfg, basis);
      if (!r.converged) {
        std::cerr << "Newton did not converge: " << r.diagnostics << "\n";
        status = 2;
      }
      a_newton = r.alpha;
      emit("newton", u, *a_newton);
    }
    if (model) {
      a_icnn = infer_scaled(*model, u, basis).alpha;
      emit("icnn", u, *a_icnn);
    }
    if (a_newton && a_icnn) {
      const Eigen::VectorXd da = *a_icnn - *a_newton;
      out << "delta";
      for (Eigen::Index i = 0; i < len; ++i) out << ",0";
      for (Eigen::Index i = 0; i < len; ++i) out << "," << format_double(da(i));
      out << "," << format_double(entropy_functional(u, *a_icnn, basis) - entropy_functional(u, *a_newton, basis));
      const Eigen::VectorXd du = moments_of(reconstruct_density(*a_icnn, basis), basis) -
                                 moments_of(reconstruct_density(*a_newton, basis), basis);
      for (Eigen::Index i = 0; i < len; ++i) out << "," << format_double(du(i));
      out << "\n";
    }
  }
  if (is_set(c, "out")) {
    std::ofstream f(c.get_string("out"));
    if (!f) throw IoError("cannot open '" + c.get_string("out") + "' for writing");
    f << out.str();
  } else {
    std::cout << out.str();
  }
  return status;
}

// ---------------------------------------------------------------- solve

CaseConfig case_from(const Config& c) {
  CaseConfig cc = CaseConfig::defaults(parse_case_id(c.get_string("case")));
  if (is_set(c, "t-final")) cc.t_final = c.get_double("t-final");
  if (is_set(c, "nx")) cc.nx = c.get_int("nx");
  if (is_set(c, "ny")) cc.ny = c.get_int("ny");
  else if (cc.dimension() == 2 && is_set(c, "nx")) cc.ny = cc.nx;
  if (is_set(c, "n-v")) cc.n_v = c.get_int("n-v");
  if (is_set(c, "n-mu")) cc.n_mu = c.get_int("n-mu");
  if (is_set(c, "n-phi")) cc.n_phi = c.get_int("n-phi");
  if (is_set(c, "cfl")) cc.cfl = c.get_double("cfl");
  if (is_set(c, "sigma")) cc.sigma = c.get_double("sigma");
  if (is_set(c, "floor")) cc.floor_density = c.get_double("floor");
  if (is_set(c, "inflow")) cc.inflow_density = c.get_double("inflow");
  const std::string rec = c.get_string("reconstruction");
  if (rec == "on") cc.reconstruction = true;
  else if (rec == "off") cc.reconstruction = false;
  else if (rec != "auto") throw UsageError("config key 'reconstruction': expected auto, on or off");
  cc.newton.tolerance = c.get_double("tau");
  cc.validate();
  return cc;
}

int cmd_solve(const Config& c) {
  if (!is_set(c, "case")) throw UsageError("solve: --case is required");
  const CaseConfig cc = case_from(c);
  const bool compare = c.get_bool("compare");
  const std::string backend = c.get_string("backend");
  if (backend != "newton" && backend != "icnn") throw UsageError("config key 'backend': expected newton or icnn");
  const auto rule = make_quadrature(cc);
  const MomentBasis basis(rule, cc.order);
  std::optional<IcnnModel> model;
  if (compare || backend == "icnn") {
    if (!is_set(c, "model")) throw UsageError("solve: the icnn backend and --compare need --model");
    model = load_model(c.get_string("model"), static_cast<int>(basis.reduced_size()));
    warn_quadrature_mismatch(*model, *rule);
  }
  const fs::path dir = prepare_out_dir(c);
  const Mesh mesh = make_mesh(cc);
  const double dt = timestep_size(cc, mesh);
  const int steps = step_count(cc.t_final, dt);
  std::printf("case %s: %d cells, %ld velocity nodes, dt %.6g, %d steps, final t %.6g\n", to_string(cc.id).c_str(),
              mesh.cell_count(), static_cast<long>(rule->size()), dt, steps, steps * dt);
  const int progress = std::max(1, steps / 10);
  Stopwatch sw;

  if (compare) {
    const CompareResult r = run_compare(cc, *model, [&](int k, double mean_rel) {
      if (k % progress == 0) {
        std::printf("step %5d  mean rel. error u0 %.4e\n", k, mean_rel);
        std::fflush(stdout);
      }
    });
    write_diagnostics_csv(dir / "diagnostics_newton.csv", r.newton.diagnostics);
    write_diagnostics_csv(dir / "diagnostics_icnn.csv", r.icnn.diagnostics, &r.mean_relative_error,
                          &r.max_relative_error);
    write_field_csv(dir / "field_newton.csv", mesh, r.newton.final_state.u);
    write_field_csv(dir / "field_icnn.csv", mesh, r.icnn.final_state.u, &r.final_relative_error);
    const double worst = *std::max_element(r.mean_relative_error.begin(), r.mean_relative_error.end());
    std::printf("done in %.1f s; max over steps of mean relative error in u0: %.4e\n", sw.seconds(), worst);
    return 0;
  }

  NewtonBackend newton(cc.newton);
  std::optional<IcnnBackend> icnn;
  if (model) icnn.emplace(*model);
  ClosureBackend& be = backend == "icnn" ? static_cast<ClosureBackend&>(*icnn) : newton;
  const RunResult r = run_case(cc, be, [&](const StepDiagnostics& d) {
    if (d.step % progress == 0) {
      std::printf("step %5d  t %.4f  mass %.10e  entropy %.10e\n", d.step, d.t, d.mass, d.entropy);
      std::fflush(stdout);
    }
  });
  write_diagnostics_csv(dir / "diagnostics.csv", r.diagnostics);
  write_field_csv(dir / "field.csv", mesh, r.final_state.u);
  const double m0 = r.diagnostics.front().mass;
  const double m1 = r.diagnostics.back().mass;
  double max_rise = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < r.diagnostics.size(); ++k) {
    max_rise = std::max(max_rise, r.diagnostics[k].entropy - r.diagnostics[k - 1].entropy);
  }
  std::printf("done in %.1f s; relative mass change %.3e; largest per-step entropy change %.3e\n", sw.seconds(),
              (m1 - m0) / m0, max_rise);
  return 0;
}

// ---------------------------------------------------------------- bench

int cmd_bench(const Config& c) {
  const int dim = c.get_int("dim");
  const int order = c.get_int("order");
  auto rule = make_rule(dim, c, dim == 1 ? 28 : 200);
  MomentBasis basis(rule, order);
  if (!is_set(c, "model")) throw UsageError("bench: --model is required");
  const IcnnModel model = load_model(c.get_string("model"), static_cast<int>(basis.reduced_size()));
  warn_quadrature_mismatch(model, *rule);

  BenchConfig bc;
  bc.populations.clear();
  for (const auto& p : split(c.get_string("populations"), ',')) bc.populations.push_back(parse_population(p));
  bc.batch_sizes.clear();
  for (const auto& b : split(c.get_string("batch-sizes"), ',')) {
    Config tmp;
    tmp.set("batch-sizes", b);
    bc.batch_sizes.push_back(tmp.get_long("batch-sizes"));
  }
  bc.repetitions = c.get_int("repetitions");
  bc.boundary_margin = c.get_double("boundary-margin");
  bc.interior_margin = c.get_double("interior-margin");
  bc.uniform_margin = c.get_double("uniform-margin");
  bc.newton.tolerance = c.get_double("tau");
  bc.seed = c.get_u64("seed");
  bc.parallel = c.get_bool("parallel");
  bc.validate();
  const fs::path dir = prepare_out_dir(c);

  const auto rows = run_bench(model, basis, bc);
  std::ofstream out(dir / "timing.csv");
  if (!out) throw IoError("cannot write timing.csv");
  out << "population,backend,batch_size,repetitions,total_mean_s,total_std_s,per_sample_mean_s,per_sample_std_s,"
         "failures\n";
  std::printf("%-10s %-7s %9s %24s %24s %8s\n", "population", "backend", "batch", "total [s]", "per sample [s]",
              "failures");
  for (const auto& r : rows) {
    out << to_string(r.population) << "," << r.backend << "," << r.batch_size << "," << r.total.repetitions << ","
        << format_double(r.total.mean) << "," << format_double(r.total.stddev) << ","
        << format_double(r.per_sample.mean) << "," << format_double(r.per_sample.stddev) << "," << r.failures
        << "\n";
    std::printf("%-10s %-7s %9ld %11.4e +- %9.2e %11.4e +- %9.2e %8ld\n", to_string(r.population).c_str(),
                r.backend.c_str(), r.batch_size, r.total.mean, r.total.stddev, r.per_sample.mean,
                r.per_sample.stddev, r.failures);
  }
  return 0;
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = {
      {"sample",
       "generate a closure dataset",
       {
           {"alg", "uniform-u", "uniform-u (rejection in moments) or uniform-alpha"},
           {"dim", "1", "velocity dimension (1 or 2)"},
           {"order", "1", "moment order (1D: 1..4, 2D: 1)"},
           {"count", "1000", "number of samples"},
           {"delta", "0.01", "minimum distance to the realizable boundary (uniform-u)"},
           {"max-margin", "", "maximum distance to the boundary (uniform-u)"},
           {"tau", "1e-8", "Newton gradient tolerance"},
           {"box", "-10 10", "alpha^r box bounds lo hi (uniform-alpha)", 2},
           {"seed", "0", "random seed"},
           {"n-v", "", "quadrature nodes (1D default 28, 2D default 200)"},
           {"n-mu", "", "2D: Gauss-Legendre nodes in mu"},
           {"n-phi", "", "2D: nodes in phi"},
           {"draw-window", "100000", "draw cap per sample and probe window"},
           {"out-dir", ".", "output directory"},
       },
       cmd_sample},
      {"train",
       "train an input-convex closure network",
       {
           {"data", "", "dataset CSV"},
           {"dim", "", "expected dimension (checked against the dataset)"},
           {"order", "", "expected order (checked against the dataset)"},
           {"layout", "", "WIDTHxDEPTH of the convex block (default 10x7, 15x7, 18x8)"},
           {"epochs", "2000", "training epochs"},
           {"batch-size", "32", "minibatch size"},
           {"lr", "1e-3", "initial learning rate"},
           {"patience", "200", "epochs without improvement before halving the rate"},
           {"min-lr", "1e-6", "learning rate floor"},
           {"val-fraction", "0.1", "held-out fraction"},
           {"w-h", "1", "weight of the h term"},
           {"w-alpha", "1", "weight of the alpha term"},
           {"w-u", "1", "weight of the u term"},
           {"alpha-term", "full", "compare full alpha or reduced alpha^r"},
           {"seed", "0", "random seed (split, shuffling, init)"},
           {"init-seed", "", "separate seed for the initial weights"},
           {"n-v", "", "override quadrature nodes"},
           {"n-mu", "", "override 2D mu nodes"},
           {"n-phi", "", "override 2D phi nodes"},
           {"log-every", "100", "print every N epochs (0: quiet)"},
           {"out-dir", ".", "output directory"},
       },
       cmd_train},
      {"closure",
       "evaluate the closure for given moments",
       {
           {"backend", "newton", "newton, icnn or both"},
           {"u", "", "moment vector, comma separated (repeatable)", -1},
           {"input", "", "CSV file with one moment vector per row"},
           {"dim", "1", "velocity dimension"},
           {"model", "", "model file for the icnn backend"},
           {"tau", "1e-8", "Newton gradient tolerance"},
           {"max-iter", "500", "Newton iteration cap"},
           {"n-v", "", "quadrature nodes"},
           {"n-mu", "", "2D: mu nodes"},
           {"n-phi", "", "2D: phi nodes"},
           {"out", "", "write CSV here instead of stdout"},
       },
       cmd_closure},
      {"solve",
       "run a kinetic test case",
       {
           {"case", "", "inflow-1d-m1, inflow-1d-m2 or periodic-2d-m1"},
           {"backend", "newton", "newton or icnn"},
           {"compare", "false", "run both backends and compare", 0},
           {"model", "", "model file"},
           {"t-final", "", "final time"},
           {"nx", "", "cells in x"},
           {"ny", "", "cells in y (2D, default nx)"},
           {"n-v", "", "quadrature nodes"},
           {"n-mu", "", "2D: mu nodes"},
           {"n-phi", "", "2D: phi nodes"},
           {"cfl", "", "CFL number"},
           {"sigma", "", "scattering coefficient"},
           {"floor", "", "vacuum floor density"},
           {"inflow", "", "1D inflow density"},
           {"reconstruction", "auto", "realizability reconstruction step: auto, on, off"},
           {"tau", "1e-8", "Newton gradient tolerance"},
           {"out-dir", ".", "output directory"},
       },
       cmd_solve},
      {"bench",
       "time Newton and network closures",
       {
           {"model", "", "model file"},
           {"dim", "1", "velocity dimension"},
           {"order", "2", "moment order"},
           {"n-v", "", "quadrature nodes"},
           {"n-mu", "", "2D: mu nodes"},
           {"n-phi", "", "2D: phi nodes"},
           {"populations", "uniform,boundary,interior", "comma separated populations"},
           {"batch-sizes", "1000", "comma separated batch sizes"},
           {"repetitions", "20", "timed repetitions"},
           {"boundary-margin", "0.01", "outer margin of the boundary shell"},
           {"interior-margin", "0.4", "minimum margin of the interior population"},
           {"uniform-margin", "1e-3", "standoff of the uniform population"},
           {"tau", "1e-8", "Newton gradient tolerance"},
           {"seed", "0", "random seed"},
           {"parallel", "true", "use OpenMP"},
           {"out-dir", ".", "output directory"},
       },
       cmd_bench},
  };
  return specs;
}

}  // namespace ncl
