#include "nc/icnn.hpp"

#include "nc/errors.hpp"
#include "nc/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nc {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

IcnnModel::IcnnModel(int input_dimension, std::vector<IcnnLayer> layers)
    : input_dimension_(input_dimension), layers_(std::move(layers)) {
  validate();
}

void IcnnModel::validate() const {
  if (input_dimension_ < 1) throw UsageError("icnn: input dimension must be positive");
  if (layers_.empty()) throw UsageError("icnn: model has no layers");
  Eigen::Index prev = 0;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    const Eigen::Index w = l.width();
    std::ostringstream where;
    where << "icnn layer " << k << ": ";
    if (w < 1) throw UsageError(where.str() + "empty layer");
    if (l.wx.rows() != w || l.wx.cols() != input_dimension_) throw UsageError(where.str() + "Wx shape");
    if (l.wz.rows() != (k == 0 ? 0 : w) || l.wz.cols() != prev) throw UsageError(where.str() + "Wz shape");
    const bool last = k + 1 == layers_.size();
    if (last != l.linear) throw UsageError(where.str() + "only the output layer is linear");
    prev = w;
  }
  if (prev != 1) throw UsageError("icnn: output layer must have width 1");
}

IcnnModel IcnnModel::build(int input_dimension, int width, int depth) {
  if (width < 2 || depth < 1) throw UsageError("icnn: layout needs width >= 2 and depth >= 1");
  std::vector<IcnnLayer> layers;
  auto add = [&](Eigen::Index w, Eigen::Index prev, bool linear) {
    IcnnLayer l;
    l.wz = Eigen::MatrixXd::Zero(prev == 0 ? 0 : w, prev);
    l.wx = Eigen::MatrixXd::Zero(w, input_dimension);
    l.b = Eigen::VectorXd::Zero(w);
    l.linear = linear;
    layers.push_back(std::move(l));
  };
  add(width, 0, false);
  for (int k = 1; k < depth; ++k) add(width, width, false);
  add(width / 2, width, false);
  add(1, width / 2, true);
  IcnnModel m(input_dimension, std::move(layers));
  m.block_width_ = width;
  m.block_depth_ = depth;
  return m;
}

Eigen::Index IcnnModel::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto& l : layers_) n += l.wz.size() + l.wx.size() + l.b.size();
  return n;
}

namespace {

template <typename Visit>
void for_each_block(std::vector<IcnnLayer>& layers, Visit&& visit) {
  for (auto& l : layers) {
    visit(l.wz, true);
    visit(l.wx, false);
    visit(l.b, false);
  }
}

}  // namespace

Eigen::VectorXd IcnnModel::parameters() const {
  Eigen::VectorXd theta(parameter_count());
  Eigen::Index pos = 0;
  auto& layers = const_cast<std::vector<IcnnLayer>&>(layers_);
  for_each_block(layers, [&](auto& block, bool) {
    for (Eigen::Index i = 0; i < block.rows(); ++i)
      for (Eigen::Index j = 0; j < block.cols(); ++j) theta(pos++) = block(i, j);
  });
  return theta;
}

void IcnnModel::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != parameter_count()) throw UsageError("icnn: parameter vector has wrong length");
  Eigen::Index pos = 0;
  for_each_block(layers_, [&](auto& block, bool) {
    for (Eigen::Index i = 0; i < block.rows(); ++i)
      for (Eigen::Index j = 0; j < block.cols(); ++j) block(i, j) = theta(pos++);
  });
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> IcnnModel::wz_ranges() const {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index pos = 0;
  for (const auto& l : layers_) {
    if (l.wz.size() > 0) out.emplace_back(pos, pos + l.wz.size());
    pos += l.wz.size() + l.wx.size() + l.b.size();
  }
  return out;
}

void IcnnModel::project_nonnegative() {
  for (auto& l : layers_) l.wz = l.wz.cwiseMax(0.0);
}

double IcnnModel::min_wz() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : layers_)
    if (l.wz.size() > 0) m = std::min(m, l.wz.minCoeff());
  return m;
}

void initialize(IcnnModel& model, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (auto& l : model.mutable_layers()) {
    const double fan_in = static_cast<double>(std::max<Eigen::Index>(l.wz.cols(), 1));
    for (Eigen::Index i = 0; i < l.wz.size(); ++i) l.wz.data()[i] = rng.uniform(0.0, 1.0 / fan_in);
    const double glorot = std::sqrt(6.0 / static_cast<double>(l.wx.rows() + l.wx.cols()));
    for (Eigen::Index i = 0; i < l.wx.size(); ++i) l.wx.data()[i] = rng.uniform(-glorot, glorot);
    l.b.setZero();
  }
}

namespace {

// Activations and activation slopes of every layer for a batch of columns.
struct Tape {
  std::vector<Eigen::MatrixXd> z;
  std::vector<Eigen::MatrixXd> slope;
};

void check_input(const IcnnModel& model, Eigen::Index rows) {
  if (rows != model.input_dimension()) {
    std::ostringstream msg;
    msg << "icnn: input has dimension " << rows << ", model expects " << model.input_dimension();
    throw UsageError(msg.str());
  }
}

Tape run_forward(const IcnnModel& model, const Eigen::MatrixXd& x) {
  check_input(model, x.rows());
  const auto& layers = model.layers();
  Tape t;
  t.z.reserve(layers.size());
  t.slope.reserve(layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    Eigen::MatrixXd a = l.wx * x;
    if (k > 0) a.noalias() += l.wz * t.z.back();
    a.colwise() += l.b;
    if (l.linear) {
      t.slope.push_back(Eigen::MatrixXd::Ones(a.rows(), a.cols()));
      t.z.push_back(std::move(a));
      continue;
    }
    // softplus and sigmoid share exp(-|a|); same formulas as the scalar versions
    const Eigen::ArrayXXd e = (-a.array().abs()).exp();
    t.z.push_back((a.array().max(0.0) + e.log1p()).matrix());
    t.slope.push_back(((a.array() >= 0.0).select(Eigen::ArrayXXd::Ones(e.rows(), e.cols()), e) / (1.0 + e)).matrix());
  }
  return t;
}

// d(sum of outputs)/dx for every column.
Eigen::MatrixXd run_input_gradient(const IcnnModel& model, const Eigen::MatrixXd& x, const Tape& t) {
  const auto& layers = model.layers();
  Eigen::MatrixXd gx = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::MatrixXd zbar = Eigen::MatrixXd::Ones(1, x.cols());
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& l = layers[k];
    const Eigen::MatrixXd abar = t.slope[k].cwiseProduct(zbar);
    gx.noalias() += l.wx.transpose() * abar;
    if (k > 0) zbar = l.wz.transpose() * abar;
  }
  return gx;
}

}  // namespace

void evaluate_batch(const IcnnModel& model, const Eigen::MatrixXd& inputs, Eigen::RowVectorXd* values,
                    Eigen::MatrixXd* gradients) {
  const Tape t = run_forward(model, inputs);
  if (values) *values = t.z.back().row(0);
  if (gradients) *gradients = run_input_gradient(model, inputs, t);
}

double forward(const IcnnModel& model, const Eigen::VectorXd& x) {
  Eigen::RowVectorXd v;
  evaluate_batch(model, x, &v, nullptr);
  return v(0);
}

Eigen::VectorXd input_gradient(const IcnnModel& model, const Eigen::VectorXd& x) {
  Eigen::MatrixXd g;
  evaluate_batch(model, x, nullptr, &g);
  return g.col(0);
}

namespace {

InferenceResult complete_inference(double h, const Eigen::VectorXd& alpha_reduced, const MomentBasis& basis) {
  InferenceResult r;
  r.h = h;
  r.alpha = assemble_normalized_alpha(alpha_reduced, basis);
  r.u = moments_of(reconstruct_density(r.alpha, basis), basis);
  return r;
}

void check_basis(const IcnnModel& model, const MomentBasis& basis) {
  if (basis.reduced_size() != model.input_dimension()) {
    std::ostringstream msg;
    msg << "icnn: model input dimension " << model.input_dimension() << " does not match basis with "
        << basis.reduced_size() << " reduced moments";
    throw HeaderMismatchError(msg.str());
  }
}

}  // namespace

InferenceResult infer_normalized(const IcnnModel& model, const Eigen::VectorXd& reduced,
                                 const MomentBasis& basis) {
  check_basis(model, basis);
  Eigen::RowVectorXd h;
  Eigen::MatrixXd g;
  evaluate_batch(model, reduced, &h, &g);
  return complete_inference(h(0), g.col(0), basis);
}

InferenceResult infer_scaled(const IcnnModel& model, const MomentVector& u, const MomentBasis& basis) {
  if (!(u(0) > 0.0)) throw DomainError("infer_scaled: u_0 must be positive");
  InferenceResult r = infer_normalized(model, u.tail(u.size() - 1) / u(0), basis);
  r.alpha = rescale_alpha(r.alpha, u(0));
  return r;
}

std::vector<InferenceResult> infer_scaled_batch(const IcnnModel& model, std::span<const MomentVector> us,
                                                const MomentBasis& basis, bool parallel) {
  check_basis(model, basis);
  const Eigen::Index n = basis.reduced_size();
  const Eigen::Index count = static_cast<Eigen::Index>(us.size());
  Eigen::MatrixXd x(n, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto& u = us[static_cast<std::size_t>(j)];
    if (u.size() != n + 1) throw UsageError("infer_scaled_batch: moment vector has wrong length");
    if (!(u(0) > 0.0)) throw DomainError("infer_scaled: u_0 must be positive");
    x.col(j) = u.tail(n) / u(0);
  }
  // Column blocks keep the per-layer temporaries in cache.
  constexpr Eigen::Index kBlock = 256;
  const Eigen::Index blocks = (count + kBlock - 1) / kBlock;
  std::vector<InferenceResult> out(us.size());
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(static) if (parallel)
  for (Eigen::Index blk = 0; blk < blocks; ++blk) {
    const Eigen::Index first = blk * kBlock;
    const Eigen::Index width = std::min(kBlock, count - first);
    Eigen::RowVectorXd h;
    Eigen::MatrixXd g;
    evaluate_batch(model, x.middleCols(first, width), &h, &g);
    for (Eigen::Index j = 0; j < width; ++j) {
      const auto idx = static_cast<std::size_t>(first + j);
      try {
        InferenceResult r = complete_inference(h(j), g.col(j), basis);
        r.alpha = rescale_alpha(r.alpha, us[idx](0));
        out[idx] = std::move(r);
      } catch (const std::exception& e) {
#pragma omp critical
        {
          failed = true;
          failure = e.what();
        }
      }
    }
  }
  if (failed) throw NumericalError("infer_scaled_batch: " + failure);
  return out;
}

LossBreakdown loss(const IcnnModel& model, std::span<const ClosureSample> batch, const MomentBasis& basis,
                   const LossWeights& weights, Eigen::VectorXd* gradient) {
  if (batch.empty()) throw UsageError("loss: empty batch");
  check_basis(model, basis);
  const Eigen::Index n = basis.reduced_size();
  const Eigen::Index count = static_cast<Eigen::Index>(batch.size());
  const double inv_b = 1.0 / static_cast<double>(count);
  const double alpha_components = weights.full_alpha ? static_cast<double>(n + 1) : static_cast<double>(n);
  const double u_components = static_cast<double>(n + 1);

  Eigen::MatrixXd x(n, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto& s = batch[static_cast<std::size_t>(j)];
    if (s.u.size() != n + 1 || s.alpha.size() != n + 1) throw UsageError("loss: sample has wrong length");
    x.col(j) = s.u.tail(n);
  }
  const Tape t = run_forward(model, x);
  const Eigen::MatrixXd g = run_input_gradient(model, x, t);

  const Eigen::MatrixXd& table = basis.table();
  const Eigen::VectorXd& w = basis.weights();

  LossBreakdown out;
  // dL/dN and dL/d(grad N) per column
  Eigen::RowVectorXd p(count);
  Eigen::MatrixXd c(n, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    const auto& s = batch[static_cast<std::size_t>(j)];
    const double h_theta = t.z.back()(0, j);
    const LagrangeMultipliers alpha = assemble_normalized_alpha(g.col(j), basis);
    const Eigen::VectorXd wf = w.cwiseProduct(reconstruct_density(alpha, basis));
    const Eigen::VectorXd u_theta = table * wf;

    const double dh = s.h - h_theta;
    const Eigen::VectorXd da = s.alpha - alpha;
    const Eigen::VectorXd du = s.u - u_theta;
    out.h += dh * dh * inv_b;
    const double sq_alpha = weights.full_alpha ? da.squaredNorm() : da.tail(n).squaredNorm();
    out.alpha += sq_alpha * inv_b / alpha_components;
    out.u += du.squaredNorm() * inv_b / u_components;

    if (!gradient) continue;
    p(j) = -2.0 * weights.h * dh * inv_b;
    const double ka = -2.0 * weights.alpha * inv_b / alpha_components;
    const double ku = -2.0 * weights.u * inv_b / u_components;
    // alpha_0 = -ln<exp(g.m^r)> so d alpha_0 / d g = -u_theta^r, and
    // d u_theta / d g = H[:, 1:] - u_theta u_theta^r^T.
    const Eigen::MatrixXd hess = table * wf.asDiagonal() * table.transpose();
    Eigen::VectorXd dl_du = ku * du;
    Eigen::VectorXd cj = ka * da.tail(n);
    if (weights.full_alpha) cj -= ka * da(0) * u_theta.tail(n);
    cj += hess.rightCols(n).transpose() * dl_du - u_theta.tail(n) * u_theta.dot(dl_du);
    c.col(j) = cj;
  }
  out.total = weights.h * out.h + weights.alpha * out.alpha + weights.u * out.u;
  if (!gradient) return out;

  // Parameter gradient of sum_j p_j N(x_j) + c_j . grad N(x_j): tangent pass
  // along c, then reverse over both the primal and the tangent.
  const auto& layers = model.layers();
  const std::size_t depth = layers.size();
  std::vector<Eigen::MatrixXd> adot(depth);
  std::vector<Eigen::MatrixXd> zdot(depth);
  const std::vector<Eigen::MatrixXd>& slope = t.slope;
  for (std::size_t k = 0; k < depth; ++k) {
    const auto& l = layers[k];
    adot[k] = l.wx * c;
    if (k > 0) adot[k].noalias() += l.wz * zdot[k - 1];
    zdot[k] = slope[k].cwiseProduct(adot[k]);
  }

  std::vector<IcnnLayer> grads(depth);
  Eigen::MatrixXd zbar = p;
  Eigen::MatrixXd zdotbar = Eigen::MatrixXd::Ones(1, count);
  for (std::size_t k = depth; k-- > 0;) {
    const auto& l = layers[k];
    Eigen::MatrixXd abar = slope[k].cwiseProduct(zbar);
    if (!l.linear) {
      const Eigen::MatrixXd curvature = slope[k].cwiseProduct((1.0 - slope[k].array()).matrix());
      abar += curvature.cwiseProduct(adot[k]).cwiseProduct(zdotbar);
    }
    const Eigen::MatrixXd adotbar = slope[k].cwiseProduct(zdotbar);
    auto& gl = grads[k];
    gl.wx = abar * x.transpose() + adotbar * c.transpose();
    gl.b = abar.rowwise().sum();
    if (k > 0) {
      gl.wz = abar * t.z[k - 1].transpose() + adotbar * zdot[k - 1].transpose();
      zbar = l.wz.transpose() * abar;
      zdotbar = l.wz.transpose() * adotbar;
    } else {
      gl.wz.resize(0, 0);
    }
  }
  gradient->resize(model.parameter_count());
  Eigen::Index pos = 0;
  for_each_block(grads, [&](auto& block, bool) {
    for (Eigen::Index i = 0; i < block.rows(); ++i)
      for (Eigen::Index jj = 0; jj < block.cols(); ++jj) (*gradient)(pos++) = block(i, jj);
  });
  return out;
}

std::pair<int, int> parse_layout(const std::string& text) {
  const auto sep = text.find_first_of("xX");
  try {
    if (sep == std::string::npos) throw std::invalid_argument("no separator");
    std::size_t used_w = 0;
    std::size_t used_d = 0;
    const std::string ws = text.substr(0, sep);
    const std::string ds = text.substr(sep + 1);
    const int width = std::stoi(ws, &used_w);
    const int depth = std::stoi(ds, &used_d);
    if (used_w != ws.size() || used_d != ds.size()) throw std::invalid_argument("trailing characters");
    if (width < 2 || depth < 1) throw std::invalid_argument("out of range");
    return {width, depth};
  } catch (const std::exception&) {
    throw UsageError("invalid layout '" + text + "' (expected WIDTHxDEPTH, width >= 2, depth >= 1)");
  }
}

}  // namespace nc
