#include "nc/mesh.hpp"

#include "nc/errors.hpp"

namespace nc {

void Mesh::add_face(const Face& f) {
  const int id = static_cast<int>(faces_.size());
  faces_.push_back(f);
  if (f.left >= 0) cell_faces_[f.left].emplace_back(id, +1);
  if (f.right >= 0) cell_faces_[f.right].emplace_back(id, -1);
}

Mesh Mesh::interval(double x0, double x1, int nx) {
  if (nx < 1 || !(x1 > x0)) throw UsageError("mesh: need nx >= 1 and x1 > x0");
  Mesh m;
  m.dimension_ = 1;
  m.nx_ = nx;
  m.ny_ = 1;
  m.x0_ = x0;
  m.dx_ = (x1 - x0) / nx;
  m.cell_faces_.resize(nx);
  for (int i = 0; i <= nx; ++i) {
    Face f;
    f.left = i == 0 ? -1 : i - 1;
    f.right = i == nx ? -1 : i;
    f.tag = i == 0 ? BoundaryTag::kInflow : (i == nx ? BoundaryTag::kFarfield : BoundaryTag::kInterior);
    m.add_face(f);
  }
  return m;
}

Mesh Mesh::periodic_rectangle(double x0, double x1, double y0, double y1, int nx, int ny) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) throw UsageError("mesh: invalid rectangle");
  Mesh m;
  m.dimension_ = 2;
  m.nx_ = nx;
  m.ny_ = ny;
  m.x0_ = x0;
  m.y0_ = y0;
  m.dx_ = (x1 - x0) / nx;
  m.dy_ = (y1 - y0) / ny;
  m.cell_faces_.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Face fx;
      fx.left = m.cell_index(i, j);
      fx.right = m.cell_index((i + 1) % nx, j);
      fx.normal = Eigen::Vector2d::UnitX();
      fx.length = m.dy_;
      fx.tag = i + 1 == nx ? BoundaryTag::kPeriodic : BoundaryTag::kInterior;
      m.add_face(fx);
      Face fy;
      fy.left = m.cell_index(i, j);
      fy.right = m.cell_index(i, (j + 1) % ny);
      fy.normal = Eigen::Vector2d::UnitY();
      fy.length = m.dx_;
      fy.tag = j + 1 == ny ? BoundaryTag::kPeriodic : BoundaryTag::kInterior;
      m.add_face(fy);
    }
  }
  return m;
}

Eigen::Vector2d Mesh::cell_center(int cell) const {
  const int i = cell % nx_;
  const int j = cell / nx_;
  return {x0_ + (i + 0.5) * dx_, dimension_ == 1 ? 0.0 : y0_ + (j + 0.5) * dy_};
}

}  // namespace nc
