#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace nc {

enum class BoundaryTag { kInterior, kInflow, kFarfield, kPeriodic };

// Oriented face: the normal points from cell `left` into cell `right`.
// A ghost side is marked with -1 and carries the boundary tag.
struct Face {
  int left = -1;
  int right = -1;
  Eigen::Vector2d normal = Eigen::Vector2d::UnitX();
  double length = 1.0;
  BoundaryTag tag = BoundaryTag::kInterior;
};

// Uniform Cartesian grid. 1D meshes have ny = 1 and unit face length.
class Mesh {
 public:
  // [x0, x1] with nx cells and ghost cells on both ends (inflow left, farfield right).
  static Mesh interval(double x0, double x1, int nx);
  // [x0, x1] x [y0, y1], fully periodic.
  static Mesh periodic_rectangle(double x0, double x1, double y0, double y1, int nx, int ny);

  int dimension() const { return dimension_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int cell_count() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area(int /*cell*/) const { return dimension_ == 1 ? dx_ : dx_ * dy_; }
  Eigen::Vector2d cell_center(int cell) const;
  int cell_index(int i, int j) const { return j * nx_ + i; }

  const std::vector<Face>& faces() const { return faces_; }
  // (face index, +1 if the cell is the face's left side, -1 otherwise)
  const std::vector<std::pair<int, int>>& cell_faces(int cell) const { return cell_faces_[cell]; }

 private:
  void add_face(const Face& f);

  int dimension_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  double x0_ = 0.0;
  double y0_ = 0.0;
  double dx_ = 0.0;
  double dy_ = 1.0;
  std::vector<Face> faces_;
  std::vector<std::vector<std::pair<int, int>>> cell_faces_;
};

}  // namespace nc
