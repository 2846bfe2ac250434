#pragma once

// Cell-centered polar grid on the disk B_R(0), fields on it, the discrete
// Helmholtz operator, boundary traces and quadrature.
//
// Node (i, j), 0-based, sits at r_i = (i + 1/2) dr, theta_j = j dtheta. There
// is no node at the origin; the innermost ring couples across the center to
// the value at theta + pi, which is why ntheta must be even. The Dirichlet
// condition at r = R enters through a ghost value at r = R + dr/2 obtained by
// quadratic extrapolation through (f at R, u at r_{Nr-1}, u at r_{Nr-2}).

#include <iosfwd>
#include <string>
#include <vector>

#include "nlsinv/types.hpp"

namespace nlsinv {

class PolarGrid {
 public:
  PolarGrid() = default;
  PolarGrid(int nr, int ntheta, double radius = 0.5);

  int nr() const { return nr_; }
  int ntheta() const { return ntheta_; }
  double radius() const { return radius_; }
  double dr() const { return radius_ / nr_; }
  double dtheta() const { return 2.0 * kPi / ntheta_; }
  std::size_t size() const { return static_cast<std::size_t>(nr_) * ntheta_; }

  double r(int i) const { return (i + 0.5) * dr(); }
  double theta(int j) const { return j * dtheta(); }
  Vec2 point(int i, int j) const;
  Vec2 boundary_point(int j) const;

  std::vector<Vec2> points() const;           // row-major (i, j)
  std::vector<Vec2> boundary_points() const;  // j = 0..ntheta-1

  bool operator==(const PolarGrid&) const = default;

 private:
  int nr_ = 0;
  int ntheta_ = 0;
  double radius_ = 0.0;
};

/// Complex field on the grid nodes, stored row-major: index i * ntheta + j.
class PolarField {
 public:
  PolarField() = default;
  explicit PolarField(const PolarGrid& grid);  // zeros
  PolarField(const PolarGrid& grid, std::vector<cdouble> values);

  template <typename F>
  static PolarField from_function(const PolarGrid& grid, F&& f) {
    PolarField out(grid);
    for (int i = 0; i < grid.nr(); ++i)
      for (int j = 0; j < grid.ntheta(); ++j) out(i, j) = f(grid.point(i, j));
    return out;
  }

  const PolarGrid& grid() const { return grid_; }
  std::vector<cdouble>& values() { return values_; }
  const std::vector<cdouble>& values() const { return values_; }

  cdouble& operator()(int i, int j) { return values_[index(i, j)]; }
  const cdouble& operator()(int i, int j) const { return values_[index(i, j)]; }

  PolarField& operator+=(const PolarField& o);
  PolarField& operator-=(const PolarField& o);
  PolarField& operator*=(cdouble s);

  double sup_norm() const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * grid_.ntheta() + j;
  }

  PolarGrid grid_;
  std::vector<cdouble> values_;
};

PolarField operator+(PolarField a, const PolarField& b);
PolarField operator-(PolarField a, const PolarField& b);
PolarField operator*(cdouble s, PolarField a);

/// Complex samples at the boundary points (R, theta_j).
class BoundaryTrace {
 public:
  BoundaryTrace() = default;
  explicit BoundaryTrace(const PolarGrid& grid);  // zeros
  BoundaryTrace(const PolarGrid& grid, std::vector<cdouble> values);

  template <typename F>
  static BoundaryTrace from_function(const PolarGrid& grid, F&& f) {
    BoundaryTrace out(grid);
    for (int j = 0; j < grid.ntheta(); ++j) out[j] = f(grid.boundary_point(j));
    return out;
  }

  const PolarGrid& grid() const { return grid_; }
  std::vector<cdouble>& values() { return values_; }
  const std::vector<cdouble>& values() const { return values_; }
  cdouble& operator[](int j) { return values_[j]; }
  const cdouble& operator[](int j) const { return values_[j]; }

  BoundaryTrace& operator+=(const BoundaryTrace& o);
  BoundaryTrace& operator-=(const BoundaryTrace& o);
  BoundaryTrace& operator*=(cdouble s);

  double sup_norm() const;
  /// sqrt(boundary_integral(g, conj g)).
  double l2_norm() const;

 private:
  PolarGrid grid_;
  std::vector<cdouble> values_;
};

BoundaryTrace operator+(BoundaryTrace a, const BoundaryTrace& b);
BoundaryTrace operator-(BoundaryTrace a, const BoundaryTrace& b);
BoundaryTrace operator*(cdouble s, BoundaryTrace a);

// ---------------------------------------------------------------------------
// Potentials

enum class PotentialKind { Zero, GaussianSum, DiskPiecewiseConstant };

/// Gaussian: amplitude * exp(-|x - center|^2 / (2 scale^2)).
/// Disk: amplitude on |x - center| < scale.
struct PotentialComponent {
  Vec2 center{};
  double scale = 0.0;
  double amplitude = 0.0;
  bool operator==(const PotentialComponent&) const = default;
};

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Zero;
  std::vector<PotentialComponent> components;
  double support_radius = 0.4;

  double operator()(const Vec2& x) const;

  /// Closed-form transform  int c(x) exp(i xi.x) dx  over R^2.
  cdouble fourier(const Vec2& xi) const;

  /// Throws ParameterError unless every component sits inside the disk of
  /// radius support_radius < R (Gaussians: relative tail at |x| = R at most
  /// kGaussianTailTolerance).
  void validate(double domain_radius) const;

  bool operator==(const PotentialSpec&) const = default;

  static PotentialSpec zero();
  static PotentialSpec default_gaussian();
  static PotentialSpec default_disks();
};

inline constexpr double kGaussianTailTolerance = 1e-3;

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& s);

/// Real-valued sampling of the potential at the grid nodes.
PolarField sample_potential(const PotentialSpec& spec, const PolarGrid& grid);

// ---------------------------------------------------------------------------
// Discrete operators

/// Radial/angular stencil weights of the 5-point polar Laplacian at ring i:
///   (Delta_h u)_ij = lower_i (u_{i-1,j} - u_ij) + upper_i (u_{i+1,j} - u_ij)
///                  + angular_i (u_{i,j+1} - 2 u_ij + u_{i,j-1})
/// lower_i = r_{i-1/2} / (r_i dr^2), upper_i = r_{i+1/2} / (r_i dr^2),
/// angular_i = 1 / (r_i^2 dtheta^2). This equals centered u_rr + u_r / r.
struct RingStencil {
  double lower = 0.0;
  double upper = 0.0;
  double angular = 0.0;
};
std::vector<RingStencil> ring_stencils(const PolarGrid& grid);

/// Ghost value at r = R + dr/2 from f(R), u(r_{Nr-1}), u(r_{Nr-2}).
inline cdouble dirichlet_ghost(cdouble f, cdouble u_last, cdouble u_prev) {
  return (8.0 / 3.0) * f - 2.0 * u_last + (1.0 / 3.0) * u_prev;
}

/// (Delta_h + k^2) u with the ghost set by the given Dirichlet data.
PolarField helmholtz_apply(const PolarField& field, double k, const BoundaryTrace& dirichlet);

/// d u / d r at r = R:  (8 f - 9 u_{Nr-1} + u_{Nr-2}) / (3 dr).
BoundaryTrace neumann_trace(const PolarField& field, const BoundaryTrace& dirichlet);

/// R dtheta sum_j g_j h_j  (no conjugation).
cdouble boundary_integral(const BoundaryTrace& g, const BoundaryTrace& h);

/// sum_ij (prod fields)_ij r_i dr dtheta.
cdouble volume_integral(const std::vector<const PolarField*>& fields);

template <typename... Rest>
cdouble volume_integral(const PolarField& first, const Rest&... rest) {
  return volume_integral(std::vector<const PolarField*>{&first, &rest...});
}

// ---------------------------------------------------------------------------
// CSV: first line "# Nr,Ntheta,R" with the values, then "i,j,re,im" rows with
// 1-based indices. Traces use i = 0 to mark the boundary ring.

void write_csv(std::ostream& os, const PolarField& field);
void write_csv(std::ostream& os, const BoundaryTrace& trace);
void write_csv(const std::string& path, const PolarField& field);
void write_csv(const std::string& path, const BoundaryTrace& trace);
PolarField read_field_csv(std::istream& is);
BoundaryTrace read_trace_csv(std::istream& is);
PolarField read_field_csv(const std::string& path);
BoundaryTrace read_trace_csv(const std::string& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace nlsinv
