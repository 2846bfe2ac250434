#include "nlsinv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsinv/error.hpp"

namespace nlsinv {

PolarGrid::PolarGrid(int nr, int ntheta, double radius)
    : nr_(nr), ntheta_(ntheta), radius_(radius) {
  NLSINV_REQUIRE(nr >= 3, "PolarGrid: need at least 3 radial cells");
  NLSINV_REQUIRE(ntheta >= 4 && ntheta % 2 == 0, "PolarGrid: ntheta must be even and >= 4");
  NLSINV_REQUIRE(radius > 0.0, "PolarGrid: radius must be positive");
}

Vec2 PolarGrid::point(int i, int j) const {
  const double r_i = r(i), t = theta(j);
  return {r_i * std::cos(t), r_i * std::sin(t)};
}

Vec2 PolarGrid::boundary_point(int j) const {
  const double t = theta(j);
  return {radius_ * std::cos(t), radius_ * std::sin(t)};
}

std::vector<Vec2> PolarGrid::points() const {
  std::vector<Vec2> out;
  out.reserve(size());
  for (int i = 0; i < nr_; ++i)
    for (int j = 0; j < ntheta_; ++j) out.push_back(point(i, j));
  return out;
}

std::vector<Vec2> PolarGrid::boundary_points() const {
  std::vector<Vec2> out;
  out.reserve(ntheta_);
  for (int j = 0; j < ntheta_; ++j) out.push_back(boundary_point(j));
  return out;
}

namespace {

void require_finite(const std::vector<cdouble>& v, const char* what) {
  for (const cdouble& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ParameterError(std::string(what) + ": non-finite entry");
}

void require_same_grid(const PolarGrid& a, const PolarGrid& b, const char* what) {
  if (!(a == b)) throw ParameterError(std::string(what) + ": grid mismatch");
}

double sup(const std::vector<cdouble>& v) {
  double s = 0.0;
  for (const cdouble& z : v) s = std::max(s, std::abs(z));
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

PolarField::PolarField(const PolarGrid& grid) : grid_(grid), values_(grid.size()) {}

PolarField::PolarField(const PolarGrid& grid, std::vector<cdouble> values)
    : grid_(grid), values_(std::move(values)) {
  NLSINV_REQUIRE(values_.size() == grid_.size(), "PolarField: size does not match grid");
  require_finite(values_, "PolarField");
}

PolarField& PolarField::operator+=(const PolarField& o) {
  require_same_grid(grid_, o.grid_, "PolarField +=");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
  return *this;
}

PolarField& PolarField::operator-=(const PolarField& o) {
  require_same_grid(grid_, o.grid_, "PolarField -=");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
  return *this;
}

PolarField& PolarField::operator*=(cdouble s) {
  for (cdouble& z : values_) z *= s;
  return *this;
}

double PolarField::sup_norm() const { return sup(values_); }

PolarField operator+(PolarField a, const PolarField& b) { return a += b; }
PolarField operator-(PolarField a, const PolarField& b) { return a -= b; }
PolarField operator*(cdouble s, PolarField a) { return a *= s; }

BoundaryTrace::BoundaryTrace(const PolarGrid& grid) : grid_(grid), values_(grid.ntheta()) {}

BoundaryTrace::BoundaryTrace(const PolarGrid& grid, std::vector<cdouble> values)
    : grid_(grid), values_(std::move(values)) {
  NLSINV_REQUIRE(static_cast<int>(values_.size()) == grid_.ntheta(),
                 "BoundaryTrace: size does not match grid");
  require_finite(values_, "BoundaryTrace");
}

BoundaryTrace& BoundaryTrace::operator+=(const BoundaryTrace& o) {
  require_same_grid(grid_, o.grid_, "BoundaryTrace +=");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
  return *this;
}

BoundaryTrace& BoundaryTrace::operator-=(const BoundaryTrace& o) {
  require_same_grid(grid_, o.grid_, "BoundaryTrace -=");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
  return *this;
}

BoundaryTrace& BoundaryTrace::operator*=(cdouble s) {
  for (cdouble& z : values_) z *= s;
  return *this;
}

double BoundaryTrace::sup_norm() const { return sup(values_); }

double BoundaryTrace::l2_norm() const {
  double s = 0.0;
  for (const cdouble& z : values_) s += std::norm(z);
  return std::sqrt(grid_.radius() * grid_.dtheta() * s);
}

BoundaryTrace operator+(BoundaryTrace a, const BoundaryTrace& b) { return a += b; }
BoundaryTrace operator-(BoundaryTrace a, const BoundaryTrace& b) { return a -= b; }
BoundaryTrace operator*(cdouble s, BoundaryTrace a) { return a *= s; }

// ---------------------------------------------------------------------------
// Potentials

double PotentialSpec::operator()(const Vec2& x) const {
  double v = 0.0;
  for (const PotentialComponent& c : components) {
    const double dx = x[0] - c.center[0], dy = x[1] - c.center[1];
    const double d2 = dx * dx + dy * dy;
    switch (kind) {
      case PotentialKind::Zero:
        break;
      case PotentialKind::GaussianSum:
        v += c.amplitude * std::exp(-d2 / (2.0 * c.scale * c.scale));
        break;
      case PotentialKind::DiskPiecewiseConstant:
        if (d2 < c.scale * c.scale) v += c.amplitude;
        break;
    }
  }
  return v;
}

cdouble PotentialSpec::fourier(const Vec2& xi) const {
  cdouble v = 0.0;
  const double rho = norm(xi);
  for (const PotentialComponent& c : components) {
    const cdouble phase = std::exp(cdouble(0.0, dot(xi, c.center)));
    switch (kind) {
      case PotentialKind::Zero:
        break;
      case PotentialKind::GaussianSum: {
        const double s2 = c.scale * c.scale;
        v += c.amplitude * 2.0 * kPi * s2 * std::exp(-0.5 * s2 * rho * rho) * phase;
        break;
      }
      case PotentialKind::DiskPiecewiseConstant: {
        const double a = c.scale;
        const double mass = rho == 0.0 ? kPi * a * a
                                       : 2.0 * kPi * a * std::cyl_bessel_j(1.0, a * rho) / rho;
        v += c.amplitude * mass * phase;
        break;
      }
    }
  }
  return v;
}

void PotentialSpec::validate(double domain_radius) const {
  NLSINV_REQUIRE(support_radius > 0.0 && support_radius < domain_radius,
                 "PotentialSpec: support_radius must lie in (0, R)");
  if (kind == PotentialKind::Zero) return;
  for (const PotentialComponent& c : components) {
    NLSINV_REQUIRE(c.scale > 0.0, "PotentialSpec: component scale must be positive");
    NLSINV_REQUIRE(std::isfinite(c.amplitude), "PotentialSpec: amplitude must be finite");
    const double rc = norm(c.center);
    if (kind == PotentialKind::DiskPiecewiseConstant) {
      NLSINV_REQUIRE(rc + c.scale <= support_radius,
                     "PotentialSpec: disk component leaves the support radius");
    } else {
      NLSINV_REQUIRE(rc <= support_radius,
                     "PotentialSpec: Gaussian center outside the support radius");
      const double d = domain_radius - rc;
      const double tail = std::exp(-d * d / (2.0 * c.scale * c.scale));
      NLSINV_REQUIRE(tail <= kGaussianTailTolerance,
                     "PotentialSpec: Gaussian component not contained in the domain");
    }
  }
}

PotentialSpec PotentialSpec::zero() { return {PotentialKind::Zero, {}, 0.4}; }

PotentialSpec PotentialSpec::default_gaussian() {
  return {PotentialKind::GaussianSum,
          {{{-0.15, 0.1}, 0.08, 1.0}, {{0.18, -0.12}, 0.06, 0.6}},
          0.4};
}

PotentialSpec PotentialSpec::default_disks() {
  return {PotentialKind::DiskPiecewiseConstant,
          {{{-0.15, 0.1}, 0.1, 1.0}, {{0.18, -0.12}, 0.1, 0.7}},
          0.4};
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Zero: return "zero";
    case PotentialKind::GaussianSum: return "gaussian";
    case PotentialKind::DiskPiecewiseConstant: return "disks";
  }
  return "zero";
}

PotentialKind potential_kind_from_string(const std::string& s) {
  if (s == "zero") return PotentialKind::Zero;
  if (s == "gaussian") return PotentialKind::GaussianSum;
  if (s == "disks") return PotentialKind::DiskPiecewiseConstant;
  throw ParameterError("unknown potential kind '" + s + "'");
}

PolarField sample_potential(const PotentialSpec& spec, const PolarGrid& grid) {
  spec.validate(grid.radius());
  return PolarField::from_function(grid, [&](const Vec2& x) { return cdouble(spec(x)); });
}

// ---------------------------------------------------------------------------
// Operators

std::vector<RingStencil> ring_stencils(const PolarGrid& grid) {
  std::vector<RingStencil> s(grid.nr());
  const double dr = grid.dr(), dt = grid.dtheta();
  for (int i = 0; i < grid.nr(); ++i) {
    const double r = grid.r(i);
    s[i].lower = (r - 0.5 * dr) / (r * dr * dr);
    s[i].upper = (r + 0.5 * dr) / (r * dr * dr);
    s[i].angular = 1.0 / (r * r * dt * dt);
  }
  return s;
}

PolarField helmholtz_apply(const PolarField& u, double k, const BoundaryTrace& dirichlet) {
  const PolarGrid& g = u.grid();
  require_same_grid(g, dirichlet.grid(), "helmholtz_apply");
  const int nr = g.nr(), nt = g.ntheta(), half = nt / 2;
  const auto st = ring_stencils(g);
  const double k2 = k * k;
  PolarField out(g);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const cdouble c = u(i, j);
      const cdouble in = i == 0 ? u(0, (j + half) % nt) : u(i - 1, j);
      const cdouble outer =
          i == nr - 1 ? dirichlet_ghost(dirichlet[j], u(nr - 1, j), u(nr - 2, j)) : u(i + 1, j);
      const cdouble left = u(i, (j + nt - 1) % nt), right = u(i, (j + 1) % nt);
      out(i, j) = st[i].lower * (in - c) + st[i].upper * (outer - c) +
                  st[i].angular * (left - 2.0 * c + right) + k2 * c;
    }
  }
  return out;
}

BoundaryTrace neumann_trace(const PolarField& u, const BoundaryTrace& dirichlet) {
  const PolarGrid& g = u.grid();
  require_same_grid(g, dirichlet.grid(), "neumann_trace");
  const int nr = g.nr();
  const double h = 3.0 * g.dr();
  BoundaryTrace out(g);
  for (int j = 0; j < g.ntheta(); ++j)
    out[j] = (8.0 * dirichlet[j] - 9.0 * u(nr - 1, j) + u(nr - 2, j)) / h;
  return out;
}

cdouble boundary_integral(const BoundaryTrace& g, const BoundaryTrace& h) {
  require_same_grid(g.grid(), h.grid(), "boundary_integral");
  cdouble s = 0.0;
  for (int j = 0; j < g.grid().ntheta(); ++j) s += g[j] * h[j];
  return g.grid().radius() * g.grid().dtheta() * s;
}

cdouble volume_integral(const std::vector<const PolarField*>& fields) {
  NLSINV_REQUIRE(!fields.empty(), "volume_integral: no fields given");
  const PolarGrid& g = fields.front()->grid();
  for (const PolarField* f : fields) require_same_grid(g, f->grid(), "volume_integral");
  cdouble total = 0.0;
  for (int i = 0; i < g.nr(); ++i) {
    cdouble ring = 0.0;
    for (int j = 0; j < g.ntheta(); ++j) {
      cdouble p = 1.0;
      for (const PolarField* f : fields) p *= (*f)(i, j);
      ring += p;
    }
    total += ring * g.r(i);
  }
  return total * g.dr() * g.dtheta();
}

}  // namespace nlsinv
