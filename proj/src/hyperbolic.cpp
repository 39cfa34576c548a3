#include "sinepalm/hyperbolic.hpp"

#include <cmath>
#include <stdexcept>

namespace sinepalm {

cplx ExtPoint::value() const {
  if (infinite_) throw std::domain_error("point at infinity has no finite value");
  return z_;
}

HalfPlanePoint::HalfPlanePoint(double x, double y) : p_(cplx(x, y)), y_(y) {
  if (!(y >= 0.0) || !std::isfinite(x) || !std::isfinite(y))
    throw std::invalid_argument("half-plane point requires finite x and y >= 0");
}

HalfPlanePoint::HalfPlanePoint(ExtPoint p) : p_(p) {
  if (p.is_infinite()) return;
  const cplx z = p.value();
  if (!(z.imag() >= 0.0))
    throw std::invalid_argument("half-plane point requires y >= 0");
  y_ = z.imag();
}

double HalfPlanePoint::x() const { return p_.value().real(); }
double HalfPlanePoint::y() const { return p_.value().imag(); }

DiskPoint::DiskPoint(cplx w) : w_(w) {
  if (!(std::abs(w) <= 1.0 + kBoundaryTol))
    throw std::invalid_argument("disk point requires |w| <= 1");
}

Mobius2x2 Mobius2x2::inverse() const {
  const cplx dt = det();
  if (dt == cplx(0.0)) throw std::domain_error("degenerate transform");
  return {d / dt, -b / dt, -c / dt, a / dt};
}

bool Mobius2x2::is_real(double tol) const noexcept {
  return std::abs(a.imag()) <= tol && std::abs(b.imag()) <= tol &&
         std::abs(c.imag()) <= tol && std::abs(d.imag()) <= tol;
}

ExtPoint mobius_apply(const Mobius2x2& m, ExtPoint z) {
  if (m.det() == cplx(0.0)) throw std::domain_error("degenerate transform");
  cplx num, den;
  if (z.is_infinite()) {
    num = m.a;
    den = m.c;
  } else {
    const cplx v = z.value();
    num = m.a * v + m.b;
    den = m.c * v + m.d;
  }
  if (den == cplx(0.0)) return ExtPoint::infinity();
  return ExtPoint(num / den);
}

Mobius2x2 cayley_matrix() { return {1.0, cplx(0, -1), 1.0, cplx(0, 1)}; }

cplx cayley(ExtPoint z) {
  if (z.is_infinite()) return 1.0;
  const cplx v = z.value();
  return (v - cplx(0, 1)) / (v + cplx(0, 1));
}

ExtPoint inverse_cayley(cplx w) {
  if (w == cplx(1.0)) return ExtPoint::infinity();
  return ExtPoint(cplx(0, 1) * (1.0 + w) / (1.0 - w));
}

Mobius2x2 affine_matrix(const HalfPlanePoint& p) {
  if (p.on_boundary()) throw std::domain_error("boundary affine parameter");
  return {1.0, -p.x(), 0.0, p.y()};
}

Mobius2x2 affine_matrix(const DiskPoint& p) {
  if (p.on_boundary()) throw std::domain_error("boundary affine parameter");
  const cplx g = p.value();
  const cplx gb = std::conj(g);
  return {1.0 / (1.0 - g), g / (g - 1.0), gb / (gb - 1.0), 1.0 / (1.0 - gb)};
}

Mobius2x2 rotation_about_i(std::optional<double> r) {
  if (!r) return Mobius2x2::identity();
  const double s = 1.0 / std::sqrt(1.0 + *r * *r);
  return {s * *r, s, -s, s * *r};
}

cplx iota(cplx gamma) {
  if (gamma == cplx(1.0)) throw std::domain_error("pole of iota");
  return -gamma * (1.0 - std::conj(gamma)) / (1.0 - gamma);
}

double poisson(cplx gamma, cplx u) {
  if (std::abs(std::abs(u) - 1.0) > 1e-10)
    throw std::domain_error("poisson kernel requires |u| = 1");
  if (!(std::abs(gamma) < 1.0))
    throw std::domain_error("poisson kernel requires |gamma| < 1");
  return (1.0 - std::norm(gamma)) / std::norm(u - gamma);
}

double hyp_distance(const HalfPlanePoint& z1, const HalfPlanePoint& z2) {
  if (z1.on_boundary() || z2.on_boundary())
    throw std::domain_error("hyperbolic distance requires interior points");
  const double arg = 1.0 + std::norm(z1.value() - z2.value()) / (2.0 * z1.y() * z2.y());
  return std::acosh(arg);
}

}  // namespace sinepalm
