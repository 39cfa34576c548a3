#pragma once

// 2x2 matrix models of the hyperbolic-plane isometries used throughout the
// library: Cayley transform, affine maps fixing a boundary point, rotations
// about i, the iota involution, the Poisson kernel and hyperbolic distance.

#include <complex>
#include <optional>

namespace sinepalm {

using cplx = std::complex<double>;

/// |w| above this is treated as a point of the unit circle.
inline constexpr double kBoundaryTol = 1e-12;

/// A point of the Riemann sphere: a finite complex value or infinity.
class ExtPoint {
 public:
  ExtPoint(cplx z) : z_(z), infinite_(false) {}  // NOLINT: implicit by intent
  ExtPoint(double x) : z_(x, 0.0), infinite_(false) {}  // NOLINT

  static ExtPoint infinity() {
    ExtPoint p(cplx{});
    p.infinite_ = true;
    return p;
  }

  bool is_infinite() const noexcept { return infinite_; }
  /// Throws std::domain_error for the point at infinity.
  cplx value() const;

  friend bool operator==(const ExtPoint& a, const ExtPoint& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.z_ == b.z_;
  }

 private:
  cplx z_;
  bool infinite_;
};

/// Closed upper half-plane including the point at infinity.
class HalfPlanePoint {
 public:
  /// Requires y >= 0.
  HalfPlanePoint(double x, double y);
  explicit HalfPlanePoint(ExtPoint p);
  static HalfPlanePoint infinity() { return HalfPlanePoint(ExtPoint::infinity()); }

  bool is_infinite() const noexcept { return p_.is_infinite(); }
  /// y == 0 or infinity.
  bool on_boundary() const noexcept { return is_infinite() || y_ == 0.0; }
  double x() const;
  double y() const;
  cplx value() const { return p_.value(); }
  ExtPoint ext() const noexcept { return p_; }

 private:
  ExtPoint p_;
  double y_ = 0.0;
};

/// Closed unit disk.
class DiskPoint {
 public:
  /// Requires |w| <= 1 (up to kBoundaryTol).
  explicit DiskPoint(cplx w);
  cplx value() const noexcept { return w_; }
  bool on_boundary() const noexcept { return std::abs(w_) > 1.0 - kBoundaryTol; }

 private:
  cplx w_;
};

/// Complex 2x2 matrix acting on the sphere by z -> (az+b)/(cz+d).
struct Mobius2x2 {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static Mobius2x2 identity() { return {}; }
  cplx det() const noexcept { return a * d - b * c; }
  /// Throws std::domain_error("degenerate transform") when det == 0.
  Mobius2x2 inverse() const;
  bool is_real(double tol = 0.0) const noexcept;
  Mobius2x2 scaled(cplx s) const noexcept { return {s * a, s * b, s * c, s * d}; }

  friend Mobius2x2 operator*(const Mobius2x2& m, const Mobius2x2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
};

/// Projective action with P(a,0) = inf and M(inf) = a/c.
/// Throws std::domain_error("degenerate transform") for singular M.
ExtPoint mobius_apply(const Mobius2x2& m, ExtPoint z);

/// U = [[1,-i],[1,i]], mapping the upper half-plane onto the disk.
Mobius2x2 cayley_matrix();
/// (z-i)/(z+i); infinity maps to 1.
cplx cayley(ExtPoint z);
/// Inverse Cayley map; 1 maps to infinity.
ExtPoint inverse_cayley(cplx w);

/// A_{x+iy,H} = [[1,-x],[0,y]]; throws std::domain_error("boundary affine
/// parameter") for boundary points.
Mobius2x2 affine_matrix(const HalfPlanePoint& p);
/// A_{gamma,U}, the affine map of the disk fixing 1 and sending gamma to 0.
Mobius2x2 affine_matrix(const DiskPoint& p);

/// T_r = (1+r^2)^{-1/2} [[r,1],[-1,r]], the rotation about i sending r to
/// infinity. Passing nullopt (r = infinity) returns the identity.
Mobius2x2 rotation_about_i(std::optional<double> r);

/// gamma^iota = -gamma (1 - conj(gamma)) / (1 - gamma); the parameter of
/// A_{gamma,U}^{-1}. Throws std::domain_error("pole of iota") at gamma = 1.
cplx iota(cplx gamma);

/// (1 - |gamma|^2) / |u - gamma|^2 for |gamma| < 1 and |u| = 1.
double poisson(cplx gamma, cplx u);

/// arccosh(1 + |z1 - z2|^2 / (2 Im z1 Im z2)) for interior points.
double hyp_distance(const HalfPlanePoint& z1, const HalfPlanePoint& z2);

}  // namespace sinepalm
