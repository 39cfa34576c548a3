#pragma once

// Piecewise-constant Dirac operators tau u = R^{-1} J u' on [0,1] with
// boundary directions u0 (left) and u1 (right). Every cell carries a point
// x + iy of the upper half-plane and R = X^t X / (2y) with X = [[1,-x],[0,y]].

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sinepalm/hyperbolic.hpp"
#include "sinepalm/opuc.hpp"

namespace sinepalm {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// J = [[0,-1],[1,0]].
Mat2 symplectic_j();

enum class Origin { discrete_measure, sine_beta, custom };
std::string to_string(Origin o);
Origin origin_from_string(const std::string& s);

enum class Side { left, right };
std::string to_string(Side s);
Side side_from_string(const std::string& s);

struct CellPoint {
  double x = 0.0;
  double y = 1.0;
};

/// Right boundary specification: u1 = [-q,-1] for finite q, [1,0] for infinity.
struct BoundarySlope {
  std::optional<double> q;  // nullopt means infinity
  static BoundarySlope infinity() { return {}; }
  static BoundarySlope finite(double value) { return {value}; }
  Vec2 vector() const;
};

/// u0 has unit length and u0^t J u1 = 1 (or |u1| = 1 when parallel), to 1e-12.
bool boundary_vectors_normalized(const Vec2& u0, const Vec2& u1);

class DiracOperator {
 public:
  /// grid: 0 = t_0 < ... < t_m = 1; path: m cells with y > 0. u0 is rescaled
  /// to unit length; u1 is rescaled so that u0^t J u1 = 1 unless the two are
  /// parallel, in which case u1 is rescaled to unit length. With
  /// rescale = false the vectors must already satisfy these conventions and
  /// are stored bit for bit (used when reading serialized operators).
  DiracOperator(std::vector<double> grid, std::vector<CellPoint> path, Vec2 u0, Vec2 u1,
                Origin origin = Origin::custom, bool rescale = true);

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<CellPoint>& path() const noexcept { return path_; }
  const Vec2& u0() const noexcept { return u0_; }
  const Vec2& u1() const noexcept { return u1_; }
  Origin origin() const noexcept { return origin_; }
  std::size_t cells() const noexcept { return path_.size(); }
  double width(std::size_t k) const { return grid_.at(k + 1) - grid_.at(k); }
  /// R on cell k.
  Mat2 coefficient(std::size_t k) const;
  /// u0 and u1 are parallel.
  bool boundary_parallel() const noexcept { return parallel_; }

  friend bool operator==(const DiracOperator& a, const DiracOperator& b);

 private:
  std::vector<double> grid_;
  std::vector<CellPoint> path_;
  Vec2 u0_, u1_;
  Origin origin_;
  bool parallel_ = false;
};

/// Operator of a path parameter: m = n uniform cells carrying z_0..z_{n-1};
/// u0 = [1,0], u1 = [-z_n,-1] (or [1,0] when z_n is infinite).
DiracOperator build_operator(const HyperbolicPath& path);
/// Custom operator on a uniform grid with the given cells and right slope.
DiracOperator build_operator(const std::vector<CellPoint>& cells, BoundarySlope u1);
/// Operator of a measure on the circle, through its modified coefficients.
DiracOperator operator_from_measure(const UnitCircleMeasure& mu);

struct EigenData {
  Vec2 H1;        // H(t, lambda) at the requested grid point
  Vec2 dH1;       // d/dlambda of the above
  double normsq;  // H^t J dH = int_0^t H^t R H
};

/// Transfer-matrix solution at grid index `upto` (default: t = 1).
EigenData eval_H(const DiracOperator& op, double lambda,
                 std::optional<std::size_t> upto = std::nullopt);

/// Continuous phase alpha(t, lambda) = 2 Im log(A - iB) with alpha(0, .) = 0.
double phase_at(const DiracOperator& op, double lambda,
                std::optional<std::size_t> upto = std::nullopt);

/// Target residue u in alpha(1, lambda) = u + 2 pi k characterizing eigenvalues.
double eigen_phase_offset(const DiracOperator& op);

/// Eigenvalues in the half-open window [a, b), sorted. Throws
/// std::runtime_error("window budget ...") beyond 10^6 roots.
std::vector<double> eigenvalues_in(const DiracOperator& op, double a, double b);

struct SpectralMeasure {
  std::vector<std::pair<double, double>> atoms;  // (lambda, weight), sorted
  double a = 0.0;
  double b = 0.0;
  Side side = Side::right;
};

/// Left weight |u0|^2 / normsq or right weight |H(1)|^2 / normsq per eigenvalue.
SpectralMeasure spectral_measure(const DiracOperator& op, double a, double b, Side side);

/// zeta(z) = H(1, z)^t J u1.
std::complex<double> secular_at(const DiracOperator& op, std::complex<double> z);

struct TraceNorm {
  double trace;
  double hs_norm_sq;
};

/// Integral trace int u0^t R u1 and Hilbert-Schmidt norm squared of the
/// inverse. Throws std::domain_error("no trace for equal boundary directions").
TraceNorm trace_and_hsnorm(const DiracOperator& op);

/// Maps the path by the projective action of the real det-1 matrix Q and
/// both boundary vectors by Q.
DiracOperator conjugate(const DiracOperator& op, const Mat2& q);

/// Time reversal: t -> 1 - t, x -> -x, u0 <-> S u1 with S = diag(1, -1).
DiracOperator reverse(const DiracOperator& op);

}  // namespace sinepalm
