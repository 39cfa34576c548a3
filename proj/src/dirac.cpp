#include "sinepalm/dirac.hpp"

#include <array>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sinepalm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxRoots = 1'000'000;

double cross(const Vec2& a, const Vec2& b) { return a(0) * b(1) - a(1) * b(0); }

// Signed angle from a to b in (-pi, pi].
double turn(const Vec2& a, const Vec2& b) { return std::atan2(cross(a, b), a.dot(b)); }

std::size_t resolve_upto(const DiracOperator& op, std::optional<std::size_t> upto) {
  const std::size_t m = op.cells();
  if (!upto) return m;
  if (*upto > m) throw std::out_of_range("grid index beyond the last grid point");
  return *upto;
}

// Applies X = [[1,-x],[0,y]], its inverse, and the clockwise rotation by phi
// to a 2-vector over any scalar field.
template <typename T>
struct Cell {
  double x, y;
  T c, s;

  std::array<T, 2> apply(const std::array<T, 2>& v) const {
    const T g0 = v[0] - x * v[1];
    const T g1 = y * v[1];
    const T r0 = c * g0 + s * g1;
    const T r1 = -s * g0 + c * g1;
    return {r0 + x * r1 / y, r1 / y};
  }
  // (d/dphi Rot) conjugated by X.
  std::array<T, 2> apply_derivative(const std::array<T, 2>& v) const {
    const T g0 = v[0] - x * v[1];
    const T g1 = y * v[1];
    const T r0 = -s * g0 + c * g1;
    const T r1 = -c * g0 - s * g1;
    return {r0 + x * r1 / y, r1 / y};
  }
};

}  // namespace

Mat2 symplectic_j() {
  Mat2 j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

std::string to_string(Origin o) {
  switch (o) {
    case Origin::discrete_measure:
      return "discrete-measure";
    case Origin::sine_beta:
      return "sine-beta";
    case Origin::custom:
      return "custom";
  }
  return "custom";
}

Origin origin_from_string(const std::string& s) {
  if (s == "discrete-measure") return Origin::discrete_measure;
  if (s == "sine-beta") return Origin::sine_beta;
  if (s == "custom") return Origin::custom;
  throw std::invalid_argument("unknown operator origin '" + s + "'");
}

std::string to_string(Side s) { return s == Side::left ? "left" : "right"; }

Side side_from_string(const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw std::invalid_argument("side must be 'left' or 'right', got '" + s + "'");
}

Vec2 BoundarySlope::vector() const {
  if (!q) return Vec2(1.0, 0.0);
  return Vec2(-*q, -1.0);
}

bool boundary_vectors_normalized(const Vec2& u0, const Vec2& u1) {
  const double n1 = u1.norm();
  const double pairing = u0.dot(symplectic_j() * u1);
  const bool parallel = std::abs(pairing) <= 1e-14 * n1;
  return std::abs(u0.norm() - 1.0) <= 1e-12 &&
         (parallel ? std::abs(n1 - 1.0) <= 1e-12 : std::abs(pairing - 1.0) <= 1e-12);
}

DiracOperator::DiracOperator(std::vector<double> grid, std::vector<CellPoint> path, Vec2 u0,
                             Vec2 u1, Origin origin, bool rescale)
    : grid_(std::move(grid)), path_(std::move(path)), u0_(u0), u1_(u1), origin_(origin) {
  if (path_.empty()) throw std::invalid_argument("operator needs at least one cell");
  if (grid_.size() != path_.size() + 1)
    throw std::invalid_argument("grid must have one more point than the path has cells");
  if (grid_.front() != 0.0 || grid_.back() != 1.0)
    throw std::invalid_argument("grid must start at 0 and end at 1");
  for (std::size_t k = 0; k + 1 < grid_.size(); ++k)
    if (!(grid_[k] < grid_[k + 1]))
      throw std::invalid_argument("grid must be strictly increasing");
  for (std::size_t k = 0; k < path_.size(); ++k) {
    if (!std::isfinite(path_[k].x) || !(path_[k].y > 0.0) || !std::isfinite(path_[k].y)) {
      std::ostringstream msg;
      msg << "path cell " << k << " needs finite x and y > 0 (y = " << path_[k].y << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  const double n0 = u0_.norm();
  const double n1 = u1_.norm();
  if (!(n0 > 0.0) || !(n1 > 0.0) || !std::isfinite(n0) || !std::isfinite(n1))
    throw std::invalid_argument("boundary vectors must be finite and nonzero");
  if (!rescale) {
    if (!boundary_vectors_normalized(u0_, u1_))
      throw std::invalid_argument("boundary vectors are not normalized");
    parallel_ = std::abs(u0_.dot(symplectic_j() * u1_)) <= 1e-14 * n1;
    return;
  }
  u0_ /= n0;
  const double pairing = u0_.dot(symplectic_j() * u1_);
  parallel_ = std::abs(pairing) <= 1e-14 * n1;
  if (parallel_) {
    u1_ /= n1;
  } else {
    u1_ /= pairing;
  }
}

Mat2 DiracOperator::coefficient(std::size_t k) const {
  const CellPoint& p = path_.at(k);
  Mat2 r;
  r << 1.0, -p.x, -p.x, p.x * p.x + p.y * p.y;
  return r / (2.0 * p.y);
}

bool operator==(const DiracOperator& a, const DiracOperator& b) {
  if (a.grid_ != b.grid_ || a.origin_ != b.origin_ || a.path_.size() != b.path_.size())
    return false;
  for (std::size_t k = 0; k < a.path_.size(); ++k)
    if (a.path_[k].x != b.path_[k].x || a.path_[k].y != b.path_[k].y) return false;
  return a.u0_ == b.u0_ && a.u1_ == b.u1_;
}

namespace {

std::vector<double> uniform_grid(std::size_t m) {
  std::vector<double> grid(m + 1);
  for (std::size_t k = 0; k <= m; ++k) grid[k] = static_cast<double>(k) / static_cast<double>(m);
  grid[m] = 1.0;
  return grid;
}

}  // namespace

DiracOperator build_operator(const HyperbolicPath& path) {
  if (path.size() < 2) throw std::invalid_argument("path needs at least two points");
  const std::size_t n = path.size() - 1;
  std::vector<CellPoint> cells(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (path.halfplane[k].is_infinite())
      throw std::invalid_argument("interior path point at infinity");
    const cplx z = path.halfplane[k].value();
    cells[k] = {z.real(), z.imag()};
  }
  const ExtPoint& end = path.halfplane[n];
  const BoundarySlope slope =
      end.is_infinite() ? BoundarySlope::infinity() : BoundarySlope::finite(end.value().real());
  return DiracOperator(uniform_grid(n), std::move(cells), Vec2(1.0, 0.0), slope.vector(),
                       Origin::discrete_measure);
}

DiracOperator build_operator(const std::vector<CellPoint>& cells, BoundarySlope u1) {
  return DiracOperator(uniform_grid(cells.size()), cells, Vec2(1.0, 0.0), u1.vector(),
                       Origin::custom);
}

DiracOperator operator_from_measure(const UnitCircleMeasure& mu) {
  const CoefficientSequence gammas =
      convert_coefficients(measure_to_alpha(mu), CoefficientKind::modified);
  return build_operator(gamma_to_path(gammas));
}

EigenData eval_H(const DiracOperator& op, double lambda, std::optional<std::size_t> upto) {
  const std::size_t m = resolve_upto(op, upto);
  std::array<double, 2> h{op.u0()(0), op.u0()(1)};
  std::array<double, 2> dh{0.0, 0.0};
  // H^t R H = |X H|^2 / (2y) is constant on a cell because the cell flow
  // rotates X H. Summing these positive terms avoids the cancellation in
  // A'B - AB' when some y is tiny.
  double normsq = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double half = 0.5 * op.width(k);
    const double gx = h[0] - op.path()[k].x * h[1];
    const double gy = op.path()[k].y * h[1];
    normsq += op.width(k) * (gx * gx + gy * gy) / (2.0 * op.path()[k].y);
    const double phi = lambda * half;
    const Cell<double> cell{op.path()[k].x, op.path()[k].y, std::cos(phi), std::sin(phi)};
    const auto mh = cell.apply(h);
    const auto mdh = cell.apply(dh);
    const auto dmh = cell.apply_derivative(h);
    dh = {mdh[0] + half * dmh[0], mdh[1] + half * dmh[1]};
    h = mh;
  }
  EigenData out;
  out.H1 = Vec2(h[0], h[1]);
  out.dH1 = Vec2(dh[0], dh[1]);
  out.normsq = normsq;
  return out;
}

double phase_at(const DiracOperator& op, double lambda, std::optional<std::size_t> upto) {
  const std::size_t m = resolve_upto(op, upto);
  if (lambda == 0.0) return 0.0;
  // Prufer angle of H lifted cell by cell. X and X^{-1} have positive
  // eigenvalues, so each turns a vector by strictly less than pi.
  Vec2 h = op.u0();
  double theta = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double x = op.path()[k].x;
    const double y = op.path()[k].y;
    const double phi = 0.5 * lambda * op.width(k);
    Vec2 g(h(0) - x * h(1), y * h(1));
    theta += turn(h, g);
    const double c = std::cos(phi), s = std::sin(phi);
    const Vec2 r(c * g(0) + s * g(1), -s * g(0) + c * g(1));
    theta -= phi;
    Vec2 next(r(0) + x * r(1) / y, r(1) / y);
    theta += turn(r, next);
    h = next / next.norm();
  }
  return -2.0 * theta;
}

double eigen_phase_offset(const DiracOperator& op) {
  const double a0 = std::atan2(op.u0()(1), op.u0()(0));
  const double a1 = std::atan2(op.u1()(1), op.u1()(0));
  const double u = -2.0 * (a1 - a0);
  // Reduce to [0, 2pi) so that offsets are canonical.
  double r = std::fmod(u, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

std::vector<double> eigenvalues_in(const DiracOperator& op, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("eigenvalue window requires a < b");
  const double u = eigen_phase_offset(op);
  const double pa = phase_at(op, a);
  const double pb = phase_at(op, b);
  const double kmin = std::ceil((pa - u) / kTwoPi);
  const double kmax = std::ceil((pb - u) / kTwoPi) - 1.0;
  if (kmax < kmin) return {};
  if (kmax - kmin + 1.0 > static_cast<double>(kMaxRoots)) {
    std::ostringstream msg;
    msg << "window budget exceeded: [" << a << ", " << b << ") holds about "
        << (kmax - kmin + 1.0) << " eigenvalues";
    throw std::runtime_error(msg.str());
  }
  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(kmax - kmin + 1.0));
  double lo = a;
  double phase_lo = pa;
  for (double k = kmin; k <= kmax; k += 1.0) {
    const double target = u + kTwoPi * k;
    const double flo = phase_lo - target;
    const double fhi = pb - target;
    double root;
    if (flo >= 0.0) {
      root = lo;
    } else {
      auto f = [&](double lam) { return phase_at(op, lam) - target; };
      auto tol = [](double l, double h) {
        return h - l <= std::max(1e-11, 4.0 * std::numeric_limits<double>::epsilon() *
                                            std::max(std::abs(l), std::abs(h)));
      };
      std::uintmax_t iters = 200;
      const auto [l, h] = boost::math::tools::toms748_solve(f, lo, b, flo, fhi, tol, iters);
      root = 0.5 * (l + h);
    }
    roots.push_back(root);
    lo = root;
    phase_lo = target;
  }
  return roots;
}

SpectralMeasure spectral_measure(const DiracOperator& op, double a, double b, Side side) {
  SpectralMeasure out;
  out.a = a;
  out.b = b;
  out.side = side;
  for (double lam : eigenvalues_in(op, a, b)) {
    const EigenData d = eval_H(op, lam);
    const double top = side == Side::left ? op.u0().squaredNorm() : d.H1.squaredNorm();
    out.atoms.emplace_back(lam, top / d.normsq);
  }
  return out;
}

std::complex<double> secular_at(const DiracOperator& op, std::complex<double> z) {
  using C = std::complex<double>;
  std::array<C, 2> h{op.u0()(0), op.u0()(1)};
  for (std::size_t k = 0; k < op.cells(); ++k) {
    const C phi = z * (0.5 * op.width(k));
    const Cell<C> cell{op.path()[k].x, op.path()[k].y, std::cos(phi), std::sin(phi)};
    h = cell.apply(h);
  }
  // H^t J u1 with J u1 = (-u1_y, u1_x).
  return -h[0] * op.u1()(1) + h[1] * op.u1()(0);
}

TraceNorm trace_and_hsnorm(const DiracOperator& op) {
  if (op.boundary_parallel())
    throw std::domain_error("no trace for equal boundary directions");
  double trace = 0.0, prefix_a = 0.0, hs = 0.0;
  for (std::size_t k = 0; k < op.cells(); ++k) {
    const Mat2 r = op.coefficient(k) * op.width(k);
    const double ak = op.u0().dot(r * op.u0());
    const double ck = op.u1().dot(r * op.u1());
    trace += op.u0().dot(r * op.u1());
    hs += 2.0 * prefix_a * ck + ak * ck;
    prefix_a += ak;
  }
  return {trace, hs};
}

DiracOperator conjugate(const DiracOperator& op, const Mat2& q) {
  if (std::abs(q.determinant() - 1.0) > 1e-12)
    throw std::invalid_argument("conjugation matrix must have determinant 1");
  const Mobius2x2 m{q(0, 0), q(0, 1), q(1, 0), q(1, 1)};
  std::vector<CellPoint> cells;
  cells.reserve(op.cells());
  for (const CellPoint& p : op.path()) {
    const ExtPoint w = mobius_apply(m, ExtPoint(cplx(p.x, p.y)));
    const cplx v = w.value();
    cells.push_back({v.real(), v.imag()});
  }
  return DiracOperator(op.grid(), std::move(cells), q * op.u0(), q * op.u1(), op.origin());
}

DiracOperator reverse(const DiracOperator& op) {
  const std::size_t m = op.cells();
  std::vector<double> grid(m + 1);
  std::vector<CellPoint> cells(m);
  for (std::size_t k = 0; k <= m; ++k) grid[k] = 1.0 - op.grid()[m - k];
  grid[0] = 0.0;
  grid[m] = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    const CellPoint& p = op.path()[m - 1 - k];
    cells[k] = {-p.x, p.y};
  }
  const Vec2 s0(op.u1()(0), -op.u1()(1));
  const Vec2 s1(op.u0()(0), -op.u0()(1));
  return DiracOperator(std::move(grid), std::move(cells), s0, s1, op.origin());
}

}  // namespace sinepalm
