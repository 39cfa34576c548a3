#include "sinepalm/opuc.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sinepalm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_kind(const CoefficientSequence& seq, CoefficientKind kind, const char* op) {
  if (seq.kind() != kind) {
    std::ostringstream msg;
    msg << op << " requires "
        << (kind == CoefficientKind::verblunsky ? "verblunsky" : "modified")
        << " coefficients";
    throw std::invalid_argument(msg.str());
  }
}

// Monic coefficient vector (lowest degree first) of Phi_n.
std::vector<cplx> phi_n_coefficients(const std::vector<cplx>& alpha) {
  std::vector<cplx> p{1.0};
  for (cplx a : alpha) {
    const std::size_t deg = p.size() - 1;
    std::vector<cplx> next(deg + 2, 0.0);
    for (std::size_t j = 0; j <= deg; ++j) {
      next[j + 1] += p[j];
      // Phi*_k has coefficients conj(p[deg - j]) at z^j.
      next[j] -= std::conj(a) * std::conj(p[deg - j]);
    }
    p = std::move(next);
  }
  return p;
}

// Phi_n(z) and Phi_n'(z) by the recursion; stable on the unit circle.
std::pair<cplx, cplx> phi_n_with_derivative(const std::vector<cplx>& alpha, cplx z) {
  cplx phi = 1.0, star = 1.0, dphi = 0.0, dstar = 0.0;
  for (cplx a : alpha) {
    const cplx zphi = z * phi;
    const cplx dzphi = phi + z * dphi;
    const cplx nphi = zphi - std::conj(a) * star;
    const cplx nstar = -a * zphi + star;
    const cplx ndphi = dzphi - std::conj(a) * dstar;
    const cplx ndstar = -a * dzphi + dstar;
    phi = nphi;
    star = nstar;
    dphi = ndphi;
    dstar = ndstar;
  }
  return {phi, dphi};
}

}  // namespace

double wrap_angle(double theta) noexcept {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

CoefficientSequence::CoefficientSequence(CoefficientKind kind, std::vector<cplx> values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("coefficient sequence is empty");
  for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
    const double r = std::abs(values_[k]);
    if (!std::isfinite(r) || !(r < 1.0)) {
      std::ostringstream msg;
      msg << "coefficient " << k << " must lie strictly inside the unit disk (|c| = " << r
          << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  const double r = std::abs(values_.back());
  if (!(std::abs(r - 1.0) <= kTerminalTol)) {
    std::ostringstream msg;
    msg << "terminal coefficient must have unit modulus (|c| = " << r << ")";
    throw std::invalid_argument(msg.str());
  }
}

UnitCircleMeasure::UnitCircleMeasure(std::vector<double> angles, std::vector<double> weights) {
  if (angles.empty()) throw std::invalid_argument("measure has no atoms");
  if (angles.size() != weights.size())
    throw std::invalid_argument("measure angles and weights differ in length");
  std::vector<std::size_t> order(angles.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t j = 0; j < angles.size(); ++j) {
    if (!std::isfinite(angles[j])) throw std::invalid_argument("measure angle is not finite");
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]))
      throw std::invalid_argument("measure weights must be positive and finite");
    angles[j] = wrap_angle(angles[j]);
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return angles[i] < angles[j]; });
  angles_.reserve(order.size());
  weights_.reserve(order.size());
  for (std::size_t j : order) {
    angles_.push_back(angles[j]);
    weights_.push_back(weights[j]);
  }
  for (std::size_t j = 0; j < angles_.size(); ++j) {
    const double next = j + 1 < angles_.size() ? angles_[j + 1] : angles_[0] + kTwoPi;
    if (angles_.size() > 1 && next - angles_[j] <= kMinAtomSeparation) {
      std::ostringstream msg;
      msg << "duplicate atoms near angle " << angles_[j];
      throw std::invalid_argument(msg.str());
    }
  }
}

double UnitCircleMeasure::total_mass() const noexcept {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

bool UnitCircleMeasure::normalized() const noexcept {
  return std::abs(total_mass() - 1.0) <= 1e-12;
}

UnitCircleMeasure UnitCircleMeasure::normalize() const {
  const double total = total_mass();
  std::vector<double> w = weights_;
  for (double& x : w) x /= total;
  return UnitCircleMeasure(angles_, std::move(w));
}

SzegoValues szego_eval(const CoefficientSequence& alphas, cplx z) {
  require_kind(alphas, CoefficientKind::verblunsky, "szego_eval");
  SzegoValues out;
  out.phi.reserve(alphas.size() + 1);
  out.phi_star.reserve(alphas.size() + 1);
  cplx phi = 1.0, star = 1.0;
  out.phi.push_back(phi);
  out.phi_star.push_back(star);
  for (cplx a : alphas.values()) {
    const cplx zphi = z * phi;
    phi = zphi - std::conj(a) * star;
    star = -a * zphi + star;
    out.phi.push_back(phi);
    out.phi_star.push_back(star);
  }
  return out;
}

CoefficientSequence convert_coefficients(const CoefficientSequence& seq,
                                         CoefficientKind target) {
  if (seq.kind() == target) return seq;
  const auto& in = seq.values();
  const std::size_t n = in.size();
  std::vector<cplx> out(n);
  cplx phase = 1.0;  // prod_{j<k} (1 - conj(g_j)) / (1 - g_j)
  for (std::size_t k = 0; k < n; ++k) {
    cplx g;
    if (target == CoefficientKind::modified) {
      g = std::conj(in[k]) * phase;
      out[k] = g;
    } else {
      g = in[k];
      out[k] = std::conj(g * std::conj(phase));
    }
    if (k + 1 < n) {
      if (g == cplx(1.0)) throw std::domain_error("degenerate product");
      phase *= (1.0 - std::conj(g)) / (1.0 - g);
      phase /= std::abs(phase);
    }
  }
  return CoefficientSequence(target, std::move(out));
}

HyperbolicPath path_from_parameters(const std::vector<cplx>& gammas) {
  HyperbolicPath path;
  path.disk.reserve(gammas.size() + 1);
  path.halfplane.reserve(gammas.size() + 1);
  path.steps.reserve(gammas.size());
  cplx b = 0.0;
  double x = 0.0, y = 1.0;
  path.disk.push_back(b);
  path.halfplane.push_back(ExtPoint(cplx(x, y)));
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    const cplx g = gammas[k];
    const bool last = k + 1 == gammas.size();
    if (!last && !(std::abs(g) < 1.0))
      throw std::invalid_argument("only the last path parameter may lie on the boundary");
    const bool boundary = last && std::abs(g) > 1.0 - kBoundaryTol;
    if (g == cplx(1.0)) {
      path.steps.push_back({std::numeric_limits<double>::infinity(), -1.0});
      path.disk.push_back(1.0);
      path.halfplane.push_back(ExtPoint::infinity());
      break;
    }
    const cplx gg = g / (1.0 - g);
    PathStep step{-2.0 * gg.imag(), 2.0 * gg.real()};
    const cplx t = g * (1.0 - b) / (1.0 - std::conj(b));
    cplx nb = (b + t) / (1.0 + std::conj(b) * t);
    x += step.v * y;
    if (boundary) {
      step.w = -1.0;
      y = 0.0;
      nb /= std::abs(nb);
    } else {
      y *= (1.0 - std::norm(g)) / std::norm(1.0 - g);
    }
    b = nb;
    path.steps.push_back(step);
    path.disk.push_back(b);
    path.halfplane.push_back(ExtPoint(cplx(x, y)));
  }
  return path;
}

HyperbolicPath gamma_to_path(const CoefficientSequence& gammas) {
  require_kind(gammas, CoefficientKind::modified, "gamma_to_path");
  return path_from_parameters(gammas.values());
}

// Isometric Arnoldi on diag(nodes) started from the constant function. The
// basis vectors are the orthonormal polynomials on the nodes, and
// conj(alpha_k) = <z v_k, v_k^*> is read off as an inner product of unit
// vectors. The textbook ratio <z Phi_k, 1> / ||Phi_k||^2 cancels badly once
// the monic norms get small.
CoefficientSequence measure_to_alpha(const UnitCircleMeasure& input) {
  const UnitCircleMeasure mu = input.normalized() ? input : input.normalize();
  const std::size_t n = mu.size();
  const auto& theta = mu.angles();
  const auto& w = mu.weights();

  auto inner = [&](const std::vector<cplx>& f, const std::vector<cplx>& g) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w[j] * f[j] * std::conj(g[j]);
    return s;
  };
  auto fail = [](const std::string& what) { throw std::runtime_error("conditioning: " + what); };

  std::vector<std::vector<cplx>> basis{std::vector<cplx>(n, 1.0)};
  std::vector<cplx> alpha(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<cplx>& v = basis[k];
    std::vector<cplx> zv(n), star(n);
    for (std::size_t j = 0; j < n; ++j) {
      zv[j] = std::polar(1.0, theta[j]) * v[j];
      star[j] = std::polar(1.0, static_cast<double>(k) * theta[j]) * std::conj(v[j]);
    }
    alpha[k] = std::conj(inner(zv, star));
    if (k + 1 == n) break;

    if (!(std::abs(alpha[k]) < 1.0 - kBoundaryTol))
      fail("coefficient " + std::to_string(k) + " reached the unit circle");
    // classical Gram-Schmidt, applied twice
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (const std::vector<cplx>& b : basis) {
        const cplx c = inner(zv, b);
        for (std::size_t j = 0; j < n; ++j) zv[j] -= c * b[j];
      }
    }
    const double h2 = std::real(inner(zv, zv));
    const double expected = 1.0 - std::norm(alpha[k]);
    if (!(h2 > 0.0) || std::abs(h2 - expected) > 1e-6 * expected + 1e-12)
      fail("orthogonalization lost precision at degree " + std::to_string(k + 1) + " of " +
           std::to_string(n));
    const double h = std::sqrt(h2);
    for (cplx& x : zv) x /= h;
    basis.push_back(std::move(zv));
  }
  const double r = std::abs(alpha[n - 1]);
  if (std::abs(r - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "terminal coefficient has modulus " << r;
    fail(msg.str());
  }
  alpha[n - 1] /= r;
  return CoefficientSequence(CoefficientKind::verblunsky, std::move(alpha));
}

UnitCircleMeasure alpha_to_measure(const CoefficientSequence& alphas) {
  require_kind(alphas, CoefficientKind::verblunsky, "alpha_to_measure");
  const auto& a = alphas.values();
  const std::size_t n = a.size();
  const std::vector<cplx> p = phi_n_coefficients(a);

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < n; ++i) companion(i, n - 1) = -p[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("root finder failed: companion eigenvalues did not converge");

  double scale = 0.0;
  for (cplx c : p) scale += std::abs(c);

  std::vector<double> angles(n), weights(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx z = solver.eigenvalues()[static_cast<Eigen::Index>(j)];
    z /= std::abs(z);
    for (int it = 0; it < 8; ++it) {
      const auto [f, df] = phi_n_with_derivative(a, z);
      if (df == cplx(0.0)) break;
      const cplx step = f / df;
      z -= step;
      z /= std::abs(z);
      if (std::abs(step) < 1e-16) break;
    }
    const double residual = std::abs(phi_n_with_derivative(a, z).first);
    if (!(residual <= 1e-7 * scale)) {
      std::ostringstream msg;
      msg << "root finder failed to converge: residual " << residual << " at root " << j;
      throw std::runtime_error(msg.str());
    }
    angles[j] = std::arg(z);

    cplx phi = 1.0, star = 1.0;
    double norm = 1.0, sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sum += std::norm(phi) / norm;
      const cplx zphi = z * phi;
      phi = zphi - std::conj(a[k]) * star;
      star = -a[k] * zphi + star;
      norm *= 1.0 - std::norm(a[k]);
    }
    weights[j] = 1.0 / sum;
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& x : weights) x /= total;
  return UnitCircleMeasure(std::move(angles), std::move(weights));
}

HyperbolicPath reverse_path(const CoefficientSequence& gammas) {
  const HyperbolicPath path = gamma_to_path(gammas);
  const std::size_t n = gammas.size();
  const Mobius2x2 a = affine_matrix(DiskPoint(path.disk[n - 1]));
  HyperbolicPath out;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx b = mobius_apply(a, ExtPoint(path.disk[n - 1 - k])).value();
    out.disk.push_back(b);
    out.halfplane.push_back(inverse_cayley(b));
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const cplx z0 = out.halfplane[k].value();
    const cplx z1 = out.halfplane[k + 1].value();
    out.steps.push_back({(z1.real() - z0.real()) / z0.imag(),
                         (z1.imag() - z0.imag()) / z0.imag()});
  }
  return out;
}

CoefficientSequence aleksandrov_transform(const CoefficientSequence& seq, cplx eta) {
  if (std::abs(std::abs(eta) - 1.0) > 1e-10)
    throw std::invalid_argument("aleksandrov parameter must have unit modulus");
  const CoefficientSequence alpha = convert_coefficients(seq, CoefficientKind::verblunsky);
  std::vector<cplx> out = alpha.values();
  for (cplx& a : out) a *= eta;
  return convert_coefficients(CoefficientSequence(CoefficientKind::verblunsky, std::move(out)),
                              seq.kind());
}

}  // namespace sinepalm
