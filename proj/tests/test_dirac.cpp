#include <doctest.h>

#include <cmath>
#include <random>

#include "sinepalm/dirac.hpp"

using namespace sinepalm;

namespace {

DiracOperator random_operator(std::mt19937_64& g, std::size_t cells, std::optional<double> q) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CellPoint> path(cells);
  for (auto& p : path) p = {3.0 * u(g) - 1.5, std::exp(2.0 * u(g) - 1.0)};
  // uneven grid
  std::vector<double> grid{0.0};
  double acc = 0.0;
  std::vector<double> widths(cells);
  for (auto& w : widths) acc += (w = 0.5 + u(g));
  for (double w : widths) grid.push_back(grid.back() + w / acc);
  grid.back() = 1.0;
  const Vec2 u1 = q ? Vec2(-*q, -1.0) : Vec2(1.0, 0.0);
  return DiracOperator(grid, path, Vec2(1.0, 0.0), u1);
}

DiracOperator lattice_operator(double theta, std::size_t n) {
  std::vector<double> angles(n), weights(n, 1.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k)
    angles[k] = (theta + 2.0 * M_PI * static_cast<double>(k)) / static_cast<double>(n);
  return operator_from_measure(UnitCircleMeasure(angles, weights));
}

// Right-hand side of J H' = lambda R H.
Vec2 rhs(const Mat2& r, double lambda, const Vec2& h) { return -lambda * (symplectic_j() * (r * h)); }

struct Integrated {
  Vec2 h;
  double normsq;
};

Vec2 rk4_step(const Mat2& r, double lambda, const Vec2& h, double dt) {
  const Vec2 k1 = rhs(r, lambda, h);
  const Vec2 k2 = rhs(r, lambda, h + 0.5 * dt * k1);
  const Vec2 k3 = rhs(r, lambda, h + 0.5 * dt * k2);
  const Vec2 k4 = rhs(r, lambda, h + dt * k3);
  return h + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Classical RK4 on each cell plus composite Simpson for the integral of H^t R H.
Integrated rk4(const DiracOperator& op, double lambda, int steps_per_cell = 256) {
  Vec2 h = op.u0();
  double normsq = 0.0;
  for (std::size_t k = 0; k < op.cells(); ++k) {
    const Mat2 r = op.coefficient(k);
    const double dt = op.width(k) / steps_per_cell;
    for (int s = 0; s < steps_per_cell; ++s) {
      const Vec2 mid = rk4_step(r, lambda, h, 0.5 * dt);
      const Vec2 next = rk4_step(r, lambda, mid, 0.5 * dt);
      normsq += dt / 6.0 * (h.dot(r * h) + 4.0 * mid.dot(r * mid) + next.dot(r * next));
      h = next;
    }
  }
  return {h, normsq};
}

// Five-point stencil with a step proportional to the expected weight, which
// sets the scale on which the phase turns by about pi.
double fd_phase_derivative(const DiracOperator& op, double lam, double scale) {
  auto a = [&](double l) { return phase_at(op, l); };
  const double h = 1e-3 * std::min(1.0, scale);
  return (8.0 * (a(lam + h) - a(lam - h)) - (a(lam + 2 * h) - a(lam - 2 * h))) / (12.0 * h);
}

void check_same_measure(const SpectralMeasure& a, const SpectralMeasure& b, double tol) {
  REQUIRE(a.atoms.size() == b.atoms.size());
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    CHECK(std::abs(a.atoms[i].first - b.atoms[i].first) < tol);
    CHECK(std::abs(a.atoms[i].second - b.atoms[i].second) < tol * std::max(1.0, a.atoms[i].second));
  }
}

}  // namespace

TEST_CASE("construction and validation") {
  CHECK_THROWS_AS(DiracOperator({0.0, 1.0}, {{0.0, 0.0}}, Vec2(1, 0), Vec2(0, -1)), std::invalid_argument);
  CHECK_THROWS_AS(DiracOperator({0.0, 0.5}, {{0.0, 1.0}}, Vec2(1, 0), Vec2(0, -1)), std::invalid_argument);
  CHECK_THROWS_AS(DiracOperator({0.0, 0.6, 0.4, 1.0}, std::vector<CellPoint>(3), Vec2(1, 0), Vec2(0, -1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiracOperator({0.0, 1.0}, {{0.0, 1.0}}, Vec2(0, 0), Vec2(0, -1)), std::invalid_argument);

  const DiracOperator c = build_operator(std::vector<CellPoint>(1), BoundarySlope::finite(0.0));
  CHECK(c.u1() == Vec2(0.0, -1.0));
  CHECK(c.u0() == Vec2(1.0, 0.0));
  CHECK(c.origin() == Origin::custom);
  // det R = 1/4 and R = I/2 at z = i
  CHECK((c.coefficient(0) - 0.5 * Mat2::Identity()).norm() < 1e-15);
  std::mt19937_64 g(20);
  const DiracOperator r = random_operator(g, 6, 0.3);
  for (std::size_t k = 0; k < r.cells(); ++k) CHECK(r.coefficient(k).determinant() == doctest::Approx(0.25));
  CHECK(r.u0().dot(symplectic_j() * r.u1()) == doctest::Approx(1.0).epsilon(1e-14));

  // rescaling of the boundary vectors
  const DiracOperator s({0.0, 1.0}, {{0.2, 0.7}}, Vec2(3.0, 0.0), Vec2(-2.0, -4.0));
  CHECK(s.u0().norm() == doctest::Approx(1.0));
  CHECK(s.u0().dot(symplectic_j() * s.u1()) == doctest::Approx(1.0));
  const DiracOperator p({0.0, 1.0}, {{0.2, 0.7}}, Vec2(2.0, 0.0), Vec2(-5.0, 0.0));
  CHECK(p.boundary_parallel());
  CHECK(p.u1().norm() == doctest::Approx(1.0));
}

TEST_CASE("operator of a rotation-only measure") {
  const double theta = M_PI / 3.0;
  const DiracOperator op = lattice_operator(theta, 4);
  CHECK(op.origin() == Origin::discrete_measure);
  REQUIRE(op.cells() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK((op.coefficient(k) - 0.5 * Mat2::Identity()).norm() < 1e-14);

  for (double lam : {1.0, 7.0, -3.0}) {
    const EigenData d = eval_H(op, lam);
    CHECK(d.H1(0) == doctest::Approx(std::cos(lam / 2.0)).epsilon(1e-13));
    CHECK(d.H1(1) == doctest::Approx(-std::sin(lam / 2.0)).epsilon(1e-13));
    CHECK(phase_at(op, lam) == doctest::Approx(lam).epsilon(1e-12));
  }
  CHECK(phase_at(op, 0.0) == 0.0);
  CHECK(std::abs(secular_at(op, theta)) < 1e-13);
  CHECK(std::abs(secular_at(op, 0.0) - 1.0) < 1e-14);

  const std::vector<double> ev = eigenvalues_in(op, -10.0, 10.0);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == doctest::Approx(theta - 2.0 * M_PI).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(theta).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(theta + 2.0 * M_PI).epsilon(1e-12));
  for (Side side : {Side::left, Side::right})
    for (const auto& [lam, w] : spectral_measure(op, -10.0, 10.0, side).atoms) CHECK(w == doctest::Approx(2.0));
}

TEST_CASE("infinite terminal point puts zero in the spectrum") {
  const DiracOperator op = build_operator(gamma_to_path(CoefficientSequence(CoefficientKind::modified, {0.3, -0.2, 1.0})));
  CHECK(op.u1() == Vec2(1.0, 0.0));
  const std::vector<double> ev = eigenvalues_in(op, -1.0, 1.0);
  REQUIRE_FALSE(ev.empty());
  CHECK(std::abs(*std::min_element(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) < std::abs(b); })) < 1e-12);

  std::mt19937_64 g(21);
  for (int t = 0; t < 20; ++t) {
    const DiracOperator fin = random_operator(g, 5, 2.0 * t / 20.0 - 1.0);
    for (double lam : eigenvalues_in(fin, -0.5, 0.5)) CHECK(std::abs(lam) > 1e-6);
    const DiracOperator inf = random_operator(g, 5, std::nullopt);
    CHECK(std::abs(secular_at(inf, 0.0)) < 1e-15);
  }
}

TEST_CASE("transfer matrices match an RK4 oracle") {
  std::mt19937_64 g(22);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  for (int t = 0; t < 20; ++t) {
    const DiracOperator op = random_operator(g, 5, t % 3 == 0 ? std::nullopt : std::optional<double>(u(g) / 5.0));
    const double lam = u(g);
    const EigenData d = eval_H(op, lam);
    const Integrated ref = rk4(op, lam, 400);
    CHECK((d.H1 - ref.h).norm() < 1e-8 * std::max(1.0, ref.h.norm()));
    CHECK(d.normsq == doctest::Approx(ref.normsq).epsilon(1e-7));
    // H^t J dH equals the integral of H^t R H
    CHECK(d.H1.dot(symplectic_j() * d.dH1) == doctest::Approx(d.normsq).epsilon(1e-10));
    // derivative against central differences of the RK4 solution
    const double h = 1e-4;
    const Vec2 fd = (rk4(op, lam + h, 400).h - rk4(op, lam - h, 400).h) / (2.0 * h);
    CHECK((d.dH1 - fd).norm() < 1e-6 * std::max(1.0, fd.norm()));
  }
  const DiracOperator op = random_operator(g, 4, 0.5);
  const EigenData zero = eval_H(op, 0.0);
  CHECK(zero.H1 == op.u0());
}

TEST_CASE("phase is increasing and weights agree") {
  std::mt19937_64 g(23);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int t = 0; t < 25; ++t) {
    const DiracOperator op = random_operator(g, 3 + t % 8, t % 4 == 0 ? std::nullopt : std::optional<double>(u(g) / 7.0));
    double last = phase_at(op, -20.0);
    for (int i = 1; i <= 400; ++i) {
      const double a = phase_at(op, -20.0 + 0.1 * i);
      CHECK(a > last);
      last = a;
    }
    for (const auto& [lam, w] : spectral_measure(op, -20.0, 20.0, Side::right).atoms) {
      const EigenData d = eval_H(op, lam);
      const double ab = d.H1.squaredNorm() / (d.dH1(0) * d.H1(1) - d.H1(0) * d.dH1(1));
      CHECK(w == doctest::Approx(ab).epsilon(1e-10));
      CHECK(w == doctest::Approx(2.0 / fd_phase_derivative(op, lam, w)).epsilon(1e-8));
      CHECK(std::abs(secular_at(op, lam)) < 1e-8 * std::max(1.0, d.H1.norm()));
    }
    for (const auto& [lam, w] : spectral_measure(op, -20.0, 20.0, Side::left).atoms) CHECK(w > 0.0);
  }
}

TEST_CASE("eigenvalues of discrete-measure operators") {
  std::mt19937_64 g(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 5;
    std::vector<double> angles(n), weights(n);
    for (std::size_t j = 0; j < n; ++j) {
      angles[j] = (2.0 * M_PI * (j + 0.2 + 0.6 * u(g))) / static_cast<double>(n);
      weights[j] = 0.2 + u(g);
    }
    const UnitCircleMeasure mu = UnitCircleMeasure(angles, weights).normalize();
    const DiracOperator op = operator_from_measure(mu);
    const double nn = static_cast<double>(n);
    const double a = -1.0;
    const std::vector<double> first = eigenvalues_in(op, a, a + 2.0 * M_PI * nn);
    const std::vector<double> second = eigenvalues_in(op, a + 2.0 * M_PI * nn, a + 4.0 * M_PI * nn);
    REQUIRE(first.size() == n);
    REQUIRE(second.size() == n);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(second[j] - first[j] - 2.0 * M_PI * nn) < 1e-9);
    const SpectralMeasure left = spectral_measure(op, a, a + 2.0 * M_PI * nn, Side::left);
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = wrap_angle(left.atoms[j].first / nn);
      std::size_t best = 0;
      for (std::size_t k = 1; k < n; ++k)
        if (std::abs(mu.angles()[k] - ang) < std::abs(mu.angles()[best] - ang)) best = k;
      CHECK(std::abs(mu.angles()[best] - ang) < 1e-10);
      CHECK(left.atoms[j].second == doctest::Approx(2.0 * nn * mu.weights()[best]).epsilon(1e-8));
    }
  }
}

TEST_CASE("window handling") {
  const DiracOperator op = lattice_operator(1.0, 2);
  // half-open: the right endpoint is excluded
  CHECK(eigenvalues_in(op, 1.0, 2.0).size() == 1);
  CHECK(eigenvalues_in(op, 0.0, 1.0).empty());
  CHECK_THROWS_AS(eigenvalues_in(op, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(eigenvalues_in(op, -1e8, 1e8), doctest::Contains("window budget"), std::runtime_error);
}

TEST_CASE("secular function") {
  std::mt19937_64 g(25);
  for (int t = 0; t < 20; ++t) {
    const DiracOperator op = random_operator(g, 6, 0.4 * t - 4.0);
    CHECK(std::abs(secular_at(op, 0.0) - 1.0) < 1e-14);
    const cplx z{0.3 * t - 2.0, 0.7};
    CHECK(std::abs(secular_at(op, std::conj(z)) - std::conj(secular_at(op, z))) < 1e-10 * std::abs(secular_at(op, z)));
    CHECK(std::abs(secular_at(op, 1.7).imag()) == 0.0);
  }
}

TEST_CASE("trace and Hilbert-Schmidt norm") {
  for (double q : {0.0, 1.5, -4.0}) {
    for (std::size_t cells : {1, 3, 10}) {
      const TraceNorm tn = trace_and_hsnorm(build_operator(std::vector<CellPoint>(cells), BoundarySlope::finite(q)));
      CHECK(tn.trace == doctest::Approx(-q / 2.0).epsilon(1e-12));
      CHECK(tn.hs_norm_sq == doctest::Approx((1.0 + q * q) / 4.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_WITH_AS(trace_and_hsnorm(build_operator(std::vector<CellPoint>(2), BoundarySlope::infinity())),
                       "no trace for equal boundary directions", std::domain_error);

  SUBCASE("splitting cells leaves the values unchanged") {
    std::mt19937_64 g(26);
    const DiracOperator op = random_operator(g, 4, 0.8);
    std::vector<double> grid{0.0};
    std::vector<CellPoint> path;
    for (std::size_t k = 0; k < op.cells(); ++k) {
      for (int s = 1; s <= 3; ++s) {
        grid.push_back(op.grid()[k] + op.width(k) * s / 3.0);
        path.push_back(op.path()[k]);
      }
    }
    grid.back() = 1.0;
    const TraceNorm a = trace_and_hsnorm(op);
    const TraceNorm b = trace_and_hsnorm(DiracOperator(grid, path, op.u0(), op.u1()));
    CHECK(a.trace == doctest::Approx(b.trace).epsilon(1e-12));
    CHECK(a.hs_norm_sq == doctest::Approx(b.hs_norm_sq).epsilon(1e-12));
  }

  SUBCASE("spectral sums reproduce both values") {
    // The inverse has eigenvalues 1/lambda; its HS norm is sum 1/lambda^2 and
    // its trace the symmetric sum of 1/lambda. The density of eigenvalues is
    // 1/(2 pi), which gives the tail correction for the HS sum.
    std::mt19937_64 g(27);
    for (int t = 0; t < 4; ++t) {
      const DiracOperator op = random_operator(g, 5, 0.7 * t - 1.0);
      const double cut = 3000.0;
      double hs = 0.0, tr = 0.0;
      for (double lam : eigenvalues_in(op, -cut, cut)) {
        hs += 1.0 / (lam * lam);
        tr += 1.0 / lam;
      }
      hs += 2.0 / (2.0 * M_PI * cut);
      const TraceNorm tn = trace_and_hsnorm(op);
      CHECK(tn.hs_norm_sq == doctest::Approx(hs).epsilon(1e-4));
      CHECK(std::abs(tn.trace - tr) < 2e-3);
    }
  }
}

TEST_CASE("conjugation and reversal") {
  std::mt19937_64 g(28);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const DiracOperator op = random_operator(g, 6, 0.4);
  CHECK(conjugate(op, Mat2::Identity()) == op);
  Mat2 bad;
  bad << 2.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(conjugate(op, bad), std::invalid_argument);

  for (int t = 0; t < 15; ++t) {
    const DiracOperator a = random_operator(g, 3 + t % 6, t % 5 == 0 ? std::nullopt : std::optional<double>(u(g)));
    Mat2 q;
    const double r = u(g);
    q << r, 1.0, -1.0, r;
    q /= std::sqrt(1.0 + r * r);
    const DiracOperator b = conjugate(a, q);
    for (Side side : {Side::left, Side::right})
      check_same_measure(spectral_measure(a, -15.0, 15.0, side), spectral_measure(b, -15.0, 15.0, side), 1e-8);

    // a general real det-1 matrix still preserves the spectrum
    Mat2 m;
    const double x = u(g), y = u(g), z = u(g);
    m << x, y, z, (1.0 + y * z) / x;
    const std::vector<double> e1 = eigenvalues_in(a, -15.0, 15.0), e2 = eigenvalues_in(conjugate(a, m), -15.0, 15.0);
    REQUIRE(e1.size() == e2.size());
    for (std::size_t i = 0; i < e1.size(); ++i) CHECK(std::abs(e1[i] - e2[i]) < 1e-8);

    const DiracOperator rev = reverse(a);
    check_same_measure(spectral_measure(a, -15.0, 15.0, Side::left), spectral_measure(rev, -15.0, 15.0, Side::right), 1e-8);
    check_same_measure(spectral_measure(a, -15.0, 15.0, Side::right), spectral_measure(rev, -15.0, 15.0, Side::left), 1e-8);
    const DiracOperator twice = reverse(rev);
    for (std::size_t k = 0; k < a.cells(); ++k) {
      CHECK(twice.path()[k].x == doctest::Approx(a.path()[k].x).epsilon(1e-14));
      CHECK(twice.path()[k].y == doctest::Approx(a.path()[k].y).epsilon(1e-14));
    }
    CHECK((twice.u0() - a.u0()).norm() < 1e-14);
    CHECK((twice.u1() - a.u1()).norm() < 1e-14);
  }
}
