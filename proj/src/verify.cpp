#include "sinepalm/verify.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "sinepalm/dirac.hpp"
#include "sinepalm/ensembles.hpp"
#include "sinepalm/opuc.hpp"
#include "sinepalm/parallel.hpp"

namespace sinepalm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// Independent master seeds per criterion and purpose.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Collects error/tolerance ratios; the criterion passes when the worst ratio
// stays below 1.
class Tally {
 public:
  void check(const std::string& what, double error, double tolerance) {
    const double ratio = std::isfinite(error) ? error / tolerance : 1e300;
    if (ratio > worst_) {
      worst_ = ratio;
      worst_label_ = what;
      worst_error_ = error;
    }
  }
  void fail(const std::string& what) { check(what, std::numeric_limits<double>::infinity(), 1.0); }
  void note(const std::string& text) {
    if (!notes_.empty()) notes_ += "; ";
    notes_ += text;
  }
  TestReport report(const std::string& name, std::size_t samples) const {
    std::ostringstream msg;
    msg << "worst: " << (worst_label_.empty() ? "none" : worst_label_) << " (" << worst_error_ << ")";
    if (!notes_.empty()) msg << "; " << notes_;
    return make_report(name, worst_, 1.0, samples, msg.str());
  }

 private:
  double worst_ = 0.0;
  double worst_error_ = 0.0;
  std::string worst_label_;
  std::string notes_;
};

double circular_gap(double a, double b) {
  const double d = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

// Atoms closer than this are not resolved by the measure-to-coefficient map.
constexpr double kMinGap = 1e-4;

// Rounding x to a double perturbs the operator by about eps |x| / y, so a
// path cell with y << |x| cannot be represented faithfully.
double path_resolution(const DiracOperator& op) {
  double worst = 0.0;
  for (const CellPoint& p : op.path())
    worst = std::max(worst, std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(p.x)) / p.y);
  return worst;
}

// Uniform angles and Dirichlet(1, ..., 1) weights.
UnitCircleMeasure random_measure(std::size_t n, Rng& rng) {
  for (;;) {
    std::vector<double> angles(n), weights(n);
    for (std::size_t j = 0; j < n; ++j) {
      angles[j] = kTwoPi * rng.uniform();
      weights[j] = -std::log(rng.uniform_open_low());
    }
    std::vector<double> sorted = angles;
    std::sort(sorted.begin(), sorted.end());
    double gap = kTwoPi;
    for (std::size_t j = 0; j < n; ++j)
      gap = std::min(gap, j + 1 < n ? sorted[j + 1] - sorted[j] : sorted[0] + kTwoPi - sorted[j]);
    if (n == 1 || gap > kMinGap) return UnitCircleMeasure(angles, weights).normalize();
  }
}

DiracOperator random_operator(Rng& rng) {
  const std::size_t m = 3 + static_cast<std::size_t>(rng.uniform() * 10.0);
  std::vector<CellPoint> cells(m);
  for (auto& c : cells) c = {3.0 * rng.uniform() - 1.5, std::exp(2.0 * rng.uniform() - 1.0)};
  const bool infinite = rng.uniform() < 0.2;
  const double q = 6.0 * rng.uniform() - 3.0;
  return build_operator(cells, infinite ? BoundarySlope::infinity() : BoundarySlope::finite(q));
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// 1. Uniform measure on the n-th roots of e^{i theta}.
TestReport lattice_reproduction() {
  Tally t;
  std::size_t cases = 0;
  for (std::size_t n : {2, 4, 8}) {
    for (double theta : {kPi / 3.0, 1.0}) {
      ++cases;
      std::vector<double> angles(n), weights(n, 1.0 / static_cast<double>(n));
      for (std::size_t k = 0; k < n; ++k)
        angles[k] = (theta + kTwoPi * static_cast<double>(k)) / static_cast<double>(n);
      const DiracOperator op = operator_from_measure(UnitCircleMeasure(angles, weights));
      const std::string tag = "n=" + std::to_string(n) + " theta=" + fmt(theta);
      for (Side side : {Side::left, Side::right}) {
        const SpectralMeasure s = spectral_measure(op, -10.0, 10.0, side);
        std::vector<double> expect;
        for (int k = -2; k <= 2; ++k) {
          const double lam = theta + kTwoPi * k;
          if (lam >= -10.0 && lam < 10.0) expect.push_back(lam);
        }
        if (s.atoms.size() != expect.size()) {
          t.fail(tag + " eigenvalue count");
          continue;
        }
        for (std::size_t i = 0; i < expect.size(); ++i) {
          t.check(tag + " eigenvalue", std::abs(s.atoms[i].first - expect[i]), 1e-10);
          t.check(tag + " " + to_string(side) + " weight", std::abs(s.atoms[i].second - 2.0), 1e-9);
        }
      }
    }
  }
  t.note("eigenvalues 2 pi k + theta to 1e-10, weights 2 to 1e-9");
  return t.report("criterion 1: rotated lattice spectrum", cases);
}

// 2. Left weights of the discrete operator are 2n times the atom masses.
TestReport spectral_lift(std::uint64_t seed) {
  Tally t;
  Rng rng({derive_seed(seed, 20), 0});
  constexpr std::size_t kCount = 100;
  // Measured weight errors run about 1e3 times this bound.
  constexpr double kResolution = 1e-13;
  std::size_t rejected = 0;
  for (std::size_t c = 0; c < kCount; ++c) {
    const std::size_t n = 1 + c % 8;
    std::optional<UnitCircleMeasure> mu;
    std::optional<DiracOperator> op;
    while (!op) {
      mu = random_measure(n, rng);
      try {
        op = operator_from_measure(*mu);
      } catch (const std::runtime_error&) {
        // ill-conditioned coefficient extraction
      }
      if (op && path_resolution(*op) > kResolution) op.reset();
      if (!op) ++rejected;
    }
    const double shift = 0.5;  // window [-0.5, 2 pi n - 0.5) holds each lifted atom once
    const double nn = static_cast<double>(n);
    const SpectralMeasure s = spectral_measure(*op, -shift, kTwoPi * nn - shift, Side::left);
    if (s.atoms.size() != n) {
      t.fail("eigenvalue count for n=" + std::to_string(n));
      continue;
    }
    for (const auto& [lam, w] : s.atoms) {
      std::size_t best = 0;
      double gap = kTwoPi;
      for (std::size_t j = 0; j < n; ++j) {
        const double g = circular_gap(lam / nn, mu->angles()[j]);
        if (g < gap) {
          gap = g;
          best = j;
        }
      }
      t.check("eigenvalue position", nn * gap, 1e-8);
      const double expect = 2.0 * nn * mu->weights()[best];
      t.check("relative left weight", std::abs(w - expect) / expect, 1e-8);
    }
  }
  t.note(std::to_string(rejected) + " draws redrawn because double precision cannot resolve their path (eps |x| / y > 1e-13 or coefficient extraction refused)");
  return t.report("criterion 2: spectral lift", kCount);
}

// 3. measure -> alpha -> measure and alpha -> gamma -> alpha.
TestReport roundtrip(std::uint64_t seed) {
  Tally t;
  Rng rng({derive_seed(seed, 30), 0});
  constexpr std::size_t kMeasures = 120;
  for (std::size_t c = 0; c < kMeasures; ++c) {
    const std::size_t n = 1 + c % 12;
    const UnitCircleMeasure mu = random_measure(n, rng);
    const UnitCircleMeasure back = alpha_to_measure(measure_to_alpha(mu));
    if (back.size() != n) {
      t.fail("atom count");
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      t.check("atom angle", circular_gap(back.angles()[j], mu.angles()[j]), 1e-9);
      t.check("atom weight", std::abs(back.weights()[j] - mu.weights()[j]), 1e-9);
    }
  }
  constexpr std::size_t kSequences = 1000;
  for (std::size_t c = 0; c < kSequences; ++c) {
    const std::size_t n = 1 + c % 16;
    std::vector<cplx> a(n);
    for (std::size_t k = 0; k + 1 < n; ++k)
      a[k] = std::polar(std::sqrt(rng.uniform()), kTwoPi * rng.uniform());
    a[n - 1] = std::polar(1.0, kTwoPi * rng.uniform());
    const CoefficientSequence alpha(CoefficientKind::verblunsky, a);
    const CoefficientSequence back = convert_coefficients(
        convert_coefficients(alpha, CoefficientKind::modified), CoefficientKind::verblunsky);
    for (std::size_t k = 0; k < n; ++k) t.check("alpha/gamma roundtrip", std::abs(back[k] - a[k]), 1e-12);
  }
  t.note("measures n <= 12 to 1e-9, coefficients to 1e-12");
  return t.report("criterion 3: roundtrip", kMeasures + kSequences);
}

// 4. Right weight from (A, B) against 2 / phase derivative. Near some
// eigenvalues the phase derivative changes on a scale far below the weight,
// so no fixed step works everywhere. The five-point stencil is evaluated on
// steps shrinking by 4 from about 1e-2 min(1, w); the estimate whose change
// from the previous step is smallest wins, and the search stops once rounding
// makes successive changes grow again. Steps are powers of two so that
// lam +- h and lam +- 2h are exact doubles.
double phase_derivative(const DiracOperator& op, double lam, double scale) {
  auto alpha = [&op](double l) { return phase_at(op, l); };
  auto stencil = [&](double h) {
    return (8.0 * (alpha(lam + h) - alpha(lam - h)) - (alpha(lam + 2 * h) - alpha(lam - 2 * h))) / (12.0 * h);
  };
  double h = std::exp2(std::floor(std::log2(1e-2 * std::min(1.0, scale))));
  double prev = stencil(h);
  double best = prev;
  double best_change = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 12; ++i) {
    h /= 4.0;
    const double cur = stencil(h);
    const double change = std::abs(cur - prev);
    if (change < best_change) {
      best_change = change;
      best = cur;
    } else if (change > 4.0 * best_change) {
      break;
    }
    prev = cur;
  }
  return best;
}

TestReport weight_duality(std::uint64_t seed) {
  Tally t;
  Rng rng({derive_seed(seed, 40), 0});
  std::size_t atoms = 0;
  double worst_relative = 0.0, largest = 0.0;
  for (int c = 0; c < 30; ++c) {
    const DiracOperator op = random_operator(rng);
    for (double lam : eigenvalues_in(op, -20.0, 20.0)) {
      const EigenData d = eval_H(op, lam);
      const double cross = d.dH1(0) * d.H1(1) - d.H1(0) * d.dH1(1);
      const double w_ab = d.H1.squaredNorm() / cross;
      const double w_phase = 2.0 / phase_derivative(op, lam, w_ab);
      t.check("weight difference", std::abs(w_ab - w_phase), 1e-8);
      t.check("stable norm against A'B - AB'", std::abs(d.normsq - cross) / d.normsq, 1e-8);
      worst_relative = std::max(worst_relative, std::abs(w_ab - w_phase) / w_phase);
      largest = std::max(largest, w_ab);
      ++atoms;
    }
  }
  t.note("|(A, B) weight - 2 / alpha'| below 1e-8; worst relative difference " + fmt(worst_relative) +
         ", largest weight " + fmt(largest));
  return t.report("criterion 4: weight-formula duality", atoms);
}

// 5. Constant R = I/2 with u1 = [-q, -1].
TestReport trace_values() {
  Tally t;
  std::size_t cases = 0;
  for (double q : {0.0, 0.5, -2.0, 3.0, 10.0}) {
    for (std::size_t cells : {1, 7}) {
      const DiracOperator op =
          build_operator(std::vector<CellPoint>(cells, CellPoint{0.0, 1.0}), BoundarySlope::finite(q));
      const TraceNorm tn = trace_and_hsnorm(op);
      t.check("trace", std::abs(tn.trace + q / 2.0), 1e-12);
      t.check("hs norm", std::abs(tn.hs_norm_sq - (1.0 + q * q) / 4.0), 1e-12);
      ++cases;
    }
  }
  return t.report("criterion 5: closed-form trace and HS norm", cases);
}

// 6. |gamma_k|^2 ~ Beta(1, (beta/2)(n-k-1)).
TestReport kn_marginals(std::uint64_t seed, unsigned jobs) {
  Tally t;
  constexpr std::size_t kDraws = 10000;
  const std::pair<std::size_t, double> cases[] = {{6, 2.0}, {6, 4.0}, {10, 1.0}};
  int tag = 0;
  for (const auto& [n, beta] : cases) {
    std::vector<std::vector<double>> r2(n - 1, std::vector<double>(kDraws));
    const std::uint64_t s = derive_seed(seed, 60 + tag++);
    parallel_for(kDraws, jobs, [&, n = n, beta = beta](std::size_t i) {
      const CoefficientSequence g = sample_kn(n, beta, SeedSpec{s, i});
      for (std::size_t k = 0; k + 1 < n; ++k) r2[k][i] = std::norm(g[k]);
    });
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double shape = 0.5 * beta * static_cast<double>(n - k - 1);
      const TestReport r =
          ks_test(r2[k], [shape](double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : 1.0 - std::pow(1.0 - x, shape); });
      t.check("KS n=" + std::to_string(n) + " beta=" + fmt(beta) + " k=" + std::to_string(k),
              r.statistic, r.threshold);
    }
  }
  t.note("statistic is the largest KS/threshold ratio over all (n, beta, k)");
  return t.report("criterion 6: Killip-Nenciu marginals", kDraws);
}

// 7. Palm transform of KN against the direct sampler and the density.
TestReport palm_law(std::uint64_t seed, unsigned jobs) {
  Tally t;
  constexpr std::size_t kDraws = 10000;
  constexpr std::size_t n = 6;
  constexpr double beta = 2.0;
  std::vector<CoefficientSequence> palm(kDraws, CoefficientSequence(CoefficientKind::modified, {1.0}));
  std::vector<CoefficientSequence> direct = palm;
  const std::uint64_t s1 = derive_seed(seed, 70), s2 = derive_seed(seed, 71);
  parallel_for(kDraws, jobs, [&](std::size_t i) {
    palm[i] = palm_transform(sample_kn(n, beta, SeedSpec{s1, i}));
    direct[i] = sample_biased_direct(n, beta, SeedSpec{s2, i});
  });
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::vector<double> pr(kDraws), pi(kDraws), dr(kDraws), di(kDraws);
    for (std::size_t i = 0; i < kDraws; ++i) {
      pr[i] = palm[i][k].real();
      pi[i] = palm[i][k].imag();
      dr[i] = direct[i][k].real();
      di[i] = direct[i][k].imag();
    }
    const TestReport a = ks_test(pr, dr);
    const TestReport b = ks_test(pi, di);
    t.check("KS Re k=" + std::to_string(k), a.statistic, a.threshold);
    t.check("KS Im k=" + std::to_string(k), b.statistic, b.threshold);
  }
  const double shape = 0.5 * beta * static_cast<double>(n - 1);
  const DiskDensity density = [shape](cplx z) {
    return std::pow(1.0 - std::norm(z), shape) / std::norm(1.0 - z);
  };
  std::vector<cplx> g0(kDraws), d0(kDraws);
  for (std::size_t i = 0; i < kDraws; ++i) {
    g0[i] = palm[i][0];
    d0[i] = direct[i][0];
  }
  const TestReport c = chi2_hist2d(g0, density);
  t.check("chi2 palm gamma_0", c.statistic, c.threshold);
  const TestReport d = chi2_hist2d(d0, density);
  t.check("chi2 direct gamma_0", d.statistic, d.threshold);
  t.note("n=6, beta=2; chi2 palm " + fmt(c.statistic) + " vs " + fmt(c.threshold));
  return t.report("criterion 7: Palm coefficient law", kDraws);
}

// 8. 2n Beta(beta/2, beta(n-1)/2) -> Gamma(beta/2, mean 2).
TestReport gamma_limit() {
  Tally t;
  constexpr double beta = 2.0;
  std::vector<double> dist;
  for (double n : {1e2, 1e3, 1e4}) {
    auto f = [n](double x) {
      const double u = x / (2.0 * n);
      if (u >= 1.0) return 1.0;
      return boost::math::ibeta(beta / 2.0, beta * (n - 1.0) / 2.0, u);
    };
    auto g = [](double x) { return boost::math::gamma_p(beta / 2.0, x * beta / 4.0); };
    dist.push_back(cdf_distance(f, g, 60.0));
  }
  t.check("distance at n=1e4", dist[2], 0.01);
  if (!(dist[0] > dist[1] && dist[1] > dist[2])) t.fail("monotone decrease over n");
  t.note("distances " + fmt(dist[0]) + ", " + fmt(dist[1]) + ", " + fmt(dist[2]));
  return t.report("criterion 8: Gamma weight limit", 3);
}

// 9. eta-average of the Aleksandrov measures is uniform.
TestReport spectral_averaging(std::uint64_t seed) {
  Tally t;
  Rng rng({derive_seed(seed, 90), 0});
  constexpr std::size_t kGrid = 256;
  for (std::size_t c = 0; c < 20; ++c) {
    const std::size_t n = 1 + c % 6;
    const CoefficientSequence alpha = measure_to_alpha(random_measure(n, rng));
    cplx moments[3] = {0.0, 0.0, 0.0};
    for (std::size_t l = 0; l < kGrid; ++l) {
      const cplx eta = std::polar(1.0, kTwoPi * static_cast<double>(l) / kGrid);
      const UnitCircleMeasure nu = alpha_to_measure(aleksandrov_transform(alpha, eta));
      for (std::size_t j = 0; j < nu.size(); ++j)
        for (int m = 0; m < 3; ++m) moments[m] += nu.weights()[j] * std::polar(1.0, (m + 1) * nu.angles()[j]);
    }
    for (int m = 0; m < 3; ++m)
      t.check("moment " + std::to_string(m + 1), std::abs(moments[m]) / kGrid, 1e-3);
  }
  return t.report("criterion 9: spectral averaging", 20);
}

// 10. Palm of KN minus the atom at 1 is circular Jacobi.
TestReport circular_jacobi(std::uint64_t seed, unsigned jobs) {
  Tally t;
  constexpr std::size_t kDraws = 10000;
  constexpr std::size_t n = 5;
  constexpr double beta = 2.0;
  std::vector<cplx> g0(kDraws);
  const std::uint64_t s = derive_seed(seed, 100);
  parallel_for(kDraws, jobs, [&](std::size_t i) {
    const UnitCircleMeasure nu = measure_of(palm_transform(sample_kn(n, beta, SeedSpec{s, i})));
    const UnitCircleMeasure rest = remove_atom(nu, 0.0);
    g0[i] = convert_coefficients(measure_to_alpha(rest), CoefficientKind::modified)[0];
  });
  const double e = 0.5 * beta * static_cast<double>(n - 2) - 1.0;
  const DiskDensity density = [e](cplx z) {
    return std::pow(1.0 - std::norm(z), e) * std::pow(std::abs(1.0 - z), beta);
  };
  const TestReport c = chi2_hist2d(g0, density);
  t.check("chi2 gamma_0", c.statistic, c.threshold);
  t.note("n=5, beta=2; chi2 " + fmt(c.statistic) + " vs " + fmt(c.threshold) + "; " + c.notes);
  return t.report("criterion 10: circular Jacobi connection", kDraws);
}

// 11. Sine_2 intensity 1/(2 pi).
TestReport sine_intensity(std::uint64_t seed, unsigned jobs) {
  constexpr std::size_t kOps = 500;
  SinePathSpec spec;
  spec.beta = 2.0;
  std::vector<double> counts(kOps);
  const std::uint64_t s = derive_seed(seed, 110);
  parallel_for(kOps, jobs, [&](std::size_t i) {
    const DiracOperator op = sample_sine_operator(spec, SeedSpec{s, i});
    counts[i] = static_cast<double>(eigenvalues_in(op, 0.0, 20.0 * kPi).size());
  });
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= kOps;
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= kOps - 1;
  const double se = std::sqrt(var / kOps);
  const double z = se > 0.0 ? std::abs(mean - 10.0) / se : (mean == 10.0 ? 0.0 : 1e300);
  std::ostringstream notes;
  notes << "mean count " << mean << ", standard error " << se << "; statistic is |mean-10|/se";
  return make_report("criterion 11: Sine_beta intensity", z, 3.0, kOps, notes.str());
}

// 12. Right boundary [1,0] puts 0 in the spectrum.
TestReport palm_pins_zero(std::uint64_t seed, unsigned jobs) {
  Tally t;
  constexpr std::size_t kOps = 20;
  SinePathSpec spec;
  spec.q_mode = QMode::infinity();
  std::vector<double> nearest(kOps), zeta(kOps);
  const std::uint64_t s = derive_seed(seed, 120);
  parallel_for(kOps, jobs, [&](std::size_t i) {
    const DiracOperator op = sample_sine_operator(spec, SeedSpec{s, i});
    double best = std::numeric_limits<double>::infinity();
    for (double lam : eigenvalues_in(op, -1.0, 1.0)) best = std::min(best, std::abs(lam));
    nearest[i] = best;
    zeta[i] = std::abs(secular_at(op, 0.0));
  });
  for (std::size_t i = 0; i < kOps; ++i) {
    t.check("nearest eigenvalue to 0", nearest[i], 1e-10);
    t.check("|zeta(0)|", zeta[i], 1e-10);
  }
  return t.report("criterion 12: Palm spectrum pins zero", kOps);
}

// 13. Window biasing approaches the Palm law as epsilon shrinks.
TestReport biasing_trend(std::uint64_t seed, unsigned jobs) {
  constexpr std::size_t n = 6;
  constexpr double beta = 2.0;
  constexpr std::size_t kReplicas = 100000;
  constexpr std::size_t kReference = 100000;
  const std::uint64_t sref = derive_seed(seed, 130);
  std::vector<std::vector<double>> ref_re(n - 1, std::vector<double>(kReference));
  std::vector<std::vector<double>> ref_im = ref_re;
  parallel_for(kReference, jobs, [&](std::size_t i) {
    const CoefficientSequence d = sample_biased_direct(n, beta, SeedSpec{sref, i});
    for (std::size_t k = 0; k + 1 < n; ++k) {
      ref_re[k][i] = d[k].real();
      ref_im[k][i] = d[k].imag();
    }
  });
  const std::vector<double> ones(kReference, 1.0);
  std::vector<double> ks;
  std::ostringstream notes;
  const std::uint64_t srep = derive_seed(seed, 131);
  for (double eps : {0.3, 0.1, 0.03}) {
    const WeightedSample ws = bias_by_window(kn_sampler(n, beta), eps, kReplicas, srep, jobs);
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      std::vector<double> re, im;
      for (const BiasDraw& d : ws.draws) {
        re.push_back(d.features[k].real());
        im.push_back(d.features[k].imag());
      }
      worst = std::max(worst, ks_test_weighted(re, ws.weights, ref_re[k], ones).statistic);
      worst = std::max(worst, ks_test_weighted(im, ws.weights, ref_im[k], ones).statistic);
    }
    ks.push_back(worst);
    notes << "eps " << eps << ": KS " << worst << " (effective size " << ws.effective_size() << "); ";
  }
  const double stat = std::max(ks[1] / ks[0], ks[2] / ks[1]);
  notes << "statistic is the largest ratio of consecutive KS distances (max over Re/Im of "
           "gamma_0..gamma_4)";
  return make_report("criterion 13: biasing limit trend", stat, 1.0, kReplicas, notes.str());
}

// 14. T_r conjugation, double reversal and the reversal side swap.
TestReport transform_invariances(std::uint64_t seed) {
  Tally t;
  Rng rng({derive_seed(seed, 140), 0});
  auto compare = [&](const SpectralMeasure& a, const SpectralMeasure& b, const std::string& what) {
    if (a.atoms.size() != b.atoms.size()) {
      t.fail(what + " atom count");
      return;
    }
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
      t.check(what + " eigenvalue", std::abs(a.atoms[i].first - b.atoms[i].first), 1e-8);
      t.check(what + " weight", std::abs(a.atoms[i].second - b.atoms[i].second), 1e-8);
    }
  };
  constexpr int kOps = 20;
  for (int c = 0; c < kOps; ++c) {
    const DiracOperator op = random_operator(rng);
    const double r = 8.0 * rng.uniform() - 4.0;
    const Mobius2x2 m = rotation_about_i(r);
    Mat2 q;
    q << m.a.real(), m.b.real(), m.c.real(), m.d.real();
    const DiracOperator conj = conjugate(op, q);
    const DiracOperator rev = reverse(op);
    const DiracOperator rev2 = reverse(rev);
    for (Side side : {Side::left, Side::right}) {
      compare(spectral_measure(op, -15.0, 15.0, side), spectral_measure(conj, -15.0, 15.0, side),
              "T_r " + to_string(side));
    }
    compare(spectral_measure(op, -15.0, 15.0, Side::left),
            spectral_measure(rev, -15.0, 15.0, Side::right), "reversal left/right");
    compare(spectral_measure(op, -15.0, 15.0, Side::right),
            spectral_measure(rev, -15.0, 15.0, Side::left), "reversal right/left");
    for (std::size_t k = 0; k < op.cells(); ++k) {
      t.check("double reversal path", std::abs(rev2.path()[k].x - op.path()[k].x) +
                                          std::abs(rev2.path()[k].y - op.path()[k].y), 1e-12);
      t.check("double reversal grid", std::abs(rev2.grid()[k] - op.grid()[k]), 1e-12);
    }
    t.check("double reversal u0", (rev2.u0() - op.u0()).norm(), 1e-12);
    t.check("double reversal u1", (rev2.u1() - op.u1()).norm(), 1e-12);
  }
  return t.report("criterion 14: transform invariances", kOps);
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "rotated lattice spectrum", false},
      {2, "spectral lift", false},
      {3, "roundtrip", false},
      {4, "weight-formula duality", false},
      {5, "closed-form trace and HS norm", false},
      {6, "Killip-Nenciu marginals", true},
      {7, "Palm coefficient law", true},
      {8, "Gamma weight limit", true},
      {9, "spectral averaging", false},
      {10, "circular Jacobi connection", true},
      {11, "Sine_beta intensity", true},
      {12, "Palm spectrum pins zero", false},
      {13, "biasing limit trend", true},
      {14, "transform invariances", false},
  };
  return list;
}

TestReport run_criterion(int id, std::uint64_t seed, unsigned jobs) {
  switch (id) {
    case 1: return lattice_reproduction();
    case 2: return spectral_lift(seed);
    case 3: return roundtrip(seed);
    case 4: return weight_duality(seed);
    case 5: return trace_values();
    case 6: return kn_marginals(seed, jobs);
    case 7: return palm_law(seed, jobs);
    case 8: return gamma_limit();
    case 9: return spectral_averaging(seed);
    case 10: return circular_jacobi(seed, jobs);
    case 11: return sine_intensity(seed, jobs);
    case 12: return palm_pins_zero(seed, jobs);
    case 13: return biasing_trend(seed, jobs);
    case 14: return transform_invariances(seed);
    default: throw std::invalid_argument("unknown criterion " + std::to_string(id));
  }
}

std::vector<TestReport> run_suite(const std::string& suite, std::uint64_t seed, unsigned jobs) {
  if (suite != "core" && suite != "statistical" && suite != "all")
    throw std::invalid_argument("suite must be 'core', 'statistical' or 'all', got '" + suite + "'");
  std::vector<TestReport> out;
  for (const Criterion& c : criteria()) {
    if (suite == "core" && c.statistical) continue;
    if (suite == "statistical" && !c.statistical) continue;
    TestReport r;
    try {
      r = run_criterion(c.id, seed, jobs);
    } catch (const std::exception& e) {
      r = make_report("criterion " + std::to_string(c.id) + ": " + c.title,
                      std::numeric_limits<double>::infinity(), 1.0, 0,
                      std::string("error: ") + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sinepalm
