#include "sinepalm/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sinepalm {

namespace {

constexpr double kPi = std::numbers::pi;

std::string small_sample_note(std::size_t n) {
  if (n >= 10) return {};
  std::ostringstream msg;
  msg << "sample size " << n << " is below 10; the asymptotic threshold is unreliable";
  return msg.str();
}

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " contains a non-finite value");
}

}  // namespace

TestReport make_report(std::string name, double statistic, double threshold,
                       std::size_t sample_size, std::string notes) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.sample_size = sample_size;
  r.pass = statistic < threshold;
  r.notes = std::move(notes);
  return r;
}

double kolmogorov_quantile(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  auto tail = [](double c) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * c * c);
      s += (k % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-300) break;
    }
    return s;
  };
  auto f = [&](double c) { return tail(c) - level; };
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.2, 10.0, tol, iters);
  return 0.5 * (lo + hi);
}

TestReport ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                   double level) {
  if (samples.empty()) throw std::invalid_argument("ks_test: empty sample");
  require_finite(samples, "ks_test sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return make_report("ks one-sample", d, kolmogorov_quantile(level) / std::sqrt(n),
                     samples.size(), small_sample_note(samples.size()));
}

TestReport ks_test(std::vector<double> a, std::vector<double> b, double level) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::vector<double> wa(a.size(), 1.0), wb(b.size(), 1.0);
  TestReport r = ks_test_weighted(a, wa, b, wb, level);
  r.name = "ks two-sample";
  return r;
}

TestReport ks_test_weighted(const std::vector<double>& a, const std::vector<double>& wa,
                            const std::vector<double>& b, const std::vector<double>& wb,
                            double level) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_test: empty sample");
  if (a.size() != wa.size() || b.size() != wb.size())
    throw std::invalid_argument("ks_test: weights and samples differ in length");
  require_finite(a, "ks_test sample");
  require_finite(b, "ks_test sample");
  auto prepare = [](const std::vector<double>& v, const std::vector<double>& w) {
    std::vector<std::pair<double, double>> out(v.size());
    double total = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(w[i] >= 0.0) || !std::isfinite(w[i]))
        throw std::invalid_argument("ks_test: weights must be finite and nonnegative");
      out[i] = {v[i], w[i]};
      total += w[i];
      sq += w[i] * w[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("ks_test: weights sum to zero");
    for (auto& p : out) p.second /= total;
    std::sort(out.begin(), out.end());
    return std::pair{out, total * total / sq};
  };
  const auto [pa, na] = prepare(a, wa);
  const auto [pb, nb] = prepare(b, wb);
  double fa = 0.0, fb = 0.0, d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < pa.size() || j < pb.size()) {
    double x;
    if (j >= pb.size() || (i < pa.size() && pa[i].first <= pb[j].first)) {
      x = pa[i].first;
    } else {
      x = pb[j].first;
    }
    while (i < pa.size() && pa[i].first == x) fa += pa[i++].second;
    while (j < pb.size() && pb[j].first == x) fb += pb[j++].second;
    d = std::max(d, std::abs(fa - fb));
  }
  const double threshold = kolmogorov_quantile(level) * std::sqrt((na + nb) / (na * nb));
  std::ostringstream notes;
  notes << "effective sizes " << na << " and " << nb;
  const std::string small = small_sample_note(std::min(a.size(), b.size()));
  if (!small.empty()) notes << "; " << small;
  return make_report("ks weighted two-sample", d, threshold,
                     static_cast<std::size_t>(std::llround(std::min(na, nb))), notes.str());
}

namespace {

struct PolarCell {
  double rho_lo, rho_hi, th_lo, th_hi;  // rho = r^2
};

template <int N>
double integrate_cell(const DiskDensity& density, const PolarCell& c) {
  using Gauss = boost::math::quadrature::gauss<double, N>;
  // dA = r dr dtheta = (1/2) drho dtheta.
  auto inner = [&](double th) {
    return Gauss::integrate(
        [&](double rho) { return 0.5 * density(std::polar(std::sqrt(rho), th)); }, c.rho_lo,
        c.rho_hi);
  };
  return Gauss::integrate(inner, c.th_lo, c.th_hi);
}

bool touches_one(const PolarCell& c) {
  return c.rho_hi == 1.0 && (c.th_lo == 0.0 || c.th_hi == 0.0);
}

template <int N>
double integrate_refined(const DiskDensity& density, const PolarCell& c, int levels) {
  if (levels == 0 || !touches_one(c)) return integrate_cell<N>(density, c);
  const double rm = 0.5 * (c.rho_lo + c.rho_hi);
  const double tm = 0.5 * (c.th_lo + c.th_hi);
  double s = 0.0;
  for (const PolarCell& sub : {PolarCell{c.rho_lo, rm, c.th_lo, tm}, PolarCell{c.rho_lo, rm, tm, c.th_hi},
                               PolarCell{rm, c.rho_hi, c.th_lo, tm}, PolarCell{rm, c.rho_hi, tm, c.th_hi}})
    s += integrate_refined<N>(density, sub, levels - 1);
  return s;
}

constexpr int kRefineLevels = 8;

void validate_bins(PolarBins bins) {
  if (bins.radial == 0 || bins.angular < 2 || bins.angular % 2 != 0)
    throw std::invalid_argument("polar bins need radial >= 1 and an even angular count");
}

PolarCell cell_at(PolarBins bins, std::size_t i, std::size_t j) {
  const double nr = static_cast<double>(bins.radial);
  const double na = static_cast<double>(bins.angular);
  PolarCell c{static_cast<double>(i) / nr, static_cast<double>(i + 1) / nr,
              -kPi + 2.0 * kPi * static_cast<double>(j) / na,
              -kPi + 2.0 * kPi * static_cast<double>(j + 1) / na};
  if (i + 1 == bins.radial) c.rho_hi = 1.0;
  if (2 * j == bins.angular) c.th_lo = 0.0;
  if (2 * (j + 1) == bins.angular) c.th_hi = 0.0;
  return c;
}

}  // namespace

std::vector<double> disk_cell_probabilities(const DiskDensity& density, PolarBins bins) {
  validate_bins(bins);
  std::vector<double> coarse, fine;
  for (std::size_t i = 0; i < bins.radial; ++i) {
    for (std::size_t j = 0; j < bins.angular; ++j) {
      const PolarCell c = cell_at(bins, i, j);
      coarse.push_back(integrate_refined<10>(density, c, kRefineLevels));
      fine.push_back(integrate_refined<20>(density, c, kRefineLevels));
    }
  }
  const double tc = std::accumulate(coarse.begin(), coarse.end(), 0.0);
  const double tf = std::accumulate(fine.begin(), fine.end(), 0.0);
  if (!(tf > 0.0) || !std::isfinite(tf) || std::abs(tc - tf) > 1e-6 * tf) {
    std::ostringstream msg;
    msg << "density quadrature failed to normalize: totals " << tc << " and " << tf;
    throw std::runtime_error(msg.str());
  }
  for (double& p : fine) p /= tf;
  return fine;
}

std::size_t disk_cell_index(std::complex<double> z, PolarBins bins) {
  validate_bins(bins);
  const double rho = std::norm(z);
  std::size_t i = static_cast<std::size_t>(rho * static_cast<double>(bins.radial));
  i = std::min(i, bins.radial - 1);
  double th = std::arg(z);  // (-pi, pi]
  std::size_t j = static_cast<std::size_t>((th + kPi) / (2.0 * kPi) * static_cast<double>(bins.angular));
  j = std::min(j, bins.angular - 1);
  return i * bins.angular + j;
}

TestReport chi2_hist2d(const std::vector<std::complex<double>>& samples,
                       const DiskDensity& density, PolarBins bins, double level) {
  if (samples.empty()) throw std::invalid_argument("chi2_hist2d: empty sample");
  const std::vector<double> prob = disk_cell_probabilities(density, bins);
  std::vector<double> observed(prob.size(), 0.0);
  for (auto z : samples) observed[disk_cell_index(z, bins)] += 1.0;
  const double n = static_cast<double>(samples.size());

  struct Group {
    double expected = 0.0, observed = 0.0;
  };
  std::vector<Group> groups;
  Group pool;
  std::size_t pooled = 0;
  for (std::size_t c = 0; c < prob.size(); ++c) {
    const double e = n * prob[c];
    if (e < 5.0) {
      pool.expected += e;
      pool.observed += observed[c];
      ++pooled;
    } else {
      groups.push_back({e, observed[c]});
    }
  }
  if (pooled > 0) {
    if (pool.expected >= 5.0 || groups.empty()) {
      groups.push_back(pool);
    } else {
      auto smallest = std::min_element(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
        return a.expected < b.expected;
      });
      smallest->expected += pool.expected;
      smallest->observed += pool.observed;
    }
  }
  if (groups.size() < 2) throw std::invalid_argument("chi2_hist2d: fewer than two usable cells");
  double stat = 0.0;
  for (const Group& g : groups) stat += (g.observed - g.expected) * (g.observed - g.expected) / g.expected;
  const double df = static_cast<double>(groups.size() - 1);
  const double threshold =
      boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), level));
  std::ostringstream notes;
  notes << groups.size() << " cells after merging " << pooled << " low-expectation cells; df "
        << df;
  return make_report("chi2 polar histogram", stat, threshold, samples.size(), notes.str());
}

RejectionResult rejection_sample(const DiskDensity& density, double bound, std::size_t count,
                                 Rng& rng, double radius, std::size_t max_proposals) {
  if (!(bound > 0.0)) throw std::invalid_argument("rejection bound must be positive");
  if (!(radius > 0.0 && radius <= 1.0)) throw std::invalid_argument("radius must lie in (0, 1]");
  const double proposal = 1.0 / (kPi * radius * radius);
  RejectionResult out;
  out.draws.reserve(count);
  while (out.draws.size() < count) {
    if (out.proposals >= max_proposals) {
      std::ostringstream msg;
      msg << "rejection budget exceeded after " << out.proposals << " proposals (acceptance rate "
          << out.acceptance_rate() << ")";
      throw std::runtime_error(msg.str());
    }
    const double r = radius * std::sqrt(rng.uniform());
    const std::complex<double> z = std::polar(r, 2.0 * kPi * rng.uniform());
    const double u = rng.uniform();
    ++out.proposals;
    const double ratio = density(z) / (bound * proposal);
    if (ratio > 1.0) {
      std::ostringstream msg;
      msg << "envelope violation at z = " << z.real() << (z.imag() < 0 ? " - " : " + ")
          << std::abs(z.imag()) << "i: density/proposal = " << ratio * bound << " > bound " << bound;
      throw std::runtime_error(msg.str());
    }
    if (u < ratio) out.draws.push_back(z);
  }
  return out;
}

TestReport independence_test(const std::vector<std::vector<double>>& x,
                             const std::vector<std::vector<double>>& y, double level) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("independence_test needs paired samples");
  auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
  };
  std::vector<double> ra(n, 0.0), rb(n, 0.0);
  double s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = dist(x[i], x[j]);
      const double b = dist(y[i], y[j]);
      ra[i] += a;
      ra[j] += a;
      rb[i] += b;
      rb[j] += b;
      s1 += 2.0 * a * b;
    }
  }
  const double nn = static_cast<double>(n);
  double ga = 0.0, gb = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ga += ra[i];
    gb += rb[i];
    s3 += (ra[i] / nn) * (rb[i] / nn);
  }
  s1 /= nn * nn;
  ga /= nn * nn;
  gb /= nn * nn;
  s3 /= nn;
  const double s2 = ga * gb;
  const double v2 = s1 + s2 - 2.0 * s3;
  const double stat = nn * v2 / s2;
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - level / 2.0);
  std::ostringstream notes;
  notes << "distance covariance V^2 = " << v2 << ", distance correlation "
        << v2 / std::sqrt(std::max(1e-300, s2));
  return make_report("distance covariance independence", stat, z * z, n, notes.str());
}

double cdf_distance(const std::function<double(double)>& f,
                    const std::function<double(double)>& g, double upper, std::size_t scan) {
  if (!(upper > 0.0) || scan < 2) throw std::invalid_argument("cdf_distance needs upper > 0");
  auto gap = [&](double x) { return std::abs(f(x) - g(x)); };
  double best = 0.0, best_x = 0.0;
  const double h = upper / static_cast<double>(scan);
  for (std::size_t k = 1; k <= scan; ++k) {
    const double x = h * static_cast<double>(k);
    const double d = gap(x);
    if (d > best) {
      best = d;
      best_x = x;
    }
  }
  double lo = std::max(0.0, best_x - h), hi = best_x + h;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  double fc = gap(c), fd = gap(d);
  for (int it = 0; it < 100 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = gap(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = gap(d);
    }
  }
  return std::max({best, fc, fd});
}

}  // namespace sinepalm
