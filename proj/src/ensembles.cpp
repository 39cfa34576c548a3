#include "sinepalm/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sinepalm/parallel.hpp"

namespace sinepalm {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("beta must be positive and finite");
}

// |z|^2 ~ Beta(1, s) by inversion.
double beta_one_radius(double s, Rng& rng) {
  const double r2 = 1.0 - std::pow(rng.uniform_open_low(), 1.0 / s);
  return std::sqrt(r2);
}

}  // namespace

CoefficientSequence sample_kn(std::size_t n, double beta, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_kn requires n >= 1");
  require_positive_beta(beta);
  std::vector<cplx> g(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double s = 0.5 * beta * static_cast<double>(n - k - 1);
    const double r = beta_one_radius(s, rng);
    g[k] = std::polar(r, 2.0 * kPi * rng.uniform());
  }
  g[n - 1] = std::polar(1.0, 2.0 * kPi * rng.uniform());
  return CoefficientSequence(CoefficientKind::modified, std::move(g));
}

CoefficientSequence sample_kn(std::size_t n, double beta, SeedSpec seed) {
  Rng rng(seed);
  return sample_kn(n, beta, rng);
}

UnitCircleMeasure measure_of(const CoefficientSequence& seq) {
  return alpha_to_measure(convert_coefficients(seq, CoefficientKind::verblunsky));
}

UnitCircleMeasure kn_measure(std::size_t n, double beta, Rng& rng) {
  return measure_of(sample_kn(n, beta, rng));
}

UnitCircleMeasure kn_measure(std::size_t n, double beta, SeedSpec seed) {
  Rng rng(seed);
  return kn_measure(n, beta, rng);
}

CoefficientSequence palm_transform(const CoefficientSequence& gammas) {
  if (gammas.kind() != CoefficientKind::modified)
    throw std::invalid_argument("palm_transform requires modified coefficients");
  std::vector<cplx> out(gammas.size());
  for (std::size_t k = 0; k + 1 < gammas.size(); ++k) out[k] = iota(gammas[k]);
  out.back() = 1.0;
  return CoefficientSequence(CoefficientKind::modified, std::move(out));
}

CoefficientSequence sample_biased_direct(std::size_t n, double beta, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_biased_direct requires n >= 2");
  require_positive_beta(beta);
  std::vector<cplx> g(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // The radial marginal is Beta(1, s) in |z|^2 as for the unbiased law; given
    // the radius r the angle follows the Poisson kernel P_r, sampled by
    // pushing a uniform angle through tan(theta/2) = ((1-r)/(1+r)) tan(phi/2).
    const double s = 0.5 * beta * static_cast<double>(n - k - 1);
    const double r = beta_one_radius(s, rng);
    const double half = std::atan((1.0 - r) / (1.0 + r) * std::tan(kPi * (rng.uniform() - 0.5)));
    g[k] = std::polar(r, 2.0 * half);
  }
  g[n - 1] = 1.0;
  return CoefficientSequence(CoefficientKind::modified, std::move(g));
}

CoefficientSequence sample_biased_direct(std::size_t n, double beta, SeedSpec seed) {
  Rng rng(seed);
  return sample_biased_direct(n, beta, rng);
}

void SinePathSpec::validate() const {
  require_positive_beta(beta);
  if (!(t_min > 0.0 && t_min < 1.0)) throw std::invalid_argument("t_min must lie in (0, 1)");
  if (cells < 2) throw std::invalid_argument("cells must be at least 2");
  if (q_mode.kind == QMode::Kind::fixed && !std::isfinite(q_mode.q))
    throw std::invalid_argument("fixed q must be finite");
}

DiracOperator sample_sine_operator(const SinePathSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t m = spec.cells;
  const double u_min = 4.0 / spec.beta * std::log(spec.t_min);
  const double du = -u_min / static_cast<double>(m);
  const double sdu = std::sqrt(du);

  Vec2 u1(1.0, 0.0);
  switch (spec.q_mode.kind) {
    case QMode::Kind::cauchy:
      u1 = Vec2(-std::tan(kPi * (rng.uniform() - 0.5)), -1.0);
      break;
    case QMode::Kind::fixed:
      u1 = Vec2(-spec.q_mode.q, -1.0);
      break;
    case QMode::Kind::infinity:
      break;
  }

  std::vector<double> u(m + 1);
  for (std::size_t i = 0; i <= m; ++i) u[i] = u_min + du * static_cast<double>(i);
  u[m] = 0.0;

  // Both Brownian motions are pinned at u = 0 and built towards u_min.
  std::vector<CellPoint> cells(m);
  double b2 = 0.0, x = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    b2 += sdu * rng.normal();
    const double scale = std::exp(b2 - 0.5 * u[i]);
    x -= scale * sdu * rng.normal();
    if (!std::isfinite(scale) || !(scale > 0.0) || !std::isfinite(x)) {
      std::ostringstream msg;
      msg << "driving path overflowed at u = " << u[i]
          << "; resample with another stream or a larger t_min";
      throw std::runtime_error(msg.str());
    }
    cells[i] = {x, scale};
  }

  std::vector<double> grid(m + 1);
  grid[0] = 0.0;
  for (std::size_t i = 1; i < m; ++i) grid[i] = std::exp(0.25 * spec.beta * u[i]);
  grid[m] = 1.0;
  return DiracOperator(std::move(grid), std::move(cells), Vec2(1.0, 0.0), u1, Origin::sine_beta);
}

DiracOperator sample_sine_operator(const SinePathSpec& spec, SeedSpec seed) {
  Rng rng(seed);
  return sample_sine_operator(spec, rng);
}

UnitCircleMeasure remove_atom(const UnitCircleMeasure& mu, double angle) {
  const double target = wrap_angle(angle);
  std::vector<double> angles, weights;
  bool found = false;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double d = std::abs(mu.angles()[j] - target);
    const double gap = std::min(d, 2.0 * kPi - d);
    if (!found && gap <= 1e-8) {
      found = true;
      continue;
    }
    angles.push_back(mu.angles()[j]);
    weights.push_back(mu.weights()[j]);
  }
  if (!found) {
    std::ostringstream msg;
    msg << "no atom within 1e-8 of angle " << angle;
    throw std::invalid_argument(msg.str());
  }
  if (angles.empty()) throw std::invalid_argument("removing the only atom leaves no measure");
  return UnitCircleMeasure(std::move(angles), std::move(weights)).normalize();
}

double arc_mass(const UnitCircleMeasure& mu, double epsilon) {
  double mass = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double a = mu.angles()[j];
    if (a < epsilon || 2.0 * kPi - a < epsilon) mass += mu.weights()[j];
  }
  return mass;
}

double WeightedSample::effective_size() const {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

WeightedSample bias_by_window(const MeasureSampler& sampler, double epsilon,
                              std::size_t replicas, std::uint64_t seed, unsigned jobs) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (replicas + kChunk - 1) / kChunk;
  struct Partial {
    std::vector<BiasDraw> draws;
    std::vector<double> mass;
    std::vector<std::size_t> index;
    double total = 0.0;
  };
  std::vector<Partial> parts(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    Partial& p = parts[c];
    const std::size_t end = std::min(replicas, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      Rng rng(SeedSpec{seed, i});
      BiasDraw d = sampler(rng);
      const double m = arc_mass(d.measure, epsilon);
      p.total += m;
      if (m > 0.0) {
        p.draws.push_back(std::move(d));
        p.mass.push_back(m);
        p.index.push_back(i);
      }
    }
  });
  WeightedSample out;
  out.replicas = replicas;
  double total = 0.0;
  for (const Partial& p : parts) total += p.total;
  if (!(total > 0.0)) throw std::runtime_error("empty biasing event");
  out.mean_arc_mass = total / static_cast<double>(replicas);
  for (Partial& p : parts) {
    for (std::size_t j = 0; j < p.draws.size(); ++j) {
      out.draws.push_back(std::move(p.draws[j]));
      out.weights.push_back(p.mass[j] / out.mean_arc_mass);
      out.replica_index.push_back(p.index[j]);
    }
  }
  return out;
}

MeasureSampler kn_sampler(std::size_t n, double beta) {
  return [n, beta](Rng& rng) {
    CoefficientSequence g = sample_kn(n, beta, rng);
    UnitCircleMeasure mu = measure_of(g);
    return BiasDraw{std::move(mu), g.values()};
  };
}

}  // namespace sinepalm
