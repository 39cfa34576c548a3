#pragma once

// Random measures and operators: Killip-Nenciu coefficients, the Palm
// transform and its direct sampler, Sine_beta operators, atom removal and
// window-biased Monte Carlo.

#include <cstdint>
#include <functional>
#include <vector>

#include "sinepalm/dirac.hpp"
#include "sinepalm/opuc.hpp"
#include "sinepalm/rng.hpp"

namespace sinepalm {

/// Modified coefficients with r_k^2 ~ Beta(1, (beta/2)(n-k-1)), uniform
/// phases, and a uniform terminal coefficient on the unit circle.
CoefficientSequence sample_kn(std::size_t n, double beta, SeedSpec seed);
CoefficientSequence sample_kn(std::size_t n, double beta, Rng& rng);

/// Measure whose modified coefficients are a Killip-Nenciu draw.
UnitCircleMeasure kn_measure(std::size_t n, double beta, SeedSpec seed);
UnitCircleMeasure kn_measure(std::size_t n, double beta, Rng& rng);

/// Measure of a modified coefficient sequence.
UnitCircleMeasure measure_of(const CoefficientSequence& seq);

/// gamma'_k = iota(gamma_k) for k <= n-2 and gamma'_{n-1} = 1.
CoefficientSequence palm_transform(const CoefficientSequence& gammas);

/// Independent draws from the densities proportional to
/// (1-|z|^2)^s |1-z|^{-2}, s = (beta/2)(n-k-1), with terminal coefficient 1.
CoefficientSequence sample_biased_direct(std::size_t n, double beta, SeedSpec seed);
CoefficientSequence sample_biased_direct(std::size_t n, double beta, Rng& rng);

struct QMode {
  enum class Kind { cauchy, fixed, infinity } kind = Kind::cauchy;
  double q = 0.0;
  static QMode cauchy() { return {Kind::cauchy, 0.0}; }
  static QMode fixed(double value) { return {Kind::fixed, value}; }
  static QMode infinity() { return {Kind::infinity, 0.0}; }
};

struct SinePathSpec {
  double beta = 2.0;
  double t_min = 1e-4;
  std::size_t cells = 4096;
  QMode q_mode = QMode::cauchy();

  /// Throws std::invalid_argument for beta <= 0, t_min outside (0,1) or
  /// fewer than two cells.
  void validate() const;
};

/// Brownian-driven operator sampled on a uniform grid in u = (4/beta) log t.
/// The first cell is stretched to start at t = 0.
DiracOperator sample_sine_operator(const SinePathSpec& spec, SeedSpec seed);
DiracOperator sample_sine_operator(const SinePathSpec& spec, Rng& rng);

/// Removes the atom within 1e-8 of `angle` and renormalizes.
UnitCircleMeasure remove_atom(const UnitCircleMeasure& mu, double angle);

/// Mass of the open arc of half-width epsilon around angle 0.
double arc_mass(const UnitCircleMeasure& mu, double epsilon);

/// A sampled measure together with caller-defined features (for example its
/// modified coefficients).
struct BiasDraw {
  UnitCircleMeasure measure;
  std::vector<cplx> features;
};

using MeasureSampler = std::function<BiasDraw(Rng&)>;

/// Replicas with positive importance weight mu(arc)/mean(mu(arc)).
struct WeightedSample {
  std::vector<BiasDraw> draws;
  std::vector<double> weights;
  std::vector<std::size_t> replica_index;
  std::size_t replicas = 0;
  double mean_arc_mass = 0.0;
  /// (sum w)^2 / sum w^2.
  double effective_size() const;
};

/// Draws `replicas` measures with streams (seed, i) and attaches the window
/// weights. Throws std::runtime_error("empty biasing event") when no replica
/// charges the window.
WeightedSample bias_by_window(const MeasureSampler& sampler, double epsilon,
                              std::size_t replicas, std::uint64_t seed, unsigned jobs = 1);

/// Killip-Nenciu sampler whose features are the modified coefficients.
MeasureSampler kn_sampler(std::size_t n, double beta);

}  // namespace sinepalm
