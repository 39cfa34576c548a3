#pragma once

// Orthogonal polynomials on the unit circle for finitely supported measures:
// Szego recursion, Verblunsky <-> modified coefficients, measure <-> coefficient
// maps, hyperbolic path parameters, path reversal and Aleksandrov rotation.

#include <cstddef>
#include <vector>

#include "sinepalm/hyperbolic.hpp"

namespace sinepalm {

enum class CoefficientKind { verblunsky, modified };

/// Tolerance on | |c_{n-1}| - 1 | for the terminal coefficient.
inline constexpr double kTerminalTol = 1e-10;

/// n coefficients: the first n-1 strictly inside the disk, the last on the
/// unit circle.
class CoefficientSequence {
 public:
  CoefficientSequence(CoefficientKind kind, std::vector<cplx> values);

  CoefficientKind kind() const noexcept { return kind_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  cplx operator[](std::size_t k) const { return values_.at(k); }

 private:
  CoefficientKind kind_;
  std::vector<cplx> values_;
};

/// Minimum circular gap between atoms.
inline constexpr double kMinAtomSeparation = 1e-10;

/// Finitely supported positive measure on the unit circle. Angles are wrapped
/// into [0, 2pi) and stored in increasing order together with their weights.
class UnitCircleMeasure {
 public:
  UnitCircleMeasure(std::vector<double> angles, std::vector<double> weights);

  const std::vector<double>& angles() const noexcept { return angles_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return angles_.size(); }
  double total_mass() const noexcept;
  /// Total mass equals 1 within 1e-12.
  bool normalized() const noexcept;
  UnitCircleMeasure normalize() const;

 private:
  std::vector<double> angles_;
  std::vector<double> weights_;
};

/// Wraps an angle into [0, 2pi).
double wrap_angle(double theta) noexcept;

/// One step z_{k+1} = z_k + (v + i w) Im z_k. v is infinite when the terminal
/// coefficient equals 1.
struct PathStep {
  double v = 0.0;
  double w = 0.0;
};

/// Path parameter b_0..b_n in the disk and z_0..z_n in the half-plane.
struct HyperbolicPath {
  std::vector<cplx> disk;
  std::vector<ExtPoint> halfplane;
  std::vector<PathStep> steps;

  std::size_t size() const noexcept { return disk.size(); }
};

/// Phi_k(z), Phi*_k(z) for k = 0..n.
struct SzegoValues {
  std::vector<cplx> phi;
  std::vector<cplx> phi_star;
};

/// Runs the Szego recursion from (1, 1). Requires Verblunsky coefficients.
SzegoValues szego_eval(const CoefficientSequence& alphas, cplx z);

/// Converts between Verblunsky and modified coefficients (no-op if the kind
/// already matches). Throws std::domain_error("degenerate product") when an
/// intermediate modified coefficient equals 1.
CoefficientSequence convert_coefficients(const CoefficientSequence& seq,
                                         CoefficientKind target);

/// Path points generated by an arbitrary list of disk parameters. Each entry
/// gamma_k produces the point k+1; a unit-modulus entry ends the path on the
/// boundary and an entry equal to 1 ends it at b = 1, z = infinity.
HyperbolicPath path_from_parameters(const std::vector<cplx>& gammas);

/// Path parameter of a modified coefficient sequence.
HyperbolicPath gamma_to_path(const CoefficientSequence& gammas);

/// Verblunsky coefficients of a normalized measure with n distinct atoms,
/// by re-orthogonalized Gram-Schmidt on the atoms. Throws
/// std::runtime_error("conditioning ...") when precision is exhausted.
CoefficientSequence measure_to_alpha(const UnitCircleMeasure& mu);

/// Inverse map: atoms are the roots of Phi_n and weights come from the
/// Christoffel sum. Throws std::runtime_error on root-finder failure.
UnitCircleMeasure alpha_to_measure(const CoefficientSequence& alphas);

/// b'_k = A_{b_{n-1}}(b_{n-k-1}) for k = 0..n-1.
HyperbolicPath reverse_path(const CoefficientSequence& gammas);

/// (eta alpha_0, ..., eta alpha_{n-1}) for |eta| = 1; result has the kind of
/// the input (modified input is converted through Verblunsky form).
CoefficientSequence aleksandrov_transform(const CoefficientSequence& seq, cplx eta);

}  // namespace sinepalm
