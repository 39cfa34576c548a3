#pragma once

// Goodness-of-fit machinery: Kolmogorov-Smirnov tests (one-sample, two-sample
// and importance-weighted), Pearson chi-square on polar disk histograms,
// rejection sampling from disk densities, and a distance-covariance
// independence test.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sinepalm/rng.hpp"

namespace sinepalm {

/// Level used by every automated test.
inline constexpr double kSignificance = 0.001;

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t sample_size = 0;
  bool pass = false;
  std::string notes;
};

/// Builds a report with pass = statistic < threshold.
TestReport make_report(std::string name, double statistic, double threshold,
                       std::size_t sample_size, std::string notes = {});

/// Upper quantile of the Kolmogorov distribution: P(K > c) = level.
double kolmogorov_quantile(double level = kSignificance);

/// sup |F_n - F| against an analytic CDF; threshold c / sqrt(n).
TestReport ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                   double level = kSignificance);

/// sup |F_n - G_m|; threshold c sqrt((n+m)/(nm)).
TestReport ks_test(std::vector<double> a, std::vector<double> b, double level = kSignificance);

/// Weighted empirical CDFs on both sides; sample sizes in the threshold are
/// the effective sizes (sum w)^2 / sum w^2.
TestReport ks_test_weighted(const std::vector<double>& a, const std::vector<double>& wa,
                            const std::vector<double>& b, const std::vector<double>& wb,
                            double level = kSignificance);

using DiskDensity = std::function<double(std::complex<double>)>;

struct PolarBins {
  std::size_t radial = 8;   // equal-area rings
  std::size_t angular = 16;  // equal sectors with an edge at angle 0
};

/// Cell probabilities of an unnormalized disk density on the polar grid,
/// summing to 1. Cells touching z = 1 are refined dyadically. Throws
/// std::runtime_error when two quadrature orders disagree on the total mass
/// by more than 1e-6 relative.
std::vector<double> disk_cell_probabilities(const DiskDensity& density, PolarBins bins);

/// Index of the polar cell holding z (points with |z| >= 1 go to the outer ring).
std::size_t disk_cell_index(std::complex<double> z, PolarBins bins);

/// Pearson statistic against the cell probabilities, merging cells whose
/// expected count is below 5; threshold is the chi-square quantile.
TestReport chi2_hist2d(const std::vector<std::complex<double>>& samples,
                       const DiskDensity& density, PolarBins bins = {},
                       double level = kSignificance);

struct RejectionResult {
  std::vector<std::complex<double>> draws;
  std::size_t proposals = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(draws.size()) / static_cast<double>(proposals);
  }
};

/// Uniform proposals on the disk |z| < radius, accepted with probability
/// density(z) / (bound * q(z)) where q = 1/(pi radius^2). Throws
/// std::runtime_error("envelope violation ...") naming the witness point.
RejectionResult rejection_sample(const DiskDensity& density, double bound, std::size_t count,
                                 Rng& rng, double radius = 1.0,
                                 std::size_t max_proposals = 100'000'000);

/// Distance-covariance independence test between paired vectors. The
/// statistic n V_n^2 / S_2 is compared with the conservative bound
/// (Phi^{-1}(1 - level/2))^2.
TestReport independence_test(const std::vector<std::vector<double>>& x,
                             const std::vector<std::vector<double>>& y,
                             double level = kSignificance);

/// sup_x |F(x) - G(x)| for two continuous CDFs on (0, upper), found by a
/// dense scan refined by golden-section search.
double cdf_distance(const std::function<double(double)>& f,
                    const std::function<double(double)>& g, double upper,
                    std::size_t scan = 20000);

}  // namespace sinepalm
