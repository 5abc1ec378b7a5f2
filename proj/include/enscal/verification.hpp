#pragma once

#include <span>
#include <vector>

#include "enscal/distributions.hpp"
#include "enscal/rng.hpp"

namespace enscal {

// Empirical-CDF CRPS, pairwise form:
// (1/M) sum |x_i - y| - (1/(2 M^2)) sum sum |x_i - x_j|.
double crps_ensemble(std::span<const double> members, double obs);

// Rank of obs among the members, 1..M+1, ties broken uniformly at random:
// rank = 1 + #{members strictly below obs} + U, U uniform on {0..#ties}.
int verification_rank(std::span<const double> members, double obs, Rng& rng);

// The predictive CDF at the observation.
double pit_value(const Dist& dist, double obs);

struct HistogramData {
  std::vector<double> edges;  // size counts.size() + 1
  std::vector<long> counts;
  long total = 0;
};

HistogramData rank_histogram(std::span<const int> ranks, int member_count);
HistogramData pit_histogram(std::span<const double> pits, int bins = 11);

struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

// Kolmogorov-Smirnov test against the uniform law on [0,1]; asymptotic
// p-value 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 n D^2), terms below 1e-12
// dropped, result clamped to [0,1].
KsResult ks_uniform_test(std::span<const double> values);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Central interval [quantile(alpha/2), quantile(1-alpha/2)], alpha = 1-level.
Interval central_interval(const Dist& dist, double level);

struct ScoreReport {
  int n_cases = 0;
  double mean_crps = 0.0;
  double mae_median = 0.0;
  double mae_mean = 0.0;
  double rmse_median = 0.0;
  double rmse_mean = 0.0;
  double avg_width = 0.0;
  double coverage = 0.0;  // fraction in [0,1]
  double level = 0.0;
};

ScoreReport score_report(std::span<const Dist* const> dists,
                         std::span<const double> point_medians,
                         std::span<const double> point_means,
                         std::span<const double> obs, double level);

// Upper tail of the chi-squared distribution; used by rank-uniformity checks.
double chi_squared_sf(double x, int dof);

}  // namespace enscal
