#include "enscal/verification.hpp"

#include <algorithm>
#include <cmath>

#include "enscal/errors.hpp"

namespace enscal {

double crps_ensemble(std::span<const double> members, double obs) {
  if (members.empty()) fail_data("empty ensemble");
  if (!std::isfinite(obs)) fail_numeric("non-finite observation");
  std::vector<double> x(members.begin(), members.end());
  for (double v : x)
    if (!std::isfinite(v)) fail_numeric("non-finite ensemble member");
  std::sort(x.begin(), x.end());
  const double M = static_cast<double>(x.size());

  double abs_err = 0.0;
  for (double v : x) abs_err += std::fabs(v - obs);

  // sum_{i<j} (x_j - x_i) via prefix sums of the sorted values.
  double spread = 0.0, prefix = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    spread += static_cast<double>(i) * x[i] - prefix;
    prefix += x[i];
  }
  return abs_err / M - spread / (M * M);
}

int verification_rank(std::span<const double> members, double obs, Rng& rng) {
  if (members.empty()) fail_data("empty ensemble");
  long below = 0, ties = 0;
  for (double v : members) {
    if (v < obs) ++below;
    else if (v == obs) ++ties;
  }
  long offset = ties > 0 ? static_cast<long>(rng.below(ties + 1)) : 0;
  return static_cast<int>(1 + below + offset);
}

double pit_value(const Dist& dist, double obs) { return dist.cdf(obs); }

HistogramData rank_histogram(std::span<const int> ranks, int member_count) {
  if (member_count < 1) fail_data("member count must be positive");
  HistogramData h;
  h.counts.assign(member_count + 1, 0);
  for (int i = 0; i <= member_count + 1; ++i)
    h.edges.push_back(i + 0.5);
  for (int r : ranks) {
    if (r < 1 || r > member_count + 1)
      fail_data("rank " + std::to_string(r) + " outside 1.." +
                std::to_string(member_count + 1));
    ++h.counts[r - 1];
    ++h.total;
  }
  return h;
}

HistogramData pit_histogram(std::span<const double> pits, int bins) {
  if (bins < 1) fail_config("PIT histogram needs at least 1 bin");
  HistogramData h;
  h.counts.assign(bins, 0);
  for (int i = 0; i <= bins; ++i)
    h.edges.push_back(static_cast<double>(i) / bins);
  for (double p : pits) {
    if (!(p >= 0.0 && p <= 1.0))
      fail_data("PIT value outside [0,1]: " + std::to_string(p));
    int b = std::min(static_cast<int>(p * bins), bins - 1);
    ++h.counts[b];
    ++h.total;
  }
  return h;
}

KsResult ks_uniform_test(std::span<const double> values) {
  if (values.empty()) fail_data("KS test needs at least one value");
  std::vector<double> x(values.begin(), values.end());
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0))
      fail_data("KS input outside [0,1]: " + std::to_string(v));
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());

  double d_plus = 0.0, d_minus = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    d_plus = std::max(d_plus, (static_cast<double>(i) + 1.0) / n - x[i]);
    d_minus = std::max(d_minus, x[i] - static_cast<double>(i) / n);
  }
  KsResult r;
  r.d = std::max(d_plus, d_minus);

  double lambda = std::sqrt(n) * r.d;
  double p = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100000; ++j) {
    double term = std::exp(-2.0 * j * j * lambda * lambda);
    if (term < 1e-12) break;
    p += 2.0 * sign * term;
    sign = -sign;
  }
  r.p = std::clamp(p, 0.0, 1.0);
  return r;
}

Interval central_interval(const Dist& dist, double level) {
  if (!(level > 0.0 && level < 1.0))
    fail_config("interval level must be in (0,1)");
  double alpha = 1.0 - level;
  Interval iv;
  iv.lo = dist.quantile(0.5 * alpha);
  iv.hi = dist.quantile(1.0 - 0.5 * alpha);
  return iv;
}

ScoreReport score_report(std::span<const Dist* const> dists,
                         std::span<const double> point_medians,
                         std::span<const double> point_means,
                         std::span<const double> obs, double level) {
  const size_t n = dists.size();
  if (n == 0) fail_data("score report needs at least one case");
  if (point_medians.size() != n || point_means.size() != n || obs.size() != n)
    fail_data("score report inputs have mismatched lengths");

  ScoreReport rep;
  rep.n_cases = static_cast<int>(n);
  rep.level = level;
  double se_median = 0.0, se_mean = 0.0;
  long covered = 0;
  for (size_t i = 0; i < n; ++i) {
    rep.mean_crps += dists[i]->crps(obs[i]);
    rep.mae_median += std::fabs(point_medians[i] - obs[i]);
    rep.mae_mean += std::fabs(point_means[i] - obs[i]);
    se_median += (point_medians[i] - obs[i]) * (point_medians[i] - obs[i]);
    se_mean += (point_means[i] - obs[i]) * (point_means[i] - obs[i]);
    Interval iv = central_interval(*dists[i], level);
    rep.avg_width += iv.hi - iv.lo;
    if (obs[i] >= iv.lo && obs[i] <= iv.hi) ++covered;
  }
  double dn = static_cast<double>(n);
  rep.mean_crps /= dn;
  rep.mae_median /= dn;
  rep.mae_mean /= dn;
  rep.rmse_median = std::sqrt(se_median / dn);
  rep.rmse_mean = std::sqrt(se_mean / dn);
  rep.avg_width /= dn;
  rep.coverage = static_cast<double>(covered) / dn;
  return rep;
}

double chi_squared_sf(double x, int dof) {
  if (dof < 1) fail_numeric("chi-squared needs dof >= 1");
  if (x <= 0.0) return 1.0;
  return upper_reg_gamma(0.5 * dof, 0.5 * x);
}

}  // namespace enscal
