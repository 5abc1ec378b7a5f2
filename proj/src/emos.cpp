#include "enscal/emos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "enscal/errors.hpp"
#include "enscal/optimize.hpp"

namespace enscal {

EnsembleStats ensemble_stats(std::span<const double> members,
                             const GroupingScheme& grouping) {
  if (static_cast<int>(members.size()) != grouping.member_count())
    fail_data("ensemble has " + std::to_string(members.size()) +
              " members, grouping expects " +
              std::to_string(grouping.member_count()));
  if (members.size() < 2) fail_data("ensemble statistics need at least 2 members");

  EnsembleStats st;
  std::vector<double> sorted;
  for (int k = 0; k < grouping.group_count(); ++k) {
    std::vector<double> vals;
    for (int idx : grouping.group(k)) vals.push_back(members[idx]);
    std::sort(vals.begin(), vals.end());
    double s = 0.0;
    for (double f : vals) s += f;
    st.group_sums.push_back(s);
    sorted.insert(sorted.end(), vals.begin(), vals.end());
  }
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double f : sorted) sum += f;
  double n = static_cast<double>(sorted.size());
  st.mean = sum / n;
  double ss = 0.0;
  for (double f : sorted) ss += (f - st.mean) * (f - st.mean);
  st.variance = ss / (n - 1.0);
  return st;
}

namespace {

struct FitCase {
  std::vector<double> sums;
  double s2 = 0.0;
  double obs = 0.0;
};

double case_crps(EmosFamily family, const FitCase& fc,
                 std::span<const double> a, double a0, double b0, double b1) {
  double mu = a0;
  for (size_t k = 0; k < fc.sums.size(); ++k) mu += a[k] * fc.sums[k];
  double var = b0 + b1 * fc.s2;
  if (!(var > 0.0)) return std::numeric_limits<double>::infinity();
  double sigma = std::sqrt(var);
  if (family == EmosFamily::normal)
    return crps_closed(Normal{mu, sigma}, fc.obs);
  if (std_normal_cdf(mu / sigma) < 1e-300)
    return std::numeric_limits<double>::infinity();
  return crps_closed(TruncNormal{mu, sigma}, fc.obs);
}

}  // namespace

EmosModel fit_emos(std::span<const ForecastCase* const> cases,
                   const GroupingScheme& grouping, EmosFamily family,
                   const EmosOptions& opt) {
  const int m = grouping.group_count();
  const int M = grouping.member_count();

  std::vector<FitCase> fc;
  for (const ForecastCase* c : cases) {
    if (!c->obs) continue;
    if (family == EmosFamily::truncnormal && *c->obs < 0.0)
      fail_data("truncated-normal model needs nonnegative observations");
    EnsembleStats st = ensemble_stats(c->members, grouping);
    fc.push_back({std::move(st.group_sums), st.variance, *c->obs});
  }
  if (static_cast<int>(fc.size()) < m + 3)
    fail_data("EMOS fit needs at least " + std::to_string(m + 3) +
              " observed cases, got " + std::to_string(fc.size()));

  // Start from the equal-weight ensemble-mean predictor: a_k = 1/M turns the
  // group sums into the plain ensemble mean.
  std::vector<double> a_init(m, 1.0 / M);
  double mean_obs = 0.0, mean_pred = 0.0;
  for (const FitCase& c : fc) {
    mean_obs += c.obs;
    for (double s : c.sums) mean_pred += s / M;
  }
  mean_obs /= static_cast<double>(fc.size());
  mean_pred /= static_cast<double>(fc.size());
  double a0_init = mean_obs - mean_pred;
  double ss = 0.0;
  for (const FitCase& c : fc) {
    double pred = a0_init;
    for (double s : c.sums) pred += s / M;
    ss += (c.obs - pred) * (c.obs - pred);
  }
  double b0_init = std::max(ss / static_cast<double>(fc.size()), 1e-6);
  double b1_init = 0.1;

  // Parameter order: a0 (identity), a_1..a_m, b0, b1 (square transforms).
  auto objective = [&](std::span<const double> p) {
    double total = 0.0;
    std::span<const double> a(p.data() + 1, m);
    for (const FitCase& c : fc)
      total += case_crps(family, c, a, p[0], p[m + 1], p[m + 2]);
    return total / static_cast<double>(fc.size());
  };

  ObjectiveSpec spec;
  spec.objective = objective;
  spec.transforms.assign(1, Transform::identity);
  spec.transforms.insert(spec.transforms.end(), m + 2, Transform::square);

  OptimResult res;
  int attempt = 0;
  for (;; ++attempt) {
    spec.initial.clear();
    spec.initial.push_back(a0_init);
    for (double ak : a_init) spec.initial.push_back(std::sqrt(ak));
    spec.initial.push_back(std::sqrt(b0_init));
    spec.initial.push_back(std::sqrt(b1_init));
    std::vector<double> start_con(spec.initial.size());
    for (size_t i = 0; i < spec.initial.size(); ++i)
      start_con[i] = to_constrained(spec.initial[i], spec.transforms[i]);
    if (std::isfinite(objective(start_con))) break;
    if (attempt >= 3)
      fail_numeric("EMOS initial point has non-finite mean CRPS");
    b0_init *= 10.0;  // widen until the starting density covers every case
  }
  res = minimize(spec, MinimizeOptions{opt.tol, opt.max_iter});

  EmosModel model;
  model.family = family;
  model.grouping = grouping;
  model.a0 = res.argmin[0];
  model.a.assign(res.argmin.begin() + 1, res.argmin.begin() + 1 + m);
  model.b0 = res.argmin[m + 1];
  model.b1 = res.argmin[m + 2];
  model.info.mean_crps = res.value;
  model.info.iterations = res.iterations;
  model.info.converged = res.converged;
  return model;
}

Normal emos_location_scale(const EmosModel& model,
                           std::span<const double> members) {
  EnsembleStats st = ensemble_stats(members, model.grouping);
  double mu = model.a0;
  for (size_t k = 0; k < st.group_sums.size(); ++k)
    mu += model.a[k] * st.group_sums[k];
  double var = model.b0 + model.b1 * st.variance;
  if (!(var > 0.0))
    fail_numeric("EMOS predictive variance is not positive (b0 + b1*S^2 = " +
                 std::to_string(var) + ")");
  return Normal{mu, std::sqrt(var)};
}

std::shared_ptr<const Dist> predict_emos(const EmosModel& model,
                                         const ForecastCase& c) {
  Normal n = emos_location_scale(model, c.members);
  if (model.family == EmosFamily::normal)
    return std::make_shared<NormalDist>(n);
  return std::make_shared<TruncNormalDist>(TruncNormal{n.mu, n.sigma});
}

}  // namespace enscal
