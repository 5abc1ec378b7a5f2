#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "enscal/emos.hpp"
#include "enscal/errors.hpp"
#include "enscal/rng.hpp"

using namespace enscal;

namespace {

std::vector<const ForecastCase*> ptrs(const std::vector<ForecastCase>& cases) {
  std::vector<const ForecastCase*> out;
  for (const ForecastCase& c : cases) out.push_back(&c);
  return out;
}

ForecastCase make_case(int i, std::vector<double> members, double obs) {
  ForecastCase c;
  c.date = Date::from_ymd(2020, 1, 1).plus_days(i);
  c.station = "S";
  c.obs = obs;
  c.members = std::move(members);
  return c;
}

// obs ~ N(a0 + amean * fbar, b0 + b1 * S^2): the EMOS normal model itself.
std::vector<ForecastCase> draw_emos(int n, double a0, double amean, double b0,
                                    double b1, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ForecastCase> cases;
  for (int i = 0; i < n; ++i) {
    double t = rng.normal(285.0, 5.0);
    std::vector<double> members(8);
    for (double& f : members) f = t + rng.normal(0.0, 2.0);
    GroupingScheme g = make_grouping("exchangeable", 8);
    EnsembleStats st = ensemble_stats(members, g);
    double y = rng.normal(a0 + amean * st.mean,
                          std::sqrt(b0 + b1 * st.variance));
    cases.push_back(make_case(i, std::move(members), y));
  }
  return cases;
}

double window_mean_crps(const EmosModel& m,
                        const std::vector<ForecastCase>& cases) {
  double acc = 0.0;
  for (const ForecastCase& c : cases)
    acc += predict_emos(m, c)->crps(*c.obs);
  return acc / static_cast<double>(cases.size());
}

}  // namespace

TEST_CASE("ensemble statistics") {
  GroupingScheme one = make_grouping("exchangeable", 3);
  EnsembleStats st = ensemble_stats(std::vector<double>{1.0, 2.0, 3.0}, one);
  CHECK(st.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(st.variance == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(st.group_sums.size() == 1);
  CHECK(st.group_sums[0] == doctest::Approx(6.0).epsilon(1e-15));

  SUBCASE("zero spread") {
    EnsembleStats z = ensemble_stats(std::vector<double>{4.0, 4.0, 4.0}, one);
    CHECK(z.variance == 0.0);
  }

  SUBCASE("two-group sums for members 1..11") {
    GroupingScheme two = make_grouping("two_group", 11);
    std::vector<double> m(11);
    for (int i = 0; i < 11; ++i) m[i] = i + 1.0;
    EnsembleStats s = ensemble_stats(m, two);
    CHECK(s.group_sums[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.group_sums[1] == doctest::Approx(65.0).epsilon(1e-15));
    CHECK(s.mean == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(s.variance == doctest::Approx(11.0).epsilon(1e-15));
  }

  SUBCASE("member order never changes the stats") {
    GroupingScheme two = make_grouping("two_group", 5);
    std::vector<double> a{3.0, 1.0, 4.0, 1.5, 9.0};
    std::vector<double> b{3.0, 9.0, 1.5, 4.0, 1.0};  // perturbed reordered
    EnsembleStats sa = ensemble_stats(a, two);
    EnsembleStats sb = ensemble_stats(b, two);
    CHECK(sa.group_sums == sb.group_sums);
    CHECK(sa.mean == sb.mean);
    CHECK(sa.variance == sb.variance);
  }
}

TEST_CASE("EMOS fit tracks its generator") {
  std::vector<ForecastCase> cases = draw_emos(3000, 1.0, 1.0, 1.0, 1.0, 42);
  GroupingScheme g = make_grouping("exchangeable", 8);
  EmosModel m = fit_emos(ptrs(cases), g, EmosFamily::normal);

  // The generator's own mean CRPS on this window is the optimum in the
  // large-sample limit; the fit must come within 2%.
  EmosModel truth;
  truth.family = EmosFamily::normal;
  truth.grouping = g;
  truth.a0 = 1.0;
  truth.a = {1.0 / 8.0};  // amean applied through the group sum
  truth.b0 = 1.0;
  truth.b1 = 1.0;
  double fitted = window_mean_crps(m, cases);
  double oracle = window_mean_crps(truth, cases);
  CHECK(fitted <= oracle * 1.02);
  CHECK(fitted <= m.info.mean_crps + 1e-12);  // reported value is the optimum
  CHECK(m.info.mean_crps == doctest::Approx(fitted).epsilon(1e-9));

  SUBCASE("coefficients are nonnegative by construction") {
    CHECK(m.a[0] >= 0.0);
    CHECK(m.b0 >= 0.0);
    CHECK(m.b1 >= 0.0);
  }
}

TEST_CASE("EMOS near-deterministic recovery") {
  // Tiny noise pins the location coefficients.
  Rng rng(7);
  std::vector<ForecastCase> cases;
  GroupingScheme g = make_grouping("two_group", 4);
  for (int i = 0; i < 200; ++i) {
    double t = rng.normal(10.0, 3.0);
    std::vector<double> members(4);
    for (double& f : members) f = t + rng.normal(0.0, 1.0);
    EnsembleStats st = ensemble_stats(members, g);
    double y = 2.0 + 0.5 * st.group_sums[0] + 0.2 * st.group_sums[1] +
               rng.normal(0.0, 1e-3);
    cases.push_back(make_case(i, std::move(members), y));
  }
  EmosModel m = fit_emos(ptrs(cases), g, EmosFamily::normal);
  CHECK(std::abs(m.a[0] - 0.5) < 0.01);
  CHECK(std::abs(m.a[1] - 0.2) < 0.01);
  CHECK(std::abs(m.a0 - 2.0) < 0.05);
  // Residual noise of 1e-3 leaves almost no predictive variance.
  EnsembleStats st0 = ensemble_stats(cases[0].members, g);
  CHECK(m.b0 + m.b1 * st0.variance < 1e-3);
}

TEST_CASE("EMOS invariances") {
  std::vector<ForecastCase> cases = draw_emos(60, 0.5, 1.0, 2.0, 0.5, 13);
  GroupingScheme g = make_grouping("two_group", 8);
  EmosModel m = fit_emos(ptrs(cases), g, EmosFamily::normal);

  SUBCASE("within-group permutation leaves fit and prediction unchanged") {
    std::vector<ForecastCase> perm = cases;
    for (ForecastCase& c : perm)
      std::reverse(c.members.begin() + 1, c.members.end());
    EmosModel m2 = fit_emos(ptrs(perm), g, EmosFamily::normal);
    CHECK(m2.a0 == m.a0);
    CHECK(m2.a == m.a);
    CHECK(m2.b0 == m.b0);
    CHECK(m2.b1 == m.b1);
    Normal p1 = emos_location_scale(m, cases[0].members);
    Normal p2 = emos_location_scale(m2, perm[0].members);
    CHECK(p1.mu == p2.mu);
    CHECK(p1.sigma == p2.sigma);
  }

  SUBCASE("normal predictive mean equals its median") {
    for (int i = 0; i < 5; ++i) {
      auto d = predict_emos(m, cases[i]);
      CHECK(std::abs(d->mean() - d->quantile(0.5)) < 1e-9);
    }
  }

  SUBCASE("fitted mean CRPS never exceeds the initial point's") {
    // The optimizer contract: info.mean_crps is the achieved optimum and the
    // equal-weight warm start can only be as good or worse.
    EmosModel start;
    start.family = EmosFamily::normal;
    start.grouping = g;
    double mean_obs = 0.0, mean_pred = 0.0;
    for (const ForecastCase& c : cases) {
      EnsembleStats st = ensemble_stats(c.members, g);
      mean_obs += *c.obs;
      double p = 0.0;
      for (double s : st.group_sums) p += s / 8.0;
      mean_pred += p;
    }
    mean_obs /= cases.size();
    mean_pred /= cases.size();
    start.a = {1.0 / 8.0, 1.0 / 8.0};
    start.a0 = mean_obs - mean_pred;
    double ss = 0.0;
    for (const ForecastCase& c : cases) {
      EnsembleStats st = ensemble_stats(c.members, g);
      double mu = start.a0 + st.group_sums[0] / 8.0 + st.group_sums[1] / 8.0;
      ss += (*c.obs - mu) * (*c.obs - mu);
    }
    start.b0 = std::max(ss / cases.size(), 1e-6);
    start.b1 = 0.1;
    CHECK(m.info.mean_crps <= window_mean_crps(start, cases) + 1e-12);
  }
}

TEST_CASE("truncated EMOS") {
  Rng rng(29);
  std::vector<ForecastCase> cases;
  GroupingScheme g = make_grouping("exchangeable", 6);
  for (int i = 0; i < 400; ++i) {
    double t = std::max(rng.normal(4.0, 2.0), 0.0);
    std::vector<double> members(6);
    for (double& f : members) f = std::max(t + rng.normal(0.0, 1.0), 0.0);
    EnsembleStats st = ensemble_stats(members, g);
    double y = rng.trunc_normal(0.5 + 0.9 * st.mean,
                                std::sqrt(1.0 + 0.3 * st.variance));
    cases.push_back(make_case(i, std::move(members), y));
  }
  EmosModel m = fit_emos(ptrs(cases), g, EmosFamily::truncnormal);
  CHECK(m.family == EmosFamily::truncnormal);

  auto d = predict_emos(m, cases[0]);
  CHECK(d->cdf(-0.1) == 0.0);
  CHECK(d->cdf(1e9) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("negative observations are a data error") {
    std::vector<ForecastCase> bad = cases;
    bad[0].obs = -0.2;
    CHECK_THROWS_AS(fit_emos(ptrs(bad), g, EmosFamily::truncnormal), Error);
  }
}

TEST_CASE("EMOS preconditions and degeneracies") {
  GroupingScheme g = make_grouping("two_group", 4);

  SUBCASE("window smaller than m+3 observed cases is a data error") {
    Rng rng(3);
    std::vector<ForecastCase> cases;
    for (int i = 0; i < 4; ++i) {  // m+3 = 5 needed
      std::vector<double> members{1.0, 2.0, 3.0, 4.0};
      cases.push_back(make_case(i, std::move(members), rng.normal(2.0, 1.0)));
    }
    CHECK_THROWS_AS(fit_emos(ptrs(cases), g, EmosFamily::normal), Error);
  }

  SUBCASE("zero predictive variance is a numeric error") {
    EmosModel m;
    m.family = EmosFamily::normal;
    m.grouping = g;
    m.a0 = 0.0;
    m.a = {1.0, 1.0};
    m.b0 = 0.0;
    m.b1 = 0.5;
    ForecastCase c = make_case(0, {2.0, 2.0, 2.0, 2.0}, 2.0);  // S^2 = 0
    CHECK_THROWS_AS(predict_emos(m, c), Error);
  }

  SUBCASE("constant-variance model: sigma is sqrt(b0) everywhere") {
    EmosModel m;
    m.family = EmosFamily::normal;
    m.grouping = make_grouping("exchangeable", 2);
    m.a0 = 0.0;
    m.a = {0.5};
    m.b0 = 4.0;
    m.b1 = 0.0;
    ForecastCase tight = make_case(0, {1.0, 1.0}, 1.0);
    ForecastCase wide = make_case(1, {-3.0, 5.0}, 1.0);
    Normal pt = emos_location_scale(m, tight.members);
    Normal pw = emos_location_scale(m, wide.members);
    CHECK(pt.sigma == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(pw.sigma == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(pt.mu == doctest::Approx(1.0).epsilon(1e-15));
  }

  SUBCASE("direct substitution: zero members give Normal(a0, sqrt(b0))") {
    EmosModel m;
    m.family = EmosFamily::normal;
    m.grouping = make_grouping("exchangeable", 3);
    m.a0 = 0.0;
    m.a = {1.0};
    m.b0 = 1.0;
    m.b1 = 0.0;
    ForecastCase c = make_case(0, {0.0, 0.0, 0.0}, 0.0);
    Normal p = emos_location_scale(m, c.members);
    CHECK(p.mu == 0.0);
    CHECK(p.sigma == 1.0);
  }
}
