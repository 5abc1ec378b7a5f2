#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "enscal/errors.hpp"
#include "enscal/optimize.hpp"

using namespace enscal;

namespace {

// Bare-bones reference simplex method, written independently of the library
// implementation (no transforms, fixed unit initial offsets) so Rosenbrock
// results can be cross-checked between two codebases.
std::vector<double> reference_simplex(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, int max_iter) {
  size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (size_t i = 0; i < n; ++i) pts[i + 1][i] += 0.5;
  std::vector<double> val(n + 1);
  for (size_t i = 0; i <= n; ++i) val[i] = f(pts[i]);

  for (int it = 0; it < max_iter; ++it) {
    size_t lo = 0, hi = 0, nh = 0;
    for (size_t i = 1; i <= n; ++i) {
      if (val[i] < val[lo]) lo = i;
      if (val[i] > val[hi]) hi = i;
    }
    for (size_t i = 0; i <= n; ++i)
      if (i != hi && val[i] > val[nh]) nh = i;
    if (std::abs(val[hi] - val[lo]) < 1e-13) break;

    std::vector<double> cen(n, 0.0);
    for (size_t i = 0; i <= n; ++i)
      if (i != hi)
        for (size_t j = 0; j < n; ++j) cen[j] += pts[i][j] / double(n);

    auto at = [&](double t) {
      std::vector<double> p(n);
      for (size_t j = 0; j < n; ++j) p[j] = cen[j] + t * (pts[hi][j] - cen[j]);
      return p;
    };
    std::vector<double> refl = at(-1.0);
    double fr = f(refl);
    if (fr < val[lo]) {
      std::vector<double> exp2 = at(-2.0);
      double fe = f(exp2);
      if (fe < fr) { pts[hi] = exp2; val[hi] = fe; }
      else { pts[hi] = refl; val[hi] = fr; }
    } else if (fr < val[nh]) {
      pts[hi] = refl; val[hi] = fr;
    } else {
      std::vector<double> con = at(0.5);
      double fc = f(con);
      if (fc < val[hi]) { pts[hi] = con; val[hi] = fc; }
      else {
        for (size_t i = 0; i <= n; ++i) {
          if (i == lo) continue;
          for (size_t j = 0; j < n; ++j)
            pts[i][j] = pts[lo][j] + 0.5 * (pts[i][j] - pts[lo][j]);
          val[i] = f(pts[i]);
        }
      }
    }
  }
  size_t lo = 0;
  for (size_t i = 1; i <= n; ++i)
    if (val[i] < val[lo]) lo = i;
  return pts[lo];
}

double rosenbrock(std::span<const double> x) {
  double a = 1.0 - x[0];
  double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST_CASE("transform round-trips") {
  for (Transform t : {Transform::identity, Transform::square, Transform::logistic}) {
    for (double c : {0.1, 0.5, 0.9}) {
      CAPTURE(int(t));
      CAPTURE(c);
      CHECK(to_constrained(to_unconstrained(c, t), t) ==
            doctest::Approx(c).epsilon(1e-12));
    }
  }
  CHECK(to_constrained(-2.0, Transform::square) == doctest::Approx(4.0));
  CHECK(to_constrained(0.0, Transform::logistic) == doctest::Approx(0.5));
  CHECK_THROWS_AS(to_unconstrained(-1.0, Transform::square), Error);
  CHECK_THROWS_AS(to_unconstrained(1.5, Transform::logistic), Error);
}

TEST_CASE("quadratic bowl") {
  ObjectiveSpec spec;
  spec.objective = [](std::span<const double> x) {
    return (x[0] - 3.0) * (x[0] - 3.0);
  };
  spec.transforms = {Transform::identity};
  spec.initial = {0.0};
  OptimResult r = minimize(spec);
  CHECK(r.converged);
  CHECK(r.argmin[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.value <= spec.objective(std::vector<double>{0.0}));
}

TEST_CASE("boundary optimum through the square transform") {
  ObjectiveSpec spec;
  spec.objective = [](std::span<const double> x) {
    return x[0] * x[0] + x[1] * x[1];
  };
  spec.transforms = {Transform::square, Transform::square};
  spec.initial = unconstrained_initial(std::vector<double>{1.0, 1.0},
                                       spec.transforms);
  OptimResult r = minimize(spec);
  CHECK(r.argmin[0] == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(r.argmin[1] == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(r.argmin[0] >= 0.0);
  CHECK(r.argmin[1] >= 0.0);
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("Rosenbrock matches an independent simplex implementation") {
  ObjectiveSpec spec;
  spec.objective = rosenbrock;
  spec.transforms = {Transform::identity, Transform::identity};
  spec.initial = {-1.2, 1.0};
  OptimResult r = minimize(spec, {1e-10, 5000});
  CHECK(r.argmin[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.argmin[1] == doctest::Approx(1.0).epsilon(1e-4));

  std::vector<double> ref = reference_simplex(
      [](const std::vector<double>& v) { return rosenbrock(v); },
      {-1.2, 1.0}, 5000);
  CHECK(ref[0] == doctest::Approx(r.argmin[0]).epsilon(1e-3));
  CHECK(ref[1] == doctest::Approx(r.argmin[1]).epsilon(1e-3));
}

TEST_CASE("restart stability") {
  ObjectiveSpec spec;
  spec.objective = [](std::span<const double> x) {
    return std::pow(x[0] - 0.7, 2) + std::pow(x[1] + 1.4, 4);
  };
  spec.transforms = {Transform::identity, Transform::identity};
  spec.initial = {5.0, 5.0};
  MinimizeOptions opt{1e-9, 10000};
  OptimResult first = minimize(spec, opt);
  spec.initial = unconstrained_initial(first.argmin, spec.transforms);
  OptimResult second = minimize(spec, opt);
  CHECK(std::abs(second.value - first.value) < 1e-9);
  CHECK(second.value <= first.value + 1e-15);
}

TEST_CASE("non-finite handling") {
  ObjectiveSpec spec;
  spec.objective = [](std::span<const double> x) {
    return std::numeric_limits<double>::quiet_NaN() + x[0];
  };
  spec.transforms = {Transform::identity};
  spec.initial = {1.0};
  CHECK_THROWS_AS(minimize(spec), Error);

  // A pole away from the start is stepped around, not fatal.
  ObjectiveSpec pole;
  pole.objective = [](std::span<const double> x) {
    if (x[0] < 0.0) return std::numeric_limits<double>::infinity();
    return (x[0] - 2.0) * (x[0] - 2.0);
  };
  pole.transforms = {Transform::identity};
  pole.initial = {0.5};
  OptimResult r = minimize(pole);
  CHECK(r.argmin[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("never returns a point worse than the initial one") {
  // Objective with a deceptive plateau: the simplex may wander, but the
  // contract pins the result to at most the starting value.
  ObjectiveSpec spec;
  spec.objective = [](std::span<const double> x) {
    return std::atan(std::abs(x[0] - 1.0)) + 0.1 * std::abs(x[1]);
  };
  spec.transforms = {Transform::identity, Transform::identity};
  spec.initial = {1.0, 0.0};  // already the optimum
  OptimResult r = minimize(spec, {1e-8, 50});
  double initial_value = spec.objective(std::vector<double>{1.0, 0.0});
  CHECK(r.value <= initial_value + 1e-15);
}
