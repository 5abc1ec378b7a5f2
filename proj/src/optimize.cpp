#include "enscal/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "enscal/errors.hpp"

namespace enscal {

double to_constrained(double u, Transform t) {
  switch (t) {
    case Transform::identity: return u;
    case Transform::square: return u * u;
    case Transform::logistic: return 1.0 / (1.0 + std::exp(-u));
  }
  fail_numeric("unknown transform");
}

double to_unconstrained(double c, Transform t) {
  switch (t) {
    case Transform::identity:
      return c;
    case Transform::square:
      if (c < 0.0) fail_numeric("square transform needs a nonnegative value");
      return std::sqrt(c);
    case Transform::logistic:
      if (!(c > 0.0 && c < 1.0))
        fail_numeric("logistic transform needs a value in (0,1)");
      return std::log(c / (1.0 - c));
  }
  fail_numeric("unknown transform");
}

std::vector<double> unconstrained_initial(std::span<const double> constrained,
                                          std::span<const Transform> transforms) {
  if (constrained.size() != transforms.size())
    fail_numeric("transform/initial size mismatch");
  std::vector<double> u(constrained.size());
  for (size_t i = 0; i < u.size(); ++i)
    u[i] = to_unconstrained(constrained[i], transforms[i]);
  return u;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Run {
  std::vector<double> best;  // unconstrained
  double value = kInf;
  int iterations = 0;
  bool converged = false;
};

Run nelder_mead(const ObjectiveSpec& spec, std::span<const double> start,
                const MinimizeOptions& opt, bool initial_must_be_finite) {
  const size_t n = start.size();
  std::vector<double> scratch(n);
  auto eval = [&](const std::vector<double>& u) {
    for (size_t i = 0; i < n; ++i) scratch[i] = to_constrained(u[i], spec.transforms[i]);
    double v = spec.objective(std::span<const double>(scratch));
    return std::isfinite(v) ? v : kInf;
  };

  std::vector<std::vector<double>> x(n + 1, std::vector<double>(start.begin(), start.end()));
  for (size_t i = 0; i < n; ++i) {
    double& c = x[i + 1][i];
    c = (c != 0.0) ? c * 1.05 : 0.00025;
  }
  std::vector<double> f(n + 1);
  for (size_t i = 0; i <= n; ++i) f[i] = eval(x[i]);
  if (initial_must_be_finite && !std::isfinite(f[0]))
    fail_numeric("objective is not finite at the initial point");

  std::vector<size_t> ord(n + 1);
  std::vector<double> centroid(n), xr(n), trial(n);
  Run run;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    run.iterations = iter + 1;
    std::iota(ord.begin(), ord.end(), size_t{0});
    std::stable_sort(ord.begin(), ord.end(),
                     [&](size_t a, size_t b) { return f[a] < f[b]; });
    size_t lo = ord[0], hi = ord[n], nh = ord[n - 1];

    double diam = 0.0, spread = 0.0;
    for (size_t i = 0; i <= n; ++i) {
      if (std::isfinite(f[i])) spread = std::max(spread, f[i] - f[lo]);
      for (size_t j = 0; j < n; ++j)
        diam = std::max(diam, std::fabs(x[i][j] - x[lo][j]));
    }
    if (diam < opt.tol && spread < opt.tol && std::isfinite(f[lo])) {
      run.converged = true;
      break;
    }

    for (size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t i = 0; i <= n; ++i)
        if (i != hi) s += x[i][j];
      centroid[j] = s / static_cast<double>(n);
    }

    auto blend = [&](double coef, std::vector<double>& out) {
      for (size_t j = 0; j < n; ++j)
        out[j] = centroid[j] + coef * (centroid[j] - x[hi][j]);
    };

    blend(1.0, xr);
    double fr = eval(xr);
    if (fr < f[lo]) {
      blend(2.0, trial);
      double fe = eval(trial);
      if (fe < fr) {
        x[hi] = trial;
        f[hi] = fe;
      } else {
        x[hi] = xr;
        f[hi] = fr;
      }
    } else if (fr < f[nh]) {
      x[hi] = xr;
      f[hi] = fr;
    } else {
      if (fr < f[hi]) {
        blend(0.5, trial);  // outside contraction
      } else {
        blend(-0.5, trial);  // inside contraction
      }
      double fc = eval(trial);
      if (fc < std::min(fr, f[hi])) {
        x[hi] = trial;
        f[hi] = fc;
      } else {
        for (size_t i = 0; i <= n; ++i) {
          if (i == lo) continue;
          for (size_t j = 0; j < n; ++j)
            x[i][j] = x[lo][j] + 0.5 * (x[i][j] - x[lo][j]);
          f[i] = eval(x[i]);
        }
      }
    }
  }

  size_t lo = 0;
  for (size_t i = 1; i <= n; ++i)
    if (f[i] < f[lo]) lo = i;
  run.best = x[lo];
  run.value = f[lo];
  return run;
}

}  // namespace

OptimResult minimize(const ObjectiveSpec& spec, const MinimizeOptions& opt) {
  if (spec.initial.size() != spec.transforms.size())
    fail_numeric("transform/initial size mismatch");
  if (!spec.objective) fail_numeric("missing objective");
  if (spec.initial.empty()) fail_numeric("empty parameter vector");

  Run first = nelder_mead(spec, spec.initial, opt, true);

  std::vector<double> alt(spec.initial);
  for (double& c : alt) c = (c != 0.0) ? c * 1.1 : 0.1;
  Run second = nelder_mead(spec, alt, opt, false);

  const Run& best = (second.value < first.value) ? second : first;

  // Guard against pathological searches: keep the caller's point if we never
  // improved on it.
  std::vector<double> init_con(spec.initial.size());
  for (size_t i = 0; i < init_con.size(); ++i)
    init_con[i] = to_constrained(spec.initial[i], spec.transforms[i]);
  double init_val = spec.objective(std::span<const double>(init_con));

  OptimResult out;
  out.iterations = first.iterations + second.iterations;
  out.converged = first.converged || second.converged;
  if (std::isfinite(init_val) && init_val < best.value) {
    out.argmin = init_con;
    out.value = init_val;
  } else {
    out.argmin.resize(best.best.size());
    for (size_t i = 0; i < best.best.size(); ++i)
      out.argmin[i] = to_constrained(best.best[i], spec.transforms[i]);
    out.value = best.value;
  }
  return out;
}

}  // namespace enscal
