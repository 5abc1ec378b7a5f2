#pragma once

#include <functional>
#include <span>
#include <vector>

namespace enscal {

// Per-coordinate reparameterization: the simplex runs in unconstrained
// space, the objective sees constrained values.
enum class Transform { identity, square, logistic };

double to_constrained(double u, Transform t);
double to_unconstrained(double c, Transform t);

struct ObjectiveSpec {
  // Evaluated at constrained-space points.
  std::function<double(std::span<const double>)> objective;
  std::vector<Transform> transforms;
  // Initial point in unconstrained space; same length as transforms.
  std::vector<double> initial;
};

// Build an unconstrained initial vector from constrained values.
std::vector<double> unconstrained_initial(std::span<const double> constrained,
                                          std::span<const Transform> transforms);

struct OptimResult {
  std::vector<double> argmin;  // constrained space
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MinimizeOptions {
  double tol = 1e-8;       // simplex diameter AND value spread
  int max_iter = 10000;    // per start
};

// Nelder-Mead with one deterministic extra start (+10% per coordinate,
// 0.1 for zero coordinates); best of the two returned. Non-finite objective
// values during the search are treated as +inf (rejected); a non-finite
// value at the initial point is a setup error. Never returns a point worse
// than the initial one.
OptimResult minimize(const ObjectiveSpec& spec, const MinimizeOptions& opt = {});

}  // namespace enscal
