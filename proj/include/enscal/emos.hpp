#pragma once

#include <memory>
#include <span>
#include <vector>

#include "enscal/bma.hpp"
#include "enscal/core_data.hpp"
#include "enscal/distributions.hpp"

namespace enscal {

enum class EmosFamily { normal, truncnormal };

struct EnsembleStats {
  std::vector<double> group_sums;
  double mean = 0.0;
  double variance = 0.0;  // unbiased, divisor M-1
};

// Sums run over members sorted ascending (within group, and over the whole
// ensemble for mean/variance) so member order never changes the result.
EnsembleStats ensemble_stats(std::span<const double> members,
                             const GroupingScheme& grouping);

struct EmosModel {
  EmosFamily family = EmosFamily::normal;
  GroupingScheme grouping;
  double a0 = 0.0;
  std::vector<double> a;  // per group, >= 0 by construction
  double b0 = 0.0, b1 = 0.0;  // >= 0 by construction
  FitInfo info;
};

struct EmosOptions {
  double tol = 1e-8;
  int max_iter = 10000;
};

// Minimum mean closed-form CRPS over the window's observed cases.
EmosModel fit_emos(std::span<const ForecastCase* const> cases,
                   const GroupingScheme& grouping, EmosFamily family,
                   const EmosOptions& opt = {});

// mu = a0 + sum_k a_k * (group k sum), sigma^2 = b0 + b1 * S^2.
Normal emos_location_scale(const EmosModel& model,
                           std::span<const double> members);
std::shared_ptr<const Dist> predict_emos(const EmosModel& model,
                                         const ForecastCase& c);

}  // namespace enscal
