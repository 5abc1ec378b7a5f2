#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "enscal/core_data.hpp"
#include "enscal/distributions.hpp"

namespace enscal {

enum class BiasMode { linear, additive, none };

BiasMode parse_bias_mode(std::string_view text);
std::string to_string(BiasMode mode);

// Affine member correction f -> b0 + b1*f for one group.
// additive fixes b1 = 1; none fixes (b0, b1) = (0, 1).
struct BiasFit {
  double b0 = 0.0;
  double b1 = 1.0;
  bool fallback = false;  // linear requested but regressor degenerate
};

struct FitInfo {
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;     // one entry per EM iteration
  bool sigma_floored = false;
  bool mean_shifted = false;            // gamma: b0 raised for positivity
  int clamped_obs = 0;                  // gamma: observations clamped to 0.1
  std::vector<int> floored_weight_groups;
  std::vector<int> bias_fallback_groups;
  double mean_crps = 0.0;               // CRPS-fit variants only
};

// Weights are per member: member in group k carries weight[k], and
// sum_k M_k * weight[k] = 1.
struct BmaNormalModel {
  GroupingScheme grouping;
  BiasMode bias = BiasMode::linear;
  std::vector<BiasFit> bias_by_group;
  std::vector<double> weights;
  double sigma = 1.0;
  FitInfo info;
};

// Parsimonious gamma: mean coefficients shared by all members; component for
// member f has mean b0 + b1*f and sd c0 + c1*f.
struct BmaGammaModel {
  GroupingScheme grouping;
  double b0 = 0.0, b1 = 1.0;
  double c0 = 1.0, c1 = 0.0;
  std::vector<double> weights;
  FitInfo info;
};

// Zero-truncated normal components, all parameters from one likelihood
// ascent (EM with a numeric M-step).
struct BmaTruncNormalModel {
  GroupingScheme grouping;
  std::vector<BiasFit> location;  // per-group (b0, b1)
  std::vector<double> weights;
  double sigma = 1.0;
  FitInfo info;
};

struct EmOptions {
  double tol = 1e-8;       // stop when log-likelihood gain falls below
  int max_iter = 5000;
  int mstep_max_iter = 200;  // numeric M-steps (gamma, truncated normal)
  double mstep_tol = 1e-7;
};

struct BmaInit {
  std::vector<double> weights;  // per group, optional
  double sigma = 0.0;           // <= 0 means "derive from data"
};

// Per-group OLS of observation on pooled member values.
std::vector<BiasFit> fit_bias_regression(
    std::span<const ForecastCase* const> cases, const GroupingScheme& grouping,
    BiasMode mode);

BmaNormalModel fit_bma_normal_em(std::span<const ForecastCase* const> cases,
                                 const GroupingScheme& grouping, BiasMode bias,
                                 const EmOptions& opt = {},
                                 const std::optional<BmaInit>& init = {});

// Weights and sigma chosen to minimize mean mixture CRPS (quadrature);
// bias coefficients still come from the regression step.
BmaNormalModel fit_bma_normal_crps(std::span<const ForecastCase* const> cases,
                                   const GroupingScheme& grouping, BiasMode bias,
                                   const EmOptions& opt = {});

BmaGammaModel fit_bma_gamma(std::span<const ForecastCase* const> cases,
                            const GroupingScheme& grouping,
                            const EmOptions& opt = {},
                            const std::optional<BmaInit>& init = {});

BmaTruncNormalModel fit_bma_truncnormal_ml(
    std::span<const ForecastCase* const> cases, const GroupingScheme& grouping,
    const EmOptions& opt = {}, const std::optional<BmaInit>& init = {});

// M-component predictive mixture for one case. Components are ordered by
// group, members sorted ascending within each group (the canonical order
// that makes within-group permutations bit-exact no-ops).
MixtureDist predict_bma(const BmaNormalModel& model, const ForecastCase& c);
MixtureDist predict_bma(const BmaGammaModel& model, const ForecastCase& c);
MixtureDist predict_bma(const BmaTruncNormalModel& model, const ForecastCase& c);

}  // namespace enscal
