#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace enscal {

// ---- parameter families -------------------------------------------------

struct Normal {
  double mu = 0.0;
  double sigma = 1.0;  // > 0
};

// Normal truncated from below at 0 (parent N(mu, sigma^2) conditioned on
// x >= 0). mu is the parent location, not the truncated mean.
struct TruncNormal {
  double mu = 0.0;
  double sigma = 1.0;  // > 0
};

// Gamma parameterized by mean and standard deviation, both > 0.
// shape k = mean^2/sd^2, scale theta = sd^2/mean.
struct GammaMeanSd {
  double mean = 1.0;
  double sd = 1.0;
  double shape() const { return (mean / sd) * (mean / sd); }
  double scale() const { return sd * sd / mean; }
};

// ---- scalar special functions -------------------------------------------

double std_normal_pdf(double x);
double std_normal_cdf(double x);
// Inverse standard normal CDF; p in (0,1) required.
double std_normal_quantile(double p);
// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x); a > 0, x >= 0.
double lower_reg_gamma(double a, double x);
double upper_reg_gamma(double a, double x);

// ---- family operations ---------------------------------------------------

double pdf(const Normal& d, double x);
double cdf(const Normal& d, double x);
double quantile(const Normal& d, double p);
double pdf(const TruncNormal& d, double x);
double cdf(const TruncNormal& d, double x);
double quantile(const TruncNormal& d, double p);
double mean_of(const TruncNormal& d);
double pdf(const GammaMeanSd& d, double x);
double cdf(const GammaMeanSd& d, double x);
double quantile(const GammaMeanSd& d, double p);

double crps_closed(const Normal& d, double x);
double crps_closed(const TruncNormal& d, double x);

// ---- CRPS by adaptive quadrature (the independent route) -----------------

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 60;
};

// Integrates (F(t) - 1{t >= obs})^2 dt over the effective support, located
// by geometric expansion around obs until both tails are below 1e-13.
// Integration splits at obs and at every declared breakpoint. A step CDF
// must declare its jump locations: samples that all land between jumps
// would otherwise satisfy the Simpson error estimate with a wrong value.
double crps_quadrature(const std::function<double(double)>& cdf, double obs,
                       const QuadratureOptions& opt = {},
                       std::span<const double> breakpoints = {});

// ---- evaluable predictive distribution ------------------------------------

class Dist {
 public:
  virtual ~Dist() = default;
  virtual double pdf(double x) const = 0;
  virtual double cdf(double x) const = 0;
  virtual double quantile(double p) const = 0;
  virtual double mean() const = 0;
  // Default: quadrature of the defining integral; families with closed
  // forms override.
  virtual double crps(double obs) const;
};

double crps_quadrature(const Dist& dist, double obs,
                       const QuadratureOptions& opt = {});

class NormalDist final : public Dist {
 public:
  explicit NormalDist(Normal p) : p_(p) {}
  double pdf(double x) const override { return enscal::pdf(p_, x); }
  double cdf(double x) const override { return enscal::cdf(p_, x); }
  double quantile(double p) const override { return enscal::quantile(p_, p); }
  double mean() const override { return p_.mu; }
  double crps(double obs) const override { return crps_closed(p_, obs); }
  const Normal& params() const { return p_; }

 private:
  Normal p_;
};

class TruncNormalDist final : public Dist {
 public:
  explicit TruncNormalDist(TruncNormal p) : p_(p) {}
  double pdf(double x) const override { return enscal::pdf(p_, x); }
  double cdf(double x) const override { return enscal::cdf(p_, x); }
  double quantile(double p) const override { return enscal::quantile(p_, p); }
  double mean() const override { return mean_of(p_); }
  double crps(double obs) const override { return crps_closed(p_, obs); }
  const TruncNormal& params() const { return p_; }

 private:
  TruncNormal p_;
};

class GammaDist final : public Dist {
 public:
  explicit GammaDist(GammaMeanSd p) : p_(p) {}
  double pdf(double x) const override { return enscal::pdf(p_, x); }
  double cdf(double x) const override { return enscal::cdf(p_, x); }
  double quantile(double p) const override { return enscal::quantile(p_, p); }
  double mean() const override { return p_.mean; }
  const GammaMeanSd& params() const { return p_; }

 private:
  GammaMeanSd p_;
};

// Weighted mixture over component distributions. Weights must be >= 0 and
// sum to 1 within 1e-6; they are renormalized exactly for evaluation.
class MixtureDist final : public Dist {
 public:
  MixtureDist(std::vector<double> weights,
              std::vector<std::shared_ptr<const Dist>> components);
  double pdf(double x) const override;
  double cdf(double x) const override;
  // Bisection on the mixture CDF, absolute tolerance 1e-10.
  double quantile(double p) const override;
  double mean() const override;
  int component_count() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const Dist& component(int i) const { return *components_[i]; }

 private:
  std::vector<double> weights_;
  std::vector<std::shared_ptr<const Dist>> components_;
};

}  // namespace enscal
