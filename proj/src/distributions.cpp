#include "enscal/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "enscal/errors.hpp"

namespace enscal {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kInvSqrtPi = 0.5641895835477563;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) fail_numeric(std::string("non-finite ") + what);
}

void require_prob(double p) {
  if (!(p > 0.0 && p < 1.0))
    fail_numeric("probability outside (0,1): " + std::to_string(p));
}

void validate(const Normal& d) {
  require_finite(d.mu, "normal mu");
  if (!(d.sigma > 0.0) || !std::isfinite(d.sigma))
    fail_numeric("normal sigma must be positive");
}

void validate(const TruncNormal& d) {
  require_finite(d.mu, "truncated-normal mu");
  if (!(d.sigma > 0.0) || !std::isfinite(d.sigma))
    fail_numeric("truncated-normal sigma must be positive");
}

// Mass of the parent normal above the cutoff; the guard keeps downstream
// divisions meaningful.
double trunc_mass(const TruncNormal& d) {
  double p = std_normal_cdf(d.mu / d.sigma);
  if (p < 1e-300)
    fail_numeric("degenerate truncated normal: mass above 0 underflows");
  return p;
}

void validate(const GammaMeanSd& d) {
  if (!(d.mean > 0.0) || !std::isfinite(d.mean))
    fail_numeric("gamma mean must be positive");
  if (!(d.sd > 0.0) || !std::isfinite(d.sd))
    fail_numeric("gamma sd must be positive");
}

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_quantile(double p) {
  require_prob(p);
  // Rational initial approximation (relative error < 1.2e-9) followed by one
  // Halley step against the erfc-based CDF.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (std::fabs(x) < 37.0) {
    double e = std_normal_cdf(x) - p;
    double u = e / std_normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

namespace {

// Regularized incomplete gamma, split at x = a+1: power series for the lower
// part, continued fraction (modified Lentz) for the upper.
double gamma_series_lower(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 2000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-17)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  fail_numeric("incomplete gamma series did not converge");
}

double gamma_cf_upper(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 2000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-17)
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  fail_numeric("incomplete gamma continued fraction did not converge");
}

}  // namespace

double lower_reg_gamma(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) fail_numeric("incomplete gamma: a must be > 0");
  if (!(x >= 0.0)) fail_numeric("incomplete gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series_lower(a, x);
  return 1.0 - gamma_cf_upper(a, x);
}

double upper_reg_gamma(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) fail_numeric("incomplete gamma: a must be > 0");
  if (!(x >= 0.0)) fail_numeric("incomplete gamma: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series_lower(a, x);
  return gamma_cf_upper(a, x);
}

// ---- normal ---------------------------------------------------------------

double pdf(const Normal& d, double x) {
  validate(d);
  require_finite(x, "x");
  return std_normal_pdf((x - d.mu) / d.sigma) / d.sigma;
}

double cdf(const Normal& d, double x) {
  validate(d);
  if (std::isnan(x)) fail_numeric("non-finite x");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return std_normal_cdf((x - d.mu) / d.sigma);
}

double quantile(const Normal& d, double p) {
  validate(d);
  return d.mu + d.sigma * std_normal_quantile(p);
}

// ---- truncated normal ------------------------------------------------------

double pdf(const TruncNormal& d, double x) {
  validate(d);
  require_finite(x, "x");
  if (x < 0.0) return 0.0;
  double p = trunc_mass(d);
  return std_normal_pdf((x - d.mu) / d.sigma) / (d.sigma * p);
}

double cdf(const TruncNormal& d, double x) {
  validate(d);
  if (std::isnan(x)) fail_numeric("non-finite x");
  if (x < 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  double p = trunc_mass(d);
  // 1 - upper_tail(z)/p keeps precision when the cutoff mass is tiny.
  double upper = std_normal_cdf(-(x - d.mu) / d.sigma);
  return std::clamp(1.0 - upper / p, 0.0, 1.0);
}

double quantile(const TruncNormal& d, double p) {
  validate(d);
  require_prob(p);
  double mass = trunc_mass(d);
  // Target in parent-CDF space is cdf(0-) + p*mass; evaluate whichever tail
  // avoids cancellation.
  double upper = mass * (1.0 - p);  // parent upper-tail mass at the quantile
  double z;
  if (upper < 0.5) {
    z = -std_normal_quantile(upper);
  } else {
    double lower = std_normal_cdf(-d.mu / d.sigma) + p * mass;
    z = std_normal_quantile(std::min(lower, 1.0 - 1e-17));
  }
  double x = d.mu + d.sigma * z;
  return x < 0.0 ? 0.0 : x;
}

double mean_of(const TruncNormal& d) {
  validate(d);
  double p = trunc_mass(d);
  double a = d.mu / d.sigma;
  return d.mu + d.sigma * std_normal_pdf(a) / p;
}

// ---- gamma (mean/sd) -------------------------------------------------------

double pdf(const GammaMeanSd& d, double x) {
  validate(d);
  require_finite(x, "x");
  if (x < 0.0) return 0.0;
  double k = d.shape();
  double theta = d.scale();
  if (x == 0.0) {
    if (k > 1.0) return 0.0;
    if (k == 1.0) return 1.0 / theta;
    return std::numeric_limits<double>::infinity();
  }
  double lp = (k - 1.0) * std::log(x) - x / theta - k * std::log(theta) -
              std::lgamma(k);
  return std::exp(lp);
}

double cdf(const GammaMeanSd& d, double x) {
  validate(d);
  if (std::isnan(x)) fail_numeric("non-finite x");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return lower_reg_gamma(d.shape(), x / d.scale());
}

double quantile(const GammaMeanSd& d, double p) {
  validate(d);
  require_prob(p);
  double a = d.shape();
  // Wilson-Hilferty start, small-x inversion fallback, then safeguarded
  // Newton on the regularized CDF.
  double g = std_normal_quantile(p);
  double t = 1.0 - 1.0 / (9.0 * a) + g / (3.0 * std::sqrt(a));
  double x = a * t * t * t;
  if (!(x > 0.0) || !std::isfinite(x))
    x = std::exp((std::log(p) + std::lgamma(a + 1.0)) / a);
  if (!(x > 0.0) || !std::isfinite(x)) x = 1e-8;

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    double f = lower_reg_gamma(a, x) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    if (std::fabs(f) < 1e-13) break;
    double logpdf = -x + (a - 1.0) * std::log(x) - std::lgamma(a);
    double step = f / std::exp(logpdf);
    double next = x - step;
    if (!(next > lo) || !(next < hi) || !std::isfinite(next))
      next = std::isinf(hi) ? x * 2.0 : 0.5 * (lo + hi);
    if (std::fabs(next - x) < 1e-15 * (x + 1e-300)) {
      x = next;
      break;
    }
    x = next;
  }
  return x * d.scale();
}

// ---- closed-form CRPS ------------------------------------------------------

double crps_closed(const Normal& d, double x) {
  validate(d);
  require_finite(x, "observation");
  double z = (x - d.mu) / d.sigma;
  return d.sigma *
         (z * (2.0 * std_normal_cdf(z) - 1.0) + 2.0 * std_normal_pdf(z) -
          kInvSqrtPi);
}

double crps_closed(const TruncNormal& d, double x) {
  validate(d);
  require_finite(x, "observation");
  double p = trunc_mass(d);
  // Below the cutoff the integrand is exactly 1, so the score decomposes as
  // |x| plus the score at the boundary.
  double shift = 0.0;
  if (x < 0.0) {
    shift = -x;
    x = 0.0;
  }
  double z = (x - d.mu) / d.sigma;
  double upper_z = std_normal_cdf(-z);  // 1 - Phi(z), no cancellation
  double term = z * p * (p - 2.0 * upper_z) + 2.0 * p * std_normal_pdf(z) -
                std_normal_cdf(kSqrt2 * d.mu / d.sigma) * kInvSqrtPi;
  return shift + d.sigma * term / (p * p);
}

// ---- CRPS by quadrature ------------------------------------------------------

namespace {

struct SimpsonState {
  const std::function<double(double)>* f;
  bool width_overflow = false;
};

double eval_clamped(const SimpsonState& st, double x) {
  double v = (*st.f)(x);
  if (std::isnan(v)) fail_numeric("quadrature integrand is NaN");
  return std::clamp(v, 0.0, 1.0);
}

double adapt(SimpsonState& st, double a, double fa, double m, double fm,
             double b, double fb, double whole, double eps, int depth,
             double hard_width) {
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = eval_clamped(st, lm);
  double frm = eval_clamped(st, rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  if (depth <= 0) {
    // Unresolved chunk: integrand is in [0,1], so the width bounds the error.
    if (b - a > hard_width) st.width_overflow = true;
    return left + right;
  }
  return adapt(st, a, fa, lm, flm, m, fm, left, 0.5 * eps, depth - 1, hard_width) +
         adapt(st, m, fm, rm, frm, b, fb, right, 0.5 * eps, depth - 1, hard_width);
}

double integrate(SimpsonState& st, double a, double b, double eps, int depth,
                 double hard_width) {
  if (!(b > a)) return 0.0;
  double m = 0.5 * (a + b);
  double fa = eval_clamped(st, a);
  double fm = eval_clamped(st, m);
  double fb = eval_clamped(st, b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adapt(st, a, fa, m, fm, b, fb, whole, eps, depth, hard_width);
}

}  // namespace

double crps_quadrature(const std::function<double(double)>& cdf, double obs,
                       const QuadratureOptions& opt,
                       std::span<const double> breakpoints) {
  require_finite(obs, "observation");
  constexpr double tail = 1e-13;
  // Locate the effective support by geometric expansion around the
  // observation; proper CDFs reach both tails in a few dozen doublings.
  double step = 1.0;
  double lo = obs;
  for (int i = 0;; ++i) {
    if (i >= 200) fail_numeric("quadrature cannot bracket the lower tail");
    lo -= step;
    step *= 2.0;
    double v = cdf(lo);
    if (std::isnan(v)) fail_numeric("quadrature integrand is NaN");
    if (v < tail) break;
  }
  step = 1.0;
  double hi = obs;
  for (int i = 0;; ++i) {
    if (i >= 200) fail_numeric("quadrature cannot bracket the upper tail");
    hi += step;
    step *= 2.0;
    double v = cdf(hi);
    if (std::isnan(v)) fail_numeric("quadrature integrand is NaN");
    if (v > 1.0 - tail) break;
  }

  auto below = [&cdf](double t) {
    double v = cdf(t);
    return v * v;
  };
  auto above = [&cdf](double t) {
    double v = 1.0 - cdf(t);
    return v * v;
  };
  std::function<double(double)> f_below = below;
  std::function<double(double)> f_above = above;

  std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
  std::sort(cuts.begin(), cuts.end());
  size_t segments = 2 + cuts.size();  // upper bound; shared error budget
  double eps = opt.abs_tol / static_cast<double>(segments);

  SimpsonState st{&f_below, false};
  double result = 0.0;
  auto run = [&](double a, double b) {
    double prev = a;
    for (double c : cuts) {
      if (!(c > prev && c < b)) continue;
      result += integrate(st, prev, c, eps, opt.max_depth, opt.abs_tol);
      prev = c;
    }
    result += integrate(st, prev, b, eps, opt.max_depth, opt.abs_tol);
  };
  run(lo, obs);
  st.f = &f_above;
  run(obs, hi);
  if (st.width_overflow)
    fail_numeric("quadrature did not converge to the requested tolerance");
  return result;
}

double crps_quadrature(const Dist& dist, double obs, const QuadratureOptions& opt) {
  return crps_quadrature([&dist](double x) { return dist.cdf(x); }, obs, opt);
}

double Dist::crps(double obs) const { return crps_quadrature(*this, obs); }

// ---- mixture ----------------------------------------------------------------

MixtureDist::MixtureDist(std::vector<double> weights,
                         std::vector<std::shared_ptr<const Dist>> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.empty() || weights_.size() != components_.size())
    fail_numeric("mixture needs matching, nonempty weights and components");
  double total = 0.0;
  for (size_t i = 0; i < weights_.size(); ++i) {
    if (!components_[i]) fail_numeric("mixture component is null");
    if (!(weights_[i] >= -1e-12) || !std::isfinite(weights_[i]))
      fail_numeric("mixture weight must be nonnegative");
    weights_[i] = std::max(weights_[i], 0.0);
    total += weights_[i];
  }
  if (std::fabs(total - 1.0) > 1e-6)
    fail_numeric("mixture weights must sum to 1");
  for (double& w : weights_) w /= total;
}

double MixtureDist::pdf(double x) const {
  double v = 0.0;
  for (size_t i = 0; i < weights_.size(); ++i)
    v += weights_[i] * components_[i]->pdf(x);
  return v;
}

double MixtureDist::cdf(double x) const {
  double v = 0.0;
  for (size_t i = 0; i < weights_.size(); ++i)
    v += weights_[i] * components_[i]->cdf(x);
  return v;
}

double MixtureDist::quantile(double p) const {
  require_prob(p);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& c : components_) {
    double q = c->quantile(p);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (!(hi > lo)) return lo;
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double MixtureDist::mean() const {
  double v = 0.0;
  for (size_t i = 0; i < weights_.size(); ++i)
    v += weights_[i] * components_[i]->mean();
  return v;
}

}  // namespace enscal
