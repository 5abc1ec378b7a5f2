#include "enscal/bma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "enscal/errors.hpp"
#include "enscal/optimize.hpp"

namespace enscal {

BiasMode parse_bias_mode(std::string_view text) {
  if (text == "linear") return BiasMode::linear;
  if (text == "additive") return BiasMode::additive;
  if (text == "none") return BiasMode::none;
  fail_config("unknown bias mode '" + std::string(text) +
              "' (expected linear, additive or none)");
}

std::string to_string(BiasMode mode) {
  switch (mode) {
    case BiasMode::linear: return "linear";
    case BiasMode::additive: return "additive";
    case BiasMode::none: return "none";
  }
  fail_config("unknown bias mode");
}

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Training view in canonical member order: groups in scheme order, member
// values sorted ascending within each group. All reductions run in this
// order, which is what makes within-group permutations bit-exact no-ops.
struct TrainView {
  std::vector<double> obs;             // per obs-bearing case
  std::vector<std::vector<double>> f;  // [case][canonical member]
  std::vector<int> group_of;           // canonical member -> group
  std::vector<int> group_size;
  int member_count = 0;
  int case_count() const { return static_cast<int>(obs.size()); }
};

TrainView make_view(std::span<const ForecastCase* const> cases,
                    const GroupingScheme& grouping) {
  TrainView v;
  v.member_count = grouping.member_count();
  for (int k = 0; k < grouping.group_count(); ++k) {
    v.group_size.push_back(grouping.group_size(k));
    for (int i = 0; i < grouping.group_size(k); ++i) v.group_of.push_back(k);
  }
  for (const ForecastCase* c : cases) {
    if (!c->obs) continue;
    if (static_cast<int>(c->members.size()) != v.member_count)
      fail_data("case " + c->date.iso() + " " + c->station + " has " +
                std::to_string(c->members.size()) + " members, grouping expects " +
                std::to_string(v.member_count));
    std::vector<double> row;
    row.reserve(v.member_count);
    for (int k = 0; k < grouping.group_count(); ++k) {
      size_t begin = row.size();
      for (int idx : grouping.group(k)) row.push_back(c->members[idx]);
      std::sort(row.begin() + begin, row.end());
    }
    v.obs.push_back(*c->obs);
    v.f.push_back(std::move(row));
  }
  return v;
}

struct OlsFit {
  double b0 = 0.0;
  double b1 = 1.0;
  bool fallback = false;
};

// OLS of y on f over the given pairs; zero-variance regressor falls back to
// the additive form b1 = 1, b0 = mean(y - f).
OlsFit pooled_ols(const std::vector<double>& f, const std::vector<double>& y) {
  double n = static_cast<double>(f.size());
  double sf = 0.0, sy = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    sf += f[i];
    sy += y[i];
  }
  double mf = sf / n, my = sy / n;
  double sff = 0.0, sfy = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    sff += (f[i] - mf) * (f[i] - mf);
    sfy += (f[i] - mf) * (y[i] - my);
  }
  OlsFit fit;
  if (sff / n <= 1e-12 * std::max(1.0, mf * mf)) {
    fit.fallback = true;
    fit.b1 = 1.0;
    fit.b0 = my - mf;
    return fit;
  }
  fit.b1 = sfy / sff;
  fit.b0 = my - fit.b1 * mf;
  return fit;
}

std::vector<double> init_weights(const GroupingScheme& grouping,
                                 const std::optional<BmaInit>& init) {
  int m = grouping.group_count();
  int M = grouping.member_count();
  std::vector<double> w(m, 1.0 / M);
  if (init && !init->weights.empty()) {
    if (static_cast<int>(init->weights.size()) != m)
      fail_config("initial weights must have one entry per group");
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
      if (!(init->weights[k] >= 0.0))
        fail_config("initial weights must be nonnegative");
      total += grouping.group_size(k) * init->weights[k];
    }
    if (std::fabs(total - 1.0) > 1e-6)
      fail_config("initial weights must satisfy sum_k M_k*w_k = 1");
    for (int k = 0; k < m; ++k) w[k] = init->weights[k] / total;
  }
  return w;
}

// Renormalize so sum_k M_k*w_k = 1 exactly; floor empty groups at 1e-6 first.
void normalize_weights(std::vector<double>& w, const std::vector<int>& sizes,
                       std::vector<int>* floored) {
  for (size_t k = 0; k < w.size(); ++k) {
    if (w[k] < 1e-300) {
      w[k] = 1e-6;
      if (floored &&
          std::find(floored->begin(), floored->end(), static_cast<int>(k)) ==
              floored->end())
        floored->push_back(static_cast<int>(k));
    }
  }
  double total = 0.0;
  for (size_t k = 0; k < w.size(); ++k) total += sizes[k] * w[k];
  for (double& x : w) x /= total;
}

double pooled_residual_sd(const TrainView& v,
                          const std::vector<std::vector<double>>& mu) {
  double ss = 0.0;
  long n = 0;
  for (int i = 0; i < v.case_count(); ++i)
    for (int j = 0; j < v.member_count; ++j) {
      double r = v.obs[i] - mu[i][j];
      ss += r * r;
      ++n;
    }
  return std::sqrt(ss / static_cast<double>(n));
}

// Shared EM driver: the caller supplies the per-member log-density (given the
// current non-weight parameters) and the M-step for those parameters.
struct EmState {
  std::vector<double> weights;                 // per group
  std::vector<std::vector<double>> resp;       // [case][member]
  FitInfo info;
};

template <typename LogDensity, typename MStep>
void run_em(const TrainView& v, const EmOptions& opt, EmState& st,
            LogDensity&& log_density, MStep&& m_step) {
  const int n = v.case_count();
  const int M = v.member_count;
  const int m = static_cast<int>(st.weights.size());
  st.resp.assign(n, std::vector<double>(M, 0.0));
  std::vector<double> logw(m), term(M);

  double prev = -kInf;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    for (int k = 0; k < m; ++k) logw[k] = std::log(st.weights[k]);
    double loglik = 0.0;
    for (int i = 0; i < n; ++i) {
      double top = -kInf;
      for (int j = 0; j < M; ++j) {
        term[j] = logw[v.group_of[j]] + log_density(i, j);
        top = std::max(top, term[j]);
      }
      if (!std::isfinite(top))
        fail_numeric("mixture log-likelihood underflow for a training case");
      double sum = 0.0;
      for (int j = 0; j < M; ++j) {
        double z = std::exp(term[j] - top);
        st.resp[i][j] = z;
        sum += z;
      }
      for (int j = 0; j < M; ++j) st.resp[i][j] /= sum;
      loglik += top + std::log(sum);
    }
    st.info.loglik_trace.push_back(loglik);
    st.info.iterations = iter + 1;
    if (loglik - prev < opt.tol && iter > 0) {
      st.info.converged = true;
      break;
    }
    prev = loglik;

    // M-step, weights part: group mass averaged over cases, then per member.
    std::vector<double> mass(m, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < M; ++j) mass[v.group_of[j]] += st.resp[i][j];
    for (int k = 0; k < m; ++k)
      st.weights[k] = mass[k] / (static_cast<double>(n) * v.group_size[k]);
    normalize_weights(st.weights, v.group_size, &st.info.floored_weight_groups);

    m_step(st.resp);
  }
  st.info.loglik = st.info.loglik_trace.back();
}

}  // namespace

std::vector<BiasFit> fit_bias_regression(
    std::span<const ForecastCase* const> cases, const GroupingScheme& grouping,
    BiasMode mode) {
  TrainView v = make_view(cases, grouping);
  if (v.case_count() == 0) fail_data("bias regression needs observed cases");
  std::vector<BiasFit> fits;
  int j0 = 0;
  for (int k = 0; k < grouping.group_count(); ++k) {
    BiasFit fit;
    if (mode != BiasMode::none) {
      std::vector<double> f, y;
      for (int i = 0; i < v.case_count(); ++i)
        for (int j = j0; j < j0 + v.group_size[k]; ++j) {
          f.push_back(v.f[i][j]);
          y.push_back(v.obs[i]);
        }
      if (mode == BiasMode::linear) {
        OlsFit ols = pooled_ols(f, y);
        fit.b0 = ols.b0;
        fit.b1 = ols.b1;
        fit.fallback = ols.fallback;
      } else {
        double s = 0.0;
        for (size_t i = 0; i < f.size(); ++i) s += y[i] - f[i];
        fit.b0 = s / static_cast<double>(f.size());
      }
    }
    fits.push_back(fit);
    j0 += v.group_size[k];
  }
  return fits;
}

BmaNormalModel fit_bma_normal_em(std::span<const ForecastCase* const> cases,
                                 const GroupingScheme& grouping, BiasMode bias,
                                 const EmOptions& opt,
                                 const std::optional<BmaInit>& init) {
  BmaNormalModel model;
  model.grouping = grouping;
  model.bias = bias;
  model.bias_by_group = fit_bias_regression(cases, grouping, bias);

  TrainView v = make_view(cases, grouping);
  if (v.case_count() < 2) fail_data("BMA fit needs at least 2 observed cases");

  std::vector<std::vector<double>> mu(v.f.size(),
                                      std::vector<double>(v.member_count));
  for (int i = 0; i < v.case_count(); ++i)
    for (int j = 0; j < v.member_count; ++j) {
      const BiasFit& b = model.bias_by_group[v.group_of[j]];
      mu[i][j] = b.b0 + b.b1 * v.f[i][j];
    }

  EmState st;
  st.weights = init_weights(grouping, init);
  for (size_t k = 0; k < model.bias_by_group.size(); ++k)
    if (model.bias_by_group[k].fallback)
      st.info.bias_fallback_groups.push_back(static_cast<int>(k));

  double sigma = (init && init->sigma > 0.0) ? init->sigma
                                             : pooled_residual_sd(v, mu);
  if (sigma * sigma < 1e-8) {
    sigma = 1e-4;
    st.info.sigma_floored = true;
  }

  auto log_density = [&](int i, int j) {
    double z = (v.obs[i] - mu[i][j]) / sigma;
    return -0.5 * z * z - std::log(sigma) - 0.5 * kLog2Pi;
  };
  auto m_step = [&](const std::vector<std::vector<double>>& resp) {
    double ss = 0.0;
    for (int i = 0; i < v.case_count(); ++i)
      for (int j = 0; j < v.member_count; ++j) {
        double r = v.obs[i] - mu[i][j];
        ss += resp[i][j] * r * r;
      }
    double s2 = ss / static_cast<double>(v.case_count());
    if (s2 < 1e-8) {
      s2 = 1e-8;
      st.info.sigma_floored = true;
    }
    sigma = std::sqrt(s2);
  };
  run_em(v, opt, st, log_density, m_step);

  model.weights = st.weights;
  model.sigma = sigma;
  model.info = std::move(st.info);
  return model;
}

BmaNormalModel fit_bma_normal_crps(std::span<const ForecastCase* const> cases,
                                   const GroupingScheme& grouping, BiasMode bias,
                                   const EmOptions& opt) {
  BmaNormalModel model;
  model.grouping = grouping;
  model.bias = bias;
  model.bias_by_group = fit_bias_regression(cases, grouping, bias);

  TrainView v = make_view(cases, grouping);
  if (v.case_count() < 2) fail_data("BMA fit needs at least 2 observed cases");
  for (size_t k = 0; k < model.bias_by_group.size(); ++k)
    if (model.bias_by_group[k].fallback)
      model.info.bias_fallback_groups.push_back(static_cast<int>(k));

  std::vector<std::vector<double>> mu(v.f.size(),
                                      std::vector<double>(v.member_count));
  for (int i = 0; i < v.case_count(); ++i)
    for (int j = 0; j < v.member_count; ++j) {
      const BiasFit& b = model.bias_by_group[v.group_of[j]];
      mu[i][j] = b.b0 + b.b1 * v.f[i][j];
    }
  double sigma0 = pooled_residual_sd(v, mu);
  if (sigma0 < 1e-4) sigma0 = 1e-4;

  const int m = grouping.group_count();
  // Free parameters: m-1 log-ratio weight coordinates (group m is the
  // reference) plus sigma through a square transform.
  QuadratureOptions quad{1e-7, 60};
  auto weights_from = [&](std::span<const double> p) {
    std::vector<double> t(m, 1.0);
    for (int k = 0; k + 1 < m; ++k) t[k] = std::exp(p[k]);
    double total = 0.0;
    for (int k = 0; k < m; ++k) total += v.group_size[k] * t[k];
    for (int k = 0; k < m; ++k) t[k] /= total;
    return t;
  };
  auto objective = [&](std::span<const double> p) {
    std::vector<double> w = weights_from(p);
    double s = p[m - 1];
    if (!(s > 1e-6)) return kInf;
    double total = 0.0;
    for (int i = 0; i < v.case_count(); ++i) {
      auto cdf = [&](double x) {
        double acc = 0.0;
        for (int j = 0; j < v.member_count; ++j)
          acc += w[v.group_of[j]] * std_normal_cdf((x - mu[i][j]) / s);
        return acc;
      };
      total += crps_quadrature(cdf, v.obs[i], quad);
    }
    return total / static_cast<double>(v.case_count());
  };

  ObjectiveSpec spec;
  spec.objective = objective;
  spec.transforms.assign(m - 1, Transform::identity);
  spec.transforms.push_back(Transform::square);
  spec.initial.assign(m - 1, 0.0);
  spec.initial.push_back(std::sqrt(sigma0));
  MinimizeOptions mopt;
  mopt.tol = 1e-6;  // CRPS surface is flat near the optimum; 1e-8 overworks it
  mopt.max_iter = opt.max_iter;
  OptimResult res = minimize(spec, mopt);

  model.weights = weights_from(res.argmin);
  model.sigma = res.argmin[m - 1];
  model.info.mean_crps = res.value;
  model.info.iterations = res.iterations;
  model.info.converged = res.converged;
  return model;
}

BmaGammaModel fit_bma_gamma(std::span<const ForecastCase* const> cases,
                            const GroupingScheme& grouping, const EmOptions& opt,
                            const std::optional<BmaInit>& init) {
  BmaGammaModel model;
  model.grouping = grouping;

  TrainView v = make_view(cases, grouping);
  if (v.case_count() < 2) fail_data("BMA fit needs at least 2 observed cases");
  EmState st;
  for (double& y : v.obs) {
    if (y < 0.0) fail_data("gamma model needs nonnegative observations");
    if (y < 0.1) {
      y = 0.1;
      ++st.info.clamped_obs;
    }
  }

  // Parsimonious mean: one OLS pooled over every member of every case.
  std::vector<double> f_all, y_all;
  for (int i = 0; i < v.case_count(); ++i)
    for (int j = 0; j < v.member_count; ++j) {
      f_all.push_back(v.f[i][j]);
      y_all.push_back(v.obs[i]);
    }
  OlsFit ols = pooled_ols(f_all, y_all);
  model.b0 = ols.b0;
  model.b1 = ols.b1;
  if (ols.fallback) st.info.bias_fallback_groups.push_back(0);

  double min_mean = kInf;
  for (double f : f_all) min_mean = std::min(min_mean, model.b0 + model.b1 * f);
  if (min_mean <= 0.0) {
    model.b0 += 1e-3 - min_mean;
    st.info.mean_shifted = true;
  }

  std::vector<std::vector<double>> mu(v.f.size(),
                                      std::vector<double>(v.member_count));
  for (int i = 0; i < v.case_count(); ++i)
    for (int j = 0; j < v.member_count; ++j)
      mu[i][j] = model.b0 + model.b1 * v.f[i][j];

  st.weights = init_weights(grouping, init);
  model.c0 = (init && init->sigma > 0.0) ? init->sigma
                                         : pooled_residual_sd(v, mu);
  if (model.c0 < 1e-4) model.c0 = 1e-4;
  model.c1 = 0.0;

  double f_min = *std::min_element(f_all.begin(), f_all.end());
  double f_max = *std::max_element(f_all.begin(), f_all.end());

  auto log_gamma_pdf = [](double y, double mean, double sd) {
    double k = (mean / sd) * (mean / sd);
    double theta = sd * sd / mean;
    return (k - 1.0) * std::log(y) - y / theta - k * std::log(theta) -
           std::lgamma(k);
  };
  auto log_density = [&](int i, int j) {
    return log_gamma_pdf(v.obs[i], mu[i][j], model.c0 + model.c1 * v.f[i][j]);
  };
  auto m_step = [&](const std::vector<std::vector<double>>& resp) {
    auto q_neg = [&](std::span<const double> c) {
      if (c[0] + c[1] * f_min <= 1e-8 || c[0] + c[1] * f_max <= 1e-8)
        return kInf;
      double q = 0.0;
      for (int i = 0; i < v.case_count(); ++i)
        for (int j = 0; j < v.member_count; ++j)
          q += resp[i][j] *
               log_gamma_pdf(v.obs[i], mu[i][j], c[0] + c[1] * v.f[i][j]);
      return -q;
    };
    ObjectiveSpec mspec;
    mspec.objective = q_neg;
    mspec.transforms = {Transform::square, Transform::square};
    mspec.initial = {std::sqrt(model.c0), std::sqrt(model.c1)};
    MinimizeOptions mopt{opt.mstep_tol, opt.mstep_max_iter};
    OptimResult res = minimize(mspec, mopt);
    model.c0 = res.argmin[0];
    model.c1 = res.argmin[1];
  };
  run_em(v, opt, st, log_density, m_step);

  model.weights = st.weights;
  model.info = std::move(st.info);
  return model;
}

BmaTruncNormalModel fit_bma_truncnormal_ml(
    std::span<const ForecastCase* const> cases, const GroupingScheme& grouping,
    const EmOptions& opt, const std::optional<BmaInit>& init) {
  BmaTruncNormalModel model;
  model.grouping = grouping;

  TrainView v = make_view(cases, grouping);
  if (v.case_count() < 2) fail_data("BMA fit needs at least 2 observed cases");
  for (double y : v.obs)
    if (y < 0.0)
      fail_data("truncated-normal model needs nonnegative observations");

  const int m = grouping.group_count();
  // Regression gives only the starting point; every estimate below comes from
  // the likelihood ascent.
  std::vector<BiasFit> start = fit_bias_regression(cases, grouping, BiasMode::linear);
  model.location.assign(m, BiasFit{});
  for (int k = 0; k < m; ++k) {
    model.location[k].b0 = start[k].b0;
    model.location[k].b1 = start[k].b1;
  }

  std::vector<std::vector<double>> mu(v.f.size(),
                                      std::vector<double>(v.member_count));
  auto refresh_mu = [&]() {
    for (int i = 0; i < v.case_count(); ++i)
      for (int j = 0; j < v.member_count; ++j) {
        const BiasFit& b = model.location[v.group_of[j]];
        mu[i][j] = b.b0 + b.b1 * v.f[i][j];
      }
  };
  refresh_mu();

  EmState st;
  st.weights = init_weights(grouping, init);
  model.sigma = (init && init->sigma > 0.0) ? init->sigma
                                            : pooled_residual_sd(v, mu);
  if (model.sigma < 1e-4) model.sigma = 1e-4;

  // Sufficient statistics make the quadratic part of the expected complete-
  // data log-likelihood O(m) per objective evaluation; only the truncation
  // penalty needs the per-pair loop.
  struct GroupStats {
    double sz = 0, szy = 0, szf = 0, szyy = 0, szff = 0, szyf = 0;
    std::vector<double> f, z;
  };

  auto log_trunc_pdf = [&](double y, double mean, double sd) {
    double a = mean / sd;
    if (a < -37.0) return -kInf;  // truncation mass underflows
    double r = (y - mean) / sd;
    return -0.5 * r * r - std::log(sd) - 0.5 * kLog2Pi -
           std::log(std_normal_cdf(a));
  };
  auto log_density = [&](int i, int j) {
    return log_trunc_pdf(v.obs[i], mu[i][j], model.sigma);
  };
  auto m_step = [&](const std::vector<std::vector<double>>& resp) {
    std::vector<GroupStats> gs(m);
    for (int i = 0; i < v.case_count(); ++i)
      for (int j = 0; j < v.member_count; ++j) {
        GroupStats& g = gs[v.group_of[j]];
        double z = resp[i][j];
        double f = v.f[i][j];
        double y = v.obs[i];
        g.sz += z;
        g.szy += z * y;
        g.szf += z * f;
        g.szyy += z * y * y;
        g.szff += z * f * f;
        g.szyf += z * y * f;
        g.f.push_back(f);
        g.z.push_back(z);
      }

    auto q_neg = [&](std::span<const double> p) {
      double sd = p[2 * m];
      if (!(sd > 1e-4)) return kInf;
      double q = 0.0;
      for (int k = 0; k < m; ++k) {
        const GroupStats& g = gs[k];
        double b0 = p[2 * k], b1 = p[2 * k + 1];
        double rss = g.szyy - 2.0 * b0 * g.szy - 2.0 * b1 * g.szyf +
                     b0 * b0 * g.sz + 2.0 * b0 * b1 * g.szf + b1 * b1 * g.szff;
        q -= 0.5 * rss / (sd * sd) + g.sz * (std::log(sd) + 0.5 * kLog2Pi);
        for (size_t t = 0; t < g.f.size(); ++t) {
          double a = (b0 + b1 * g.f[t]) / sd;
          if (a < -37.0) return kInf;  // reject degenerate components
          if (a > 8.0) continue;       // |log Phi| < 1e-15, below solver tol
          q -= g.z[t] * std::log(std_normal_cdf(a));
        }
      }
      return -q;
    };

    ObjectiveSpec mspec;
    mspec.objective = q_neg;
    mspec.transforms.assign(2 * m, Transform::identity);
    mspec.transforms.push_back(Transform::square);
    for (int k = 0; k < m; ++k) {
      mspec.initial.push_back(model.location[k].b0);
      mspec.initial.push_back(model.location[k].b1);
    }
    mspec.initial.push_back(std::sqrt(model.sigma));
    MinimizeOptions mopt{opt.mstep_tol, opt.mstep_max_iter};
    OptimResult res = minimize(mspec, mopt);
    for (int k = 0; k < m; ++k) {
      model.location[k].b0 = res.argmin[2 * k];
      model.location[k].b1 = res.argmin[2 * k + 1];
    }
    model.sigma = res.argmin[2 * m];
    refresh_mu();
  };
  run_em(v, opt, st, log_density, m_step);

  model.weights = st.weights;
  model.info = std::move(st.info);
  return model;
}

namespace {

// Shared mixture assembly: per-group weights expanded per member, members
// sorted ascending within each group.
template <typename MakeComponent>
MixtureDist assemble_mixture(const GroupingScheme& grouping,
                             const std::vector<double>& group_weights,
                             const ForecastCase& c, MakeComponent&& make) {
  if (static_cast<int>(c.members.size()) != grouping.member_count())
    fail_data("case " + c.date.iso() + " " + c.station + " has " +
              std::to_string(c.members.size()) + " members, model expects " +
              std::to_string(grouping.member_count()));
  std::vector<double> weights;
  std::vector<std::shared_ptr<const Dist>> comps;
  for (int k = 0; k < grouping.group_count(); ++k) {
    std::vector<double> vals;
    for (int idx : grouping.group(k)) vals.push_back(c.members[idx]);
    std::sort(vals.begin(), vals.end());
    for (double f : vals) {
      weights.push_back(group_weights[k]);
      comps.push_back(make(k, f));
    }
  }
  return MixtureDist(std::move(weights), std::move(comps));
}

}  // namespace

MixtureDist predict_bma(const BmaNormalModel& model, const ForecastCase& c) {
  return assemble_mixture(
      model.grouping, model.weights, c, [&](int k, double f) {
        const BiasFit& b = model.bias_by_group[k];
        return std::make_shared<NormalDist>(Normal{b.b0 + b.b1 * f, model.sigma});
      });
}

MixtureDist predict_bma(const BmaGammaModel& model, const ForecastCase& c) {
  return assemble_mixture(
      model.grouping, model.weights, c, [&](int, double f) {
        // New cases can fall outside the training range; keep the component
        // proper instead of failing mid-run.
        double mean = std::max(model.b0 + model.b1 * f, 1e-6);
        double sd = std::max(model.c0 + model.c1 * f, 1e-6);
        return std::make_shared<GammaDist>(GammaMeanSd{mean, sd});
      });
}

MixtureDist predict_bma(const BmaTruncNormalModel& model, const ForecastCase& c) {
  return assemble_mixture(
      model.grouping, model.weights, c, [&](int k, double f) {
        const BiasFit& b = model.location[k];
        return std::make_shared<TruncNormalDist>(
            TruncNormal{b.b0 + b.b1 * f, model.sigma});
      });
}

}  // namespace enscal
