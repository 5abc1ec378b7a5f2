#include "enscal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>

#include "enscal/distributions.hpp"
#include "enscal/errors.hpp"
#include "enscal/rng.hpp"

namespace enscal {

Scenario parse_scenario(std::string_view text) {
  if (text == "bma_normal") return Scenario::bma_normal;
  if (text == "bma_gamma") return Scenario::bma_gamma;
  if (text == "bma_truncnormal") return Scenario::bma_truncnormal;
  if (text == "emos_normal") return Scenario::emos_normal;
  if (text == "emos_truncnormal") return Scenario::emos_truncnormal;
  if (text == "underdispersive_raw") return Scenario::underdispersive_raw;
  fail_config("unknown scenario '" + std::string(text) + "'");
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::bma_normal: return "bma_normal";
    case Scenario::bma_gamma: return "bma_gamma";
    case Scenario::bma_truncnormal: return "bma_truncnormal";
    case Scenario::emos_normal: return "emos_normal";
    case Scenario::emos_truncnormal: return "emos_truncnormal";
    case Scenario::underdispersive_raw: return "underdispersive_raw";
  }
  fail_config("unknown scenario");
}

VariableKind scenario_kind(Scenario scenario) {
  switch (scenario) {
    case Scenario::bma_gamma:
    case Scenario::bma_truncnormal:
    case Scenario::emos_truncnormal:
      return VariableKind::nonnegative;
    default:
      return VariableKind::real_line;
  }
}

std::map<std::string, double> scenario_defaults(Scenario scenario) {
  switch (scenario) {
    case Scenario::bma_normal:
      return {{"t_mean", 285}, {"t_sd", 25},   {"m_sd", 2}, {"w_control", 0.3},
              {"beta0", 0},    {"beta1", 1},   {"sigma", 1}};
    case Scenario::bma_gamma:
      return {{"t_mean", 5},  {"t_sd", 1.5}, {"m_sd", 0.15},
              {"b0", 0.2},    {"b1", 0.9},   {"c0", 0.4},
              {"c1", 0.2}};
    case Scenario::bma_truncnormal:
      return {{"t_mean", 3},  {"t_sd", 1.6}, {"m_sd", 1},  {"w_control", 0.2},
              {"beta0", 0.3}, {"beta1", 0.85}, {"sigma", 0.8}};
    case Scenario::emos_normal:
      return {{"t_mean", 285}, {"t_sd", 5}, {"m_sd", 2}, {"a0", 1},
              {"amean", 1},    {"b0", 1},   {"b1", 1}};
    case Scenario::emos_truncnormal:
      return {{"t_mean", 3}, {"t_sd", 1.5}, {"m_sd", 1}, {"a0", 0.3},
              {"amean", 0.9}, {"b0", 0.5},  {"b1", 0.5}};
    case Scenario::underdispersive_raw:
      return {{"t_mean", 285}, {"t_sd", 5}, {"m_sd", 1.5},
              {"obs_noise_ratio", 3}};
  }
  fail_config("unknown scenario");
}

namespace {

struct CaseDraw {
  std::vector<double> members;
  double obs = 0.0;
  double true_crps = 0.0;
};

double ensemble_mean(const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s / static_cast<double>(f.size());
}

double ensemble_var(const std::vector<double>& f) {
  double mean = ensemble_mean(f);
  double ss = 0.0;
  for (double v : f) ss += (v - mean) * (v - mean);
  return ss / (static_cast<double>(f.size()) - 1.0);
}

// Equal-weight mixture helpers for the BMA scenarios' true predictive law.
MixtureDist two_group_mixture(const std::vector<double>& f, double w_control,
                              const std::function<std::shared_ptr<const Dist>(double)>& comp) {
  std::vector<double> w;
  std::vector<std::shared_ptr<const Dist>> parts;
  double w_other = (1.0 - w_control) / static_cast<double>(f.size() - 1);
  for (size_t j = 0; j < f.size(); ++j) {
    w.push_back(j == 0 ? w_control : w_other);
    parts.push_back(comp(f[j]));
  }
  return MixtureDist(std::move(w), std::move(parts));
}

}  // namespace

SynthResult generate_synth(const SynthSpec& spec) {
  if (spec.n_dates < 1) fail_config("n_dates must be positive");
  if (spec.n_stations < 1 || spec.n_stations > 99)
    fail_config("n_stations must be in 1..99");
  if (spec.n_members < 2) fail_config("n_members must be at least 2");

  std::map<std::string, double> p = scenario_defaults(spec.scenario);
  for (const auto& [key, value] : spec.params) {
    auto it = p.find(key);
    if (it == p.end())
      fail_config("unknown parameter '" + key + "' for scenario " +
                  to_string(spec.scenario));
    it->second = value;
  }
  auto need_positive = [&](const char* key) {
    if (!(p.at(key) > 0.0))
      fail_config(std::string(key) + " must be positive");
  };
  need_positive("t_sd");
  need_positive("m_sd");
  bool two_group = spec.scenario == Scenario::bma_normal ||
                   spec.scenario == Scenario::bma_truncnormal;
  if (two_group && !(p.at("w_control") > 0.0 && p.at("w_control") < 1.0))
    fail_config("w_control must be in (0,1)");

  std::set<long> missing;
  for (const Date& d : spec.missing) missing.insert(d.serial());

  SynthResult out;
  out.data.kind = scenario_kind(spec.scenario);
  out.data.member_count = spec.n_members;
  const int M = spec.n_members;
  const QuadratureOptions quad{1e-9, 60};

  auto gen_case = [&](Rng& rng) {
    CaseDraw cd;
    double t = rng.normal(p.at("t_mean"), p.at("t_sd"));
    if (spec.scenario == Scenario::bma_gamma)
      t = rng.gamma_mean_sd(p.at("t_mean"), p.at("t_sd"));
    cd.members.reserve(M);
    for (int j = 0; j < M; ++j) {
      double f = t + rng.normal(0.0, p.at("m_sd"));
      if (spec.scenario == Scenario::bma_gamma) f = std::max(f, 0.01);
      cd.members.push_back(f);
    }

    switch (spec.scenario) {
      case Scenario::bma_normal: {
        double w = p.at("w_control");
        size_t pick = rng.uniform01() < w
                          ? 0
                          : 1 + static_cast<size_t>(rng.below(M - 1));
        double mu = p.at("beta0") + p.at("beta1") * cd.members[pick];
        cd.obs = rng.normal(mu, p.at("sigma"));
        MixtureDist mix = two_group_mixture(cd.members, w, [&](double f) {
          return std::make_shared<NormalDist>(
              Normal{p.at("beta0") + p.at("beta1") * f, p.at("sigma")});
        });
        cd.true_crps = crps_quadrature(mix, cd.obs, quad);
        break;
      }
      case Scenario::bma_truncnormal: {
        double w = p.at("w_control");
        size_t pick = rng.uniform01() < w
                          ? 0
                          : 1 + static_cast<size_t>(rng.below(M - 1));
        double mu = p.at("beta0") + p.at("beta1") * cd.members[pick];
        cd.obs = rng.trunc_normal(mu, p.at("sigma"));
        MixtureDist mix = two_group_mixture(cd.members, w, [&](double f) {
          return std::make_shared<TruncNormalDist>(
              TruncNormal{p.at("beta0") + p.at("beta1") * f, p.at("sigma")});
        });
        cd.true_crps = crps_quadrature(mix, cd.obs, quad);
        break;
      }
      case Scenario::bma_gamma: {
        size_t pick = static_cast<size_t>(rng.below(M));
        double mean = p.at("b0") + p.at("b1") * cd.members[pick];
        double sd = p.at("c0") + p.at("c1") * cd.members[pick];
        if (!(mean > 0.0) || !(sd > 0.0))
          fail_config("gamma scenario parameters give a nonpositive mean or sd");
        cd.obs = rng.gamma_mean_sd(mean, sd);
        std::vector<double> w(M, 1.0 / M);
        std::vector<std::shared_ptr<const Dist>> parts;
        for (double f : cd.members)
          parts.push_back(std::make_shared<GammaDist>(GammaMeanSd{
              p.at("b0") + p.at("b1") * f, p.at("c0") + p.at("c1") * f}));
        MixtureDist mix(std::move(w), std::move(parts));
        cd.true_crps = crps_quadrature(mix, cd.obs, quad);
        break;
      }
      case Scenario::emos_normal:
      case Scenario::emos_truncnormal: {
        double mu = p.at("a0") + p.at("amean") * ensemble_mean(cd.members);
        double var = p.at("b0") + p.at("b1") * ensemble_var(cd.members);
        if (!(var > 0.0)) fail_config("emos scenario variance is not positive");
        double sigma = std::sqrt(var);
        if (spec.scenario == Scenario::emos_normal) {
          cd.obs = rng.normal(mu, sigma);
          cd.true_crps = crps_closed(Normal{mu, sigma}, cd.obs);
        } else {
          cd.obs = rng.trunc_normal(mu, sigma);
          cd.true_crps = crps_closed(TruncNormal{mu, sigma}, cd.obs);
        }
        break;
      }
      case Scenario::underdispersive_raw: {
        double r = p.at("obs_noise_ratio");
        if (!(r > 0.0)) fail_config("obs_noise_ratio must be positive");
        cd.obs = t + rng.normal(0.0, r * p.at("m_sd"));
        // Bayes predictive given the members: posterior on t times obs noise.
        double prior_prec = 1.0 / (p.at("t_sd") * p.at("t_sd"));
        double like_prec = M / (p.at("m_sd") * p.at("m_sd"));
        double post_var = 1.0 / (prior_prec + like_prec);
        double post_mean = post_var * (prior_prec * p.at("t_mean") +
                                       like_prec * ensemble_mean(cd.members));
        double pred_sd =
            std::sqrt(post_var + r * r * p.at("m_sd") * p.at("m_sd"));
        cd.true_crps = crps_closed(Normal{post_mean, pred_sd}, cd.obs);
        break;
      }
    }
    return cd;
  };

  double crps_sum = 0.0;
  for (int di = 0; di < spec.n_dates; ++di) {
    Date date = spec.start.plus_days(di);
    if (missing.count(date.serial())) continue;
    for (int si = 0; si < spec.n_stations; ++si) {
      char name[16];
      std::snprintf(name, sizeof name, "S%02d", si + 1);
      Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(date.serial()),
                          fnv1a64(name)));
      CaseDraw cd = gen_case(rng);
      ForecastCase c;
      c.date = date;
      c.station = name;
      c.obs = cd.obs;
      c.members = std::move(cd.members);
      out.data.cases.push_back(std::move(c));
      out.true_crps.push_back(cd.true_crps);
      crps_sum += cd.true_crps;
    }
  }
  if (out.data.cases.empty())
    fail_config("every date in the range is marked missing");
  out.exact_mean_crps = crps_sum / static_cast<double>(out.data.cases.size());
  for (const auto& [key, value] : p) out.truth.emplace_back(key, value);
  return out;
}

}  // namespace enscal
