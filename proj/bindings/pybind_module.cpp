#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "enscal/bma.hpp"
#include "enscal/config.hpp"
#include "enscal/core_data.hpp"
#include "enscal/date.hpp"
#include "enscal/distributions.hpp"
#include "enscal/emos.hpp"
#include "enscal/errors.hpp"
#include "enscal/harness.hpp"
#include "enscal/model_io.hpp"
#include "enscal/rng.hpp"
#include "enscal/synth.hpp"
#include "enscal/verification.hpp"

namespace py = pybind11;
using namespace enscal;

namespace {

std::vector<const ForecastCase*> case_ptrs(const std::vector<ForecastCase>& cs) {
  std::vector<const ForecastCase*> out;
  out.reserve(cs.size());
  for (const ForecastCase& c : cs) out.push_back(&c);
  return out;
}

EmosFamily parse_emos_family(std::string_view text) {
  if (text == "normal") return EmosFamily::normal;
  if (text == "truncnormal") return EmosFamily::truncnormal;
  fail_config("unknown emos family '" + std::string(text) +
              "' (expected normal or truncnormal)");
}

std::string to_string(EmosFamily family) {
  return family == EmosFamily::normal ? "normal" : "truncnormal";
}

// Validated, sorted Dataset from in-memory cases. Routes through the CSV
// parser so Python-built data gets exactly the loader's checks (duplicate
// cases, finite values, nonnegativity); shortest round-trip formatting
// keeps every double bit-exact.
Dataset dataset_from_cases(std::string_view kind,
                           const std::vector<ForecastCase>& cases) {
  Dataset tmp;
  tmp.kind = parse_variable_kind(kind);
  tmp.member_count =
      cases.empty() ? 0 : static_cast<int>(cases.front().members.size());
  tmp.cases = cases;
  return parse_dataset_csv(format_dataset_csv(tmp), tmp.kind, "<cases>");
}

template <class Model>
void def_serialize(py::class_<Model>& cls) {
  cls.def("serialize",
          [](const Model& m) { return serialize_model(AnyModel{m}); },
          "Versioned plain-text form; parse_model inverts it exactly.");
}

}  // namespace

PYBIND11_MODULE(_enscal, m) {
  m.doc() =
      "Ensemble forecast calibration: BMA mixture and EMOS post-processing "
      "with CRPS verification.";

  py::register_exception<Error>(m, "Error");

  // ---- calendar ----------------------------------------------------------

  py::class_<Date>(m, "Date", "Calendar date; construct from 'YYYY-MM-DD'.")
      .def(py::init(&Date::parse), py::arg("iso"))
      .def_static("from_ymd", &Date::from_ymd, py::arg("year"),
                  py::arg("month"), py::arg("day"))
      .def("iso", &Date::iso)
      .def_property_readonly("year", &Date::year)
      .def_property_readonly("month", &Date::month)
      .def_property_readonly("day", &Date::day)
      .def("plus_days", &Date::plus_days, py::arg("n"))
      .def("__sub__", [](Date a, Date b) { return a - b; })
      .def("__eq__", [](Date a, Date b) { return a == b; })
      .def("__ne__", [](Date a, Date b) { return a != b; })
      .def("__lt__", [](Date a, Date b) { return a < b; })
      .def("__le__", [](Date a, Date b) { return a <= b; })
      .def("__gt__", [](Date a, Date b) { return a > b; })
      .def("__ge__", [](Date a, Date b) { return a >= b; })
      .def("__hash__", [](Date d) { return d.serial(); })
      .def("__str__", &Date::iso)
      .def("__repr__", [](Date d) { return "Date('" + d.iso() + "')"; });
  py::implicitly_convertible<py::str, Date>();

  // ---- data --------------------------------------------------------------

  py::class_<ForecastCase>(m, "ForecastCase",
                           "One station's ensemble and observation for one "
                           "date; obs=None marks a missing observation.")
      .def(py::init([](Date date, std::string station,
                       std::optional<double> obs, std::vector<double> members) {
             ForecastCase c;
             c.date = date;
             c.station = std::move(station);
             c.obs = obs;
             c.members = std::move(members);
             return c;
           }),
           py::arg("date"), py::arg("station"), py::arg("obs"),
           py::arg("members"))
      .def_readwrite("date", &ForecastCase::date)
      .def_readwrite("station", &ForecastCase::station)
      .def_readwrite("obs", &ForecastCase::obs)
      .def_readwrite("members", &ForecastCase::members)
      .def("__repr__", [](const ForecastCase& c) {
        return "ForecastCase(" + c.date.iso() + ", '" + c.station + "', " +
               std::to_string(c.members.size()) + " members)";
      });

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly(
          "kind", [](const Dataset& d) { return to_string(d.kind); })
      .def_readonly("member_count", &Dataset::member_count)
      .def_readonly("cases", &Dataset::cases)
      .def("dates", &Dataset::dates)
      .def("stations", &Dataset::stations)
      .def("__len__", [](const Dataset& d) { return d.cases.size(); })
      .def("to_csv", [](const Dataset& d) { return format_dataset_csv(d); })
      .def("save_csv",
           [](const Dataset& d, const std::string& path) {
             save_dataset_csv(d, path);
           },
           py::arg("path"));

  m.def("load_dataset_csv",
        [](const std::string& path, std::string_view kind) {
          return load_dataset_csv(path, parse_variable_kind(kind));
        },
        py::arg("path"), py::arg("kind") = "real_line",
        "Load `date,station,obs,m1,...,mM` CSV; empty obs = missing.");
  m.def("parse_dataset_csv",
        [](std::string_view text, std::string_view kind,
           const std::string& origin) {
          return parse_dataset_csv(text, parse_variable_kind(kind), origin);
        },
        py::arg("text"), py::arg("kind") = "real_line",
        py::arg("origin") = "<string>");
  m.def("make_dataset", &dataset_from_cases, py::arg("kind"), py::arg("cases"),
        "Sorted, validated Dataset from a list of ForecastCase.");

  py::class_<GroupingScheme>(m, "GroupingScheme")
      .def_property_readonly("group_count", &GroupingScheme::group_count)
      .def_property_readonly("member_count", &GroupingScheme::member_count)
      .def("group", &GroupingScheme::group, py::arg("k"))
      .def("groups", &GroupingScheme::groups)
      .def("to_text", &GroupingScheme::to_text)
      .def("__repr__", [](const GroupingScheme& g) {
        return "GroupingScheme('" + g.to_text() + "')";
      });

  m.def("make_grouping",
        [](std::string_view kind, int member_count) {
          return make_grouping(kind, member_count);
        },
        py::arg("kind"), py::arg("member_count"),
        "kind: exchangeable | two_group | three_group | custom:1|2,4|3,5");

  // ---- distributions -----------------------------------------------------

  py::class_<QuadratureOptions>(m, "QuadratureOptions")
      .def(py::init([](double abs_tol, int max_depth) {
             return QuadratureOptions{abs_tol, max_depth};
           }),
           py::arg("abs_tol") = 1e-10, py::arg("max_depth") = 60)
      .def_readwrite("abs_tol", &QuadratureOptions::abs_tol)
      .def_readwrite("max_depth", &QuadratureOptions::max_depth);

  py::class_<Dist, std::shared_ptr<Dist>>(m, "Dist",
                                          "Evaluable predictive distribution.")
      .def("pdf", &Dist::pdf, py::arg("x"))
      .def("cdf", &Dist::cdf, py::arg("x"))
      .def("quantile", &Dist::quantile, py::arg("p"))
      .def("mean", &Dist::mean)
      .def("crps", &Dist::crps, py::arg("obs"),
           "Closed form where one exists, quadrature otherwise.");

  py::class_<NormalDist, Dist, std::shared_ptr<NormalDist>>(m, "NormalDist")
      .def(py::init([](double mu, double sigma) {
             return NormalDist(Normal{mu, sigma});
           }),
           py::arg("mu"), py::arg("sigma"))
      .def_property_readonly(
          "mu", [](const NormalDist& d) { return d.params().mu; })
      .def_property_readonly(
          "sigma", [](const NormalDist& d) { return d.params().sigma; });

  py::class_<TruncNormalDist, Dist, std::shared_ptr<TruncNormalDist>>(
      m, "TruncNormalDist", "Normal truncated to [0, inf).")
      .def(py::init([](double mu, double sigma) {
             return TruncNormalDist(TruncNormal{mu, sigma});
           }),
           py::arg("mu"), py::arg("sigma"))
      .def_property_readonly(
          "mu", [](const TruncNormalDist& d) { return d.params().mu; })
      .def_property_readonly(
          "sigma", [](const TruncNormalDist& d) { return d.params().sigma; });

  py::class_<GammaDist, Dist, std::shared_ptr<GammaDist>>(
      m, "GammaDist", "Gamma parameterized by mean and standard deviation.")
      .def(py::init([](double mean, double sd) {
             return GammaDist(GammaMeanSd{mean, sd});
           }),
           py::arg("mean"), py::arg("sd"))
      .def_property_readonly(
          "mean_param", [](const GammaDist& d) { return d.params().mean; })
      .def_property_readonly(
          "sd_param", [](const GammaDist& d) { return d.params().sd; });

  py::class_<MixtureDist, Dist, std::shared_ptr<MixtureDist>>(m, "MixtureDist")
      .def(py::init([](std::vector<double> weights,
                       std::vector<std::shared_ptr<Dist>> components) {
             std::vector<std::shared_ptr<const Dist>> cs(components.begin(),
                                                         components.end());
             return MixtureDist(std::move(weights), std::move(cs));
           }),
           py::arg("weights"), py::arg("components"))
      .def_property_readonly("component_count", &MixtureDist::component_count)
      .def_property_readonly("weights", &MixtureDist::weights)
      .def("component", &MixtureDist::component, py::arg("i"),
           py::return_value_policy::reference_internal);

  m.def("crps_quadrature",
        [](const Dist& dist, double obs, const QuadratureOptions& opt) {
          return crps_quadrature(dist, obs, opt);
        },
        py::arg("dist"), py::arg("obs"),
        py::arg("options") = QuadratureOptions{},
        "CRPS by adaptive quadrature, independent of any closed form.");
  m.def("crps_ensemble",
        [](std::vector<double> members, double obs) {
          return crps_ensemble(members, obs);
        },
        py::arg("members"), py::arg("obs"),
        "Empirical-CDF CRPS of a raw ensemble, pairwise form.");

  // ---- fitting -----------------------------------------------------------

  py::class_<EmOptions>(m, "EmOptions")
      .def(py::init([](double tol, int max_iter, int mstep_max_iter,
                       double mstep_tol) {
             EmOptions o;
             o.tol = tol;
             o.max_iter = max_iter;
             o.mstep_max_iter = mstep_max_iter;
             o.mstep_tol = mstep_tol;
             return o;
           }),
           py::arg("tol") = 1e-8, py::arg("max_iter") = 5000,
           py::arg("mstep_max_iter") = 200, py::arg("mstep_tol") = 1e-7)
      .def_readwrite("tol", &EmOptions::tol)
      .def_readwrite("max_iter", &EmOptions::max_iter)
      .def_readwrite("mstep_max_iter", &EmOptions::mstep_max_iter)
      .def_readwrite("mstep_tol", &EmOptions::mstep_tol);

  py::class_<EmosOptions>(m, "EmosOptions")
      .def(py::init([](double tol, int max_iter) {
             EmosOptions o;
             o.tol = tol;
             o.max_iter = max_iter;
             return o;
           }),
           py::arg("tol") = 1e-8, py::arg("max_iter") = 10000)
      .def_readwrite("tol", &EmosOptions::tol)
      .def_readwrite("max_iter", &EmosOptions::max_iter);

  py::class_<BiasFit>(m, "BiasFit", "Member correction f -> b0 + b1*f.")
      .def_readonly("b0", &BiasFit::b0)
      .def_readonly("b1", &BiasFit::b1)
      .def_readonly("fallback", &BiasFit::fallback);

  py::class_<FitInfo>(m, "FitInfo")
      .def_readonly("loglik", &FitInfo::loglik)
      .def_readonly("iterations", &FitInfo::iterations)
      .def_readonly("converged", &FitInfo::converged)
      .def_readonly("loglik_trace", &FitInfo::loglik_trace)
      .def_readonly("sigma_floored", &FitInfo::sigma_floored)
      .def_readonly("mean_shifted", &FitInfo::mean_shifted)
      .def_readonly("clamped_obs", &FitInfo::clamped_obs)
      .def_readonly("floored_weight_groups", &FitInfo::floored_weight_groups)
      .def_readonly("bias_fallback_groups", &FitInfo::bias_fallback_groups)
      .def_readonly("mean_crps", &FitInfo::mean_crps);

  auto bma_normal =
      py::class_<BmaNormalModel>(m, "BmaNormalModel",
                                 "Normal mixture; per-group weights, "
                                 "common sigma, frozen bias regression.")
          .def_readonly("grouping", &BmaNormalModel::grouping)
          .def_property_readonly(
              "bias",
              [](const BmaNormalModel& mm) { return to_string(mm.bias); })
          .def_readonly("bias_by_group", &BmaNormalModel::bias_by_group)
          .def_readonly("weights", &BmaNormalModel::weights)
          .def_readonly("sigma", &BmaNormalModel::sigma)
          .def_readonly("info", &BmaNormalModel::info);
  def_serialize(bma_normal);

  auto bma_gamma =
      py::class_<BmaGammaModel>(m, "BmaGammaModel",
                                "Gamma mixture; component for member f has "
                                "mean b0+b1*f and sd c0+c1*f.")
          .def_readonly("grouping", &BmaGammaModel::grouping)
          .def_readonly("b0", &BmaGammaModel::b0)
          .def_readonly("b1", &BmaGammaModel::b1)
          .def_readonly("c0", &BmaGammaModel::c0)
          .def_readonly("c1", &BmaGammaModel::c1)
          .def_readonly("weights", &BmaGammaModel::weights)
          .def_readonly("info", &BmaGammaModel::info);
  def_serialize(bma_gamma);

  auto bma_tn =
      py::class_<BmaTruncNormalModel>(
          m, "BmaTruncNormalModel",
          "Zero-truncated normal mixture, all parameters from one "
          "likelihood ascent.")
          .def_readonly("grouping", &BmaTruncNormalModel::grouping)
          .def_readonly("location", &BmaTruncNormalModel::location)
          .def_readonly("weights", &BmaTruncNormalModel::weights)
          .def_readonly("sigma", &BmaTruncNormalModel::sigma)
          .def_readonly("info", &BmaTruncNormalModel::info);
  def_serialize(bma_tn);

  auto emos =
      py::class_<EmosModel>(m, "EmosModel",
                            "mu = a0 + sum_k a_k * (group k sum), "
                            "sigma^2 = b0 + b1 * ensemble variance.")
          .def_property_readonly(
              "family",
              [](const EmosModel& mm) { return to_string(mm.family); })
          .def_readonly("grouping", &EmosModel::grouping)
          .def_readonly("a0", &EmosModel::a0)
          .def_readonly("a", &EmosModel::a)
          .def_readonly("b0", &EmosModel::b0)
          .def_readonly("b1", &EmosModel::b1)
          .def_readonly("info", &EmosModel::info);
  def_serialize(emos);

  m.def("parse_model",
        [](std::string_view text) { return parse_model(text); },
        py::arg("text"),
        "Inverse of Model.serialize(); returns the matching model type.");

  m.def("fit_bma_normal_em",
        [](const std::vector<ForecastCase>& cases, const GroupingScheme& g,
           std::string_view bias, const EmOptions& opt) {
          return fit_bma_normal_em(case_ptrs(cases), g, parse_bias_mode(bias),
                                   opt);
        },
        py::arg("cases"), py::arg("grouping"), py::arg("bias") = "linear",
        py::arg("options") = EmOptions{},
        "Maximum-likelihood EM fit; cases without observations are skipped.");
  m.def("fit_bma_normal_crps",
        [](const std::vector<ForecastCase>& cases, const GroupingScheme& g,
           std::string_view bias, const EmOptions& opt) {
          return fit_bma_normal_crps(case_ptrs(cases), g,
                                     parse_bias_mode(bias), opt);
        },
        py::arg("cases"), py::arg("grouping"), py::arg("bias") = "linear",
        py::arg("options") = EmOptions{},
        "Weights and sigma minimize mean mixture CRPS instead of likelihood.");
  m.def("fit_bma_gamma",
        [](const std::vector<ForecastCase>& cases, const GroupingScheme& g,
           const EmOptions& opt) {
          return fit_bma_gamma(case_ptrs(cases), g, opt);
        },
        py::arg("cases"), py::arg("grouping"),
        py::arg("options") = EmOptions{});
  m.def("fit_bma_truncnormal_ml",
        [](const std::vector<ForecastCase>& cases, const GroupingScheme& g,
           const EmOptions& opt) {
          return fit_bma_truncnormal_ml(case_ptrs(cases), g, opt);
        },
        py::arg("cases"), py::arg("grouping"),
        py::arg("options") = EmOptions{});
  m.def("fit_emos",
        [](const std::vector<ForecastCase>& cases, const GroupingScheme& g,
           std::string_view family, const EmosOptions& opt) {
          return fit_emos(case_ptrs(cases), g, parse_emos_family(family), opt);
        },
        py::arg("cases"), py::arg("grouping"), py::arg("family") = "normal",
        py::arg("options") = EmosOptions{},
        "Minimum mean closed-form CRPS over the observed cases.");

  m.def("predict_bma",
        [](const BmaNormalModel& model, const ForecastCase& c) {
          return predict_bma(model, c);
        },
        py::arg("model"), py::arg("case"));
  m.def("predict_bma",
        [](const BmaGammaModel& model, const ForecastCase& c) {
          return predict_bma(model, c);
        },
        py::arg("model"), py::arg("case"));
  m.def("predict_bma",
        [](const BmaTruncNormalModel& model, const ForecastCase& c) {
          return predict_bma(model, c);
        },
        py::arg("model"), py::arg("case"));
  m.def("predict_emos",
        [](const EmosModel& model, const ForecastCase& c) {
          return std::const_pointer_cast<Dist>(predict_emos(model, c));
        },
        py::arg("model"), py::arg("case"));

  // ---- verification ------------------------------------------------------

  py::class_<Rng>(m, "Rng", "Deterministic generator, byte-stable seeds.")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform01", &Rng::uniform01)
      .def("below", &Rng::below, py::arg("n"))
      .def("normal", &Rng::normal, py::arg("mu"), py::arg("sigma"))
      .def("trunc_normal", &Rng::trunc_normal, py::arg("mu"), py::arg("sigma"))
      .def("gamma_mean_sd", &Rng::gamma_mean_sd, py::arg("mean"),
           py::arg("sd"));

  m.def("verification_rank",
        [](std::vector<double> members, double obs, Rng& rng) {
          return verification_rank(members, obs, rng);
        },
        py::arg("members"), py::arg("obs"), py::arg("rng"),
        "Rank of obs among the members, 1..M+1, ties broken at random.");
  m.def("pit_value",
        [](const Dist& dist, double obs) { return pit_value(dist, obs); },
        py::arg("dist"), py::arg("obs"));

  py::class_<HistogramData>(m, "HistogramData")
      .def_readonly("edges", &HistogramData::edges)
      .def_readonly("counts", &HistogramData::counts)
      .def_readonly("total", &HistogramData::total);

  m.def("rank_histogram",
        [](std::vector<int> ranks, int member_count) {
          return rank_histogram(ranks, member_count);
        },
        py::arg("ranks"), py::arg("member_count"));
  m.def("pit_histogram",
        [](std::vector<double> pits, int bins) {
          return pit_histogram(pits, bins);
        },
        py::arg("pits"), py::arg("bins") = 11);

  py::class_<KsResult>(m, "KsResult")
      .def_readonly("d", &KsResult::d)
      .def_readonly("p", &KsResult::p);

  m.def("ks_uniform_test",
        [](std::vector<double> values) { return ks_uniform_test(values); },
        py::arg("values"), "Kolmogorov-Smirnov test against uniform [0,1].");
  m.def("central_interval",
        [](const Dist& dist, double level) {
          Interval iv = central_interval(dist, level);
          return std::make_pair(iv.lo, iv.hi);
        },
        py::arg("dist"), py::arg("level"),
        "(lo, hi) central interval of the given coverage level.");

  py::class_<ScoreReport>(m, "ScoreReport")
      .def_readonly("n_cases", &ScoreReport::n_cases)
      .def_readonly("mean_crps", &ScoreReport::mean_crps)
      .def_readonly("mae_median", &ScoreReport::mae_median)
      .def_readonly("mae_mean", &ScoreReport::mae_mean)
      .def_readonly("rmse_median", &ScoreReport::rmse_median)
      .def_readonly("rmse_mean", &ScoreReport::rmse_mean)
      .def_readonly("avg_width", &ScoreReport::avg_width)
      .def_readonly("coverage", &ScoreReport::coverage)
      .def_readonly("level", &ScoreReport::level);

  // ---- synthetic data ----------------------------------------------------

  py::class_<SynthResult>(m, "SynthResult")
      .def_readonly("data", &SynthResult::data)
      .def_readonly("truth", &SynthResult::truth)
      .def_readonly("true_crps", &SynthResult::true_crps)
      .def_readonly("exact_mean_crps", &SynthResult::exact_mean_crps);

  m.def("generate_synth",
        [](std::string_view scenario, std::uint64_t seed, int n_dates,
           int n_stations, int n_members, Date start,
           std::vector<Date> missing, std::map<std::string, double> params) {
          SynthSpec spec;
          spec.scenario = parse_scenario(scenario);
          spec.seed = seed;
          spec.n_dates = n_dates;
          spec.n_stations = n_stations;
          spec.n_members = n_members;
          spec.start = start;
          spec.missing = std::move(missing);
          spec.params = std::move(params);
          return generate_synth(spec);
        },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("n_dates") = 60,
        py::arg("n_stations") = 5, py::arg("n_members") = 11,
        py::arg("start") = Date::from_ymd(2012, 4, 1),
        py::arg("missing") = std::vector<Date>{},
        py::arg("params") = std::map<std::string, double>{},
        "Dataset with known truth and the exact CRPS of the true law.");
  m.def("scenario_defaults",
        [](std::string_view scenario) {
          return scenario_defaults(parse_scenario(scenario));
        },
        py::arg("scenario"));
  m.def("scenario_kind",
        [](std::string_view scenario) {
          return to_string(scenario_kind(parse_scenario(scenario)));
        },
        py::arg("scenario"));

  // ---- experiment harness ------------------------------------------------

  py::class_<ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init([](std::string_view method, std::string_view bias,
                       int training_length, std::optional<Date> eval_start,
                       double interval_level, std::uint64_t seed,
                       double max_skip_fraction) {
             ExperimentSpec s;
             s.method = parse_method(method);
             s.bias = parse_bias_mode(bias);
             s.training_length = training_length;
             s.eval_start = eval_start;
             s.interval_level = interval_level;
             s.seed = seed;
             s.max_skip_fraction = max_skip_fraction;
             return s;
           }),
           py::arg("method") = "emos_normal", py::arg("bias") = "linear",
           py::arg("training_length") = 30,
           py::arg("eval_start") = std::nullopt,
           py::arg("interval_level") = 10.0 / 12.0, py::arg("seed") = 1,
           py::arg("max_skip_fraction") = 0.05)
      .def_property(
          "method",
          [](const ExperimentSpec& s) { return to_string(s.method); },
          [](ExperimentSpec& s, std::string_view v) {
            s.method = parse_method(v);
          })
      .def_property(
          "bias", [](const ExperimentSpec& s) { return to_string(s.bias); },
          [](ExperimentSpec& s, std::string_view v) {
            s.bias = parse_bias_mode(v);
          })
      .def_readwrite("training_length", &ExperimentSpec::training_length)
      .def_readwrite("eval_start", &ExperimentSpec::eval_start)
      .def_readwrite("interval_level", &ExperimentSpec::interval_level)
      .def_readwrite("seed", &ExperimentSpec::seed)
      .def_readwrite("max_skip_fraction", &ExperimentSpec::max_skip_fraction);

  py::class_<CaseScore>(m, "CaseScore")
      .def_readonly("date", &CaseScore::date)
      .def_readonly("station", &CaseScore::station)
      .def_readonly("obs", &CaseScore::obs)
      .def_readonly("crps", &CaseScore::crps)
      .def_readonly("pit", &CaseScore::pit)
      .def_readonly("rank", &CaseScore::rank)
      .def_readonly("lo", &CaseScore::lo)
      .def_readonly("hi", &CaseScore::hi)
      .def_readonly("median", &CaseScore::median)
      .def_readonly("mean", &CaseScore::mean)
      .def_readonly("covered", &CaseScore::covered)
      .def_readonly("pit_randomized", &CaseScore::pit_randomized);

  py::class_<DatedModel>(m, "DatedModel")
      .def_readonly("date", &DatedModel::date)
      .def_readonly("text", &DatedModel::text);

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_property_readonly(
          "method",
          [](const ExperimentResult& r) { return to_string(r.method); })
      .def_readonly("training_length", &ExperimentResult::training_length)
      .def_readonly("eval_start", &ExperimentResult::eval_start)
      .def_readonly("report", &ExperimentResult::report)
      .def_readonly("cases", &ExperimentResult::cases)
      .def_readonly("pit_ks", &ExperimentResult::pit_ks)
      .def_readonly("hist", &ExperimentResult::hist)
      .def_readonly("n_windows", &ExperimentResult::n_windows)
      .def_readonly("skipped_cases", &ExperimentResult::skipped_cases)
      .def_readonly("pit_randomized_count",
                    &ExperimentResult::pit_randomized_count)
      .def_readonly("skip_log", &ExperimentResult::skip_log)
      .def_readonly("fitted_models", &ExperimentResult::fitted_models);

  m.def("run_experiment",
        [](const Dataset& ds, const GroupingScheme& g,
           const ExperimentSpec& spec, bool keep_models) {
          return run_experiment(ds, g, spec, keep_models);
        },
        py::arg("dataset"), py::arg("grouping"), py::arg("spec"),
        py::arg("keep_models") = false,
        "Rolling-window fits, one model per target date, scored per case.");

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("length", &SweepRow::length)
      .def_readonly("report", &SweepRow::report);

  py::class_<SweepOptimum>(m, "SweepOptimum")
      .def_readonly("score", &SweepOptimum::score)
      .def_readonly("best_length", &SweepOptimum::best_length)
      .def_readonly("best_value", &SweepOptimum::best_value);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("rows", &SweepResult::rows)
      .def_readonly("optima", &SweepResult::optima)
      .def_readonly("reference_length", &SweepResult::reference_length)
      .def_readonly("reference_report", &SweepResult::reference_report);

  m.def("sweep_training_length",
        [](const Dataset& ds, const GroupingScheme& g,
           const ExperimentSpec& spec, int length_lo, int length_hi,
           std::optional<int> reference_length, int jobs) {
          return sweep_training_length(ds, g, spec, length_lo, length_hi,
                                       reference_length, jobs);
        },
        py::arg("dataset"), py::arg("grouping"), py::arg("spec"),
        py::arg("length_lo"), py::arg("length_hi"),
        py::arg("reference_length") = std::nullopt, py::arg("jobs") = 1,
        "Scores every training length on one shared evaluation window.");

  py::class_<ComparisonRow>(m, "ComparisonRow")
      .def_property_readonly(
          "method",
          [](const ComparisonRow& r) { return to_string(r.method); })
      .def_readonly("report", &ComparisonRow::report)
      .def_readonly("ks_p", &ComparisonRow::ks_p);

  m.def("compare_methods",
        [](const Dataset& ds, const GroupingScheme& g,
           std::vector<ExperimentSpec> specs) {
          return compare_methods(ds, g, specs);
        },
        py::arg("dataset"), py::arg("grouping"), py::arg("specs"),
        "All specs must score the same (date, station) cases.");

  m.def("format_cases_csv",
        [](const std::vector<CaseScore>& cases, std::string_view method) {
          return format_cases_csv(cases, parse_method(method));
        },
        py::arg("cases"), py::arg("method"));
  m.def("format_scores_csv",
        [](const std::vector<ExperimentResult>& results) {
          return format_scores_csv(results);
        },
        py::arg("results"));
  m.def("format_sweep_csv",
        [](const SweepResult& sweep, std::string_view method) {
          return format_sweep_csv(sweep, parse_method(method));
        },
        py::arg("sweep"), py::arg("method"));
  m.def("format_sweep_optima_csv",
        [](const SweepResult& sweep) { return format_sweep_optima_csv(sweep); },
        py::arg("sweep"));
  m.def("format_hist_csv",
        [](const HistogramData& hist) { return format_hist_csv(hist); },
        py::arg("hist"));
}
