#include "enscal/model_io.hpp"

#include <map>

#include "enscal/errors.hpp"
#include "enscal/textio.hpp"

namespace enscal {
namespace {

constexpr std::string_view kHeader = "enscal_model 1";

void put(std::string& out, std::string_view key, std::string_view value) {
  out += key;
  out += ' ';
  out += value;
  out += '\n';
}

void put(std::string& out, std::string_view key, double value) {
  put(out, key, format_double(value));
}

void put_list(std::string& out, std::string_view key,
              const std::vector<double>& values) {
  std::string joined;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ',';
    joined += format_double(values[i]);
  }
  put(out, key, joined);
}

std::string bias_text(const std::vector<BiasFit>& fits) {
  std::string joined;
  for (size_t i = 0; i < fits.size(); ++i) {
    if (i) joined += '|';
    joined += format_double(fits[i].b0);
    joined += ',';
    joined += format_double(fits[i].b1);
  }
  return joined;
}

std::vector<BiasFit> parse_bias_text(std::string_view text) {
  std::vector<BiasFit> fits;
  for (std::string_view part : split(text, '|')) {
    auto nums = split(part, ',');
    if (nums.size() != 2) fail_data("model file: malformed coefficient pair");
    BiasFit f;
    f.b0 = parse_double(nums[0], "coefficient");
    f.b1 = parse_double(nums[1], "coefficient");
    fits.push_back(f);
  }
  return fits;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  for (std::string_view tok : split(text, ','))
    out.push_back(parse_double(tok, "model value"));
  return out;
}

struct Fields {
  std::map<std::string, std::string, std::less<>> kv;

  std::string_view need(std::string_view key) const {
    auto it = kv.find(key);
    if (it == kv.end())
      fail_data("model file: missing key '" + std::string(key) + "'");
    return it->second;
  }
};

GroupingScheme parse_grouping_text(std::string_view text) {
  std::vector<std::vector<int>> groups;
  for (std::string_view part : split(text, '|')) {
    std::vector<int> g;
    for (std::string_view tok : split(part, ','))
      g.push_back(static_cast<int>(parse_long(tok, "grouping member id")) - 1);
    groups.push_back(std::move(g));
  }
  return GroupingScheme(std::move(groups));
}

}  // namespace

std::string serialize_model(const AnyModel& model) {
  std::string out(kHeader);
  out += '\n';
  if (const auto* m = std::get_if<BmaNormalModel>(&model)) {
    put(out, "family", "bma_normal");
    put(out, "grouping", m->grouping.to_text());
    put(out, "bias_mode", to_string(m->bias));
    put(out, "bias", bias_text(m->bias_by_group));
    put_list(out, "weights", m->weights);
    put(out, "sigma", m->sigma);
  } else if (const auto* g = std::get_if<BmaGammaModel>(&model)) {
    put(out, "family", "bma_gamma");
    put(out, "grouping", g->grouping.to_text());
    put_list(out, "mean_coef", {g->b0, g->b1});
    put_list(out, "sd_coef", {g->c0, g->c1});
    put_list(out, "weights", g->weights);
  } else if (const auto* t = std::get_if<BmaTruncNormalModel>(&model)) {
    put(out, "family", "bma_truncnormal");
    put(out, "grouping", t->grouping.to_text());
    put(out, "location", bias_text(t->location));
    put_list(out, "weights", t->weights);
    put(out, "sigma", t->sigma);
  } else {
    const auto& e = std::get<EmosModel>(model);
    put(out, "family",
        e.family == EmosFamily::normal ? "emos_normal" : "emos_truncnormal");
    put(out, "grouping", e.grouping.to_text());
    put(out, "a0", e.a0);
    put_list(out, "a", e.a);
    put(out, "b0", e.b0);
    put(out, "b1", e.b1);
  }
  return out;
}

AnyModel parse_model(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != kHeader)
    fail_data("model file: expected header '" + std::string(kHeader) + "'");
  Fields f;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    size_t sp = line.find(' ');
    if (sp == std::string_view::npos)
      fail_data("model file: malformed line '" + std::string(line) + "'");
    f.kv.emplace(std::string(line.substr(0, sp)),
                 std::string(trim(line.substr(sp + 1))));
  }

  std::string_view family = f.need("family");
  GroupingScheme grouping = parse_grouping_text(f.need("grouping"));
  if (family == "bma_normal") {
    BmaNormalModel m;
    m.grouping = grouping;
    m.bias = parse_bias_mode(f.need("bias_mode"));
    m.bias_by_group = parse_bias_text(f.need("bias"));
    m.weights = parse_list(f.need("weights"));
    m.sigma = parse_double(f.need("sigma"), "sigma");
    if (static_cast<int>(m.bias_by_group.size()) != grouping.group_count() ||
        static_cast<int>(m.weights.size()) != grouping.group_count())
      fail_data("model file: per-group field size mismatch");
    return m;
  }
  if (family == "bma_gamma") {
    BmaGammaModel m;
    m.grouping = grouping;
    std::vector<double> mean = parse_list(f.need("mean_coef"));
    std::vector<double> sd = parse_list(f.need("sd_coef"));
    if (mean.size() != 2 || sd.size() != 2)
      fail_data("model file: coefficient lists must have 2 entries");
    m.b0 = mean[0];
    m.b1 = mean[1];
    m.c0 = sd[0];
    m.c1 = sd[1];
    m.weights = parse_list(f.need("weights"));
    if (static_cast<int>(m.weights.size()) != grouping.group_count())
      fail_data("model file: per-group field size mismatch");
    return m;
  }
  if (family == "bma_truncnormal") {
    BmaTruncNormalModel m;
    m.grouping = grouping;
    m.location = parse_bias_text(f.need("location"));
    m.weights = parse_list(f.need("weights"));
    m.sigma = parse_double(f.need("sigma"), "sigma");
    if (static_cast<int>(m.location.size()) != grouping.group_count() ||
        static_cast<int>(m.weights.size()) != grouping.group_count())
      fail_data("model file: per-group field size mismatch");
    return m;
  }
  if (family == "emos_normal" || family == "emos_truncnormal") {
    EmosModel m;
    m.family = family == "emos_normal" ? EmosFamily::normal
                                       : EmosFamily::truncnormal;
    m.grouping = grouping;
    m.a0 = parse_double(f.need("a0"), "a0");
    m.a = parse_list(f.need("a"));
    m.b0 = parse_double(f.need("b0"), "b0");
    m.b1 = parse_double(f.need("b1"), "b1");
    if (static_cast<int>(m.a.size()) != grouping.group_count())
      fail_data("model file: per-group field size mismatch");
    return m;
  }
  fail_data("model file: unknown family '" + std::string(family) + "'");
}

}  // namespace enscal
