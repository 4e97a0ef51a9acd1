#include "snn/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace snn {
namespace {

std::string_view to_string(VarianceConvention c) {
  return c == VarianceConvention::population ? "population" : "sample";
}

VarianceConvention convention_from(const std::string& s) {
  if (s == "population") return VarianceConvention::population;
  if (s == "sample") return VarianceConvention::sample;
  throw InvalidArgument("unknown variance convention '" + s + "'");
}

Reliability reliability_from(const std::string& s) {
  if (s == "outstanding") return Reliability::outstanding;
  if (s == "moderate") return Reliability::moderate;
  if (s == "weak") return Reliability::weak;
  return Reliability::undefined;
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", round_one_decimal(100.0 * fraction));
  return buf;
}

}  // namespace

double round_one_decimal(double value) {
  const double r = std::round(value * 10.0) / 10.0;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

Json to_json(const DiagnosisResult& r) {
  Json j;
  j["diseases"] = r.agreement.diseases;
  j["disease_names"] = r.disease_names;
  j["agreement"] = r.agreement.values;
  j["likelihood"] = r.likelihood ? Json(r.likelihood->values) : Json(nullptr);
  j["stats"] = {{"mean", r.stats.mean},
                {"sigma", r.stats.sigma},
                {"variance_convention", to_string(r.stats.convention)},
                {"deltas", r.stats.deltas ? Json(*r.stats.deltas) : Json(nullptr)}};
  j["selected"] = r.selected;
  j["selected_name"] = r.selected_name;
  j["reliability"] = to_string(r.reliability);
  j["kb_version"] = r.kb_version;
  return j;
}

DiagnosisResult result_from_json(const Json& j) {
  DiagnosisResult r;
  r.agreement.diseases = j.at("diseases").get<std::vector<int>>();
  r.agreement.values = j.at("agreement").get<std::vector<double>>();
  r.disease_names = j.at("disease_names").get<std::vector<std::string>>();
  if (!j.at("likelihood").is_null()) {
    r.likelihood = LikelihoodVector{r.agreement.diseases, j.at("likelihood").get<std::vector<double>>()};
  }
  const auto& s = j.at("stats");
  r.stats.mean = s.at("mean").get<double>();
  r.stats.sigma = s.at("sigma").get<double>();
  r.stats.convention = convention_from(s.at("variance_convention").get<std::string>());
  if (!s.at("deltas").is_null()) r.stats.deltas = s.at("deltas").get<std::vector<double>>();
  r.selected = j.at("selected").get<int>();
  r.selected_name = j.at("selected_name").get<std::string>();
  r.reliability = reliability_from(j.at("reliability").get<std::string>());
  r.kb_version = j.at("kb_version").get<std::uint64_t>();
  return r;
}

Json to_json(const ChartData& chart) {
  Json bars = Json::array();
  for (const auto& b : chart.bars) {
    bars.push_back({{"disease", b.disease},
                    {"name", b.name},
                    {"agreement_pct", round_one_decimal(b.agreement_pct)},
                    {"likelihood_pct", b.likelihood_pct ? Json(round_one_decimal(*b.likelihood_pct)) : Json(nullptr)}});
  }
  Json j{{"bars", bars}, {"selected", chart.selected}};
  if (chart.reference) {
    j["reference_levels"] = {{"mean_pct", round_one_decimal(chart.reference->mean_pct)},
                             {"mean_plus_sigma_pct", round_one_decimal(chart.reference->plus_one_sigma_pct)},
                             {"mean_plus_2sigma_pct", round_one_decimal(chart.reference->plus_two_sigma_pct)}};
  } else {
    j["reference_levels"] = nullptr;
  }
  return j;
}

Json to_json(const OptimalProfile& p) {
  Json entries = Json::array();
  for (const auto& e : p.entries) {
    entries.push_back({{"disease", e.disease},
                       {"name", e.name},
                       {"likelihood_pct", round_one_decimal(e.likelihood_pct)},
                       {"likelihood_rounded", e.likelihood_rounded},
                       {"delta", e.delta ? Json(*e.delta) : Json(nullptr)},
                       {"selected", e.selected}});
  }
  return {{"entries", entries},
          {"mean_pct", p.mean_pct},
          {"mean_unrounded_pct", p.mean_unrounded_pct},
          {"sigma_pct", p.sigma_pct},
          {"max_pct", p.max_pct},
          {"min_pct", p.min_pct},
          {"argmax", p.argmax},
          {"argmin", p.argmin}};
}

Json to_json(const KnowledgeBase& kb) {
  Json diseases = Json::array();
  for (const auto& d : kb.diseases.entries) diseases.push_back({{"index", d.index}, {"name", d.name}});
  Json symptoms = Json::array();
  for (const auto& s : kb.symptoms.entries) {
    symptoms.push_back({{"index", s.index}, {"name", s.name}, {"indicators", kb.indicators.labels(s.index)}});
  }
  Json weights = Json::array();
  for (const auto& e : kb.weights.entries) {
    weights.push_back({{"d", e.key.disease}, {"s", e.key.symptom}, {"i", e.key.indicator}, {"w", format_weight(e.weight)}});
  }
  return {{"version", kb.version}, {"diseases", diseases}, {"symptoms", symptoms}, {"weights", weights}};
}

Json to_json(const Violation& v) {
  return {{"code", v.code},       {"disease", v.disease}, {"symptom", v.symptom},
          {"indicator", v.indicator}, {"message", v.message}};
}

std::string format_result_table(const DiagnosisResult& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%3s  %-40s %8s %8s %8s\n", "d", "disease", "A", "L", "delta");
  os << line;
  for (std::size_t k = 0; k < r.agreement.diseases.size(); ++k) {
    const auto name = k < r.disease_names.size() ? r.disease_names[k] : std::string{};
    const auto l = r.likelihood ? pct(r.likelihood->values[k]) : std::string("-");
    char delta[16] = "-";
    if (r.stats.deltas) std::snprintf(delta, sizeof delta, "%.2f", (*r.stats.deltas)[k]);
    std::snprintf(line, sizeof line, "%3d%s %-40s %8s %8s %8s\n", r.agreement.diseases[k],
                  r.agreement.diseases[k] == r.selected ? "*" : " ", name.c_str(), pct(r.agreement.values[k]).c_str(),
                  l.c_str(), delta);
    os << line;
  }
  os << "\nmean A " << pct(r.stats.mean);
  if (r.stats.deltas) {
    os << "   mean+sigma " << pct(r.stats.mean + r.stats.sigma) << "   mean+2sigma "
       << pct(r.stats.mean + 2.0 * r.stats.sigma);
  } else {
    os << "   (sigma = 0, no reference levels)";
  }
  os << "\nselected: " << r.selected << " " << r.selected_name << " (" << to_string(r.reliability) << ")\n";
  return os.str();
}

std::string format_profile_table(const OptimalProfile& p) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%3s  %-40s %8s %8s\n", "d", "disease", "L_o", "delta");
  os << line;
  for (const auto& e : p.entries) {
    char delta[16] = "-";
    if (e.delta) std::snprintf(delta, sizeof delta, "%.2f", *e.delta);
    char lo[16];
    std::snprintf(lo, sizeof lo, "%.1f%%", round_one_decimal(e.likelihood_pct));
    std::snprintf(line, sizeof line, "%3d  %-40s %8s %8s\n", e.disease, e.name.c_str(), lo, delta);
    os << line;
  }
  if (p.entries.size() > 1) {
    os << "\nL_o = (";
    for (std::size_t k = 0; k < p.entries.size(); ++k) os << (k ? "," : "") << p.entries[k].likelihood_rounded;
    os << ")%\n";
    char stats[200];
    std::snprintf(stats, sizeof stats, "mean %.1f%% (unrounded %.1f%%)   sigma %.1f%%\n", p.mean_pct,
                  p.mean_unrounded_pct, p.sigma_pct);
    os << stats;
    auto join = [](const std::vector<int>& v) {
      std::string s;
      for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
      return s;
    };
    os << "max " << p.max_pct << "% at d=" << join(p.argmax) << "   min " << p.min_pct << "% at d=" << join(p.argmin)
       << '\n';
  }
  return os.str();
}

}  // namespace snn
