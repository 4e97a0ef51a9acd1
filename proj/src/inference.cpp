#include "snn/inference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace snn {
namespace {

double value_at(const std::vector<int>& keys, const std::vector<double>& values, int disease) {
  const auto it = std::find(keys.begin(), keys.end(), disease);
  if (it == keys.end()) throw InvalidArgument("unknown disease index " + std::to_string(disease));
  return values[static_cast<std::size_t>(it - keys.begin())];
}

double to_double(const Weight& w) {
  return static_cast<double>(w.numerator()) / static_cast<double>(w.denominator());
}

}  // namespace

double AgreementVector::at(int disease) const { return value_at(diseases, values, disease); }
double LikelihoodVector::at(int disease) const { return value_at(diseases, values, disease); }

ResponseMatrix parse_responses(std::string_view text) {
  ResponseMatrix out;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first.front() == '#') continue;
    std::string second;
    std::string extra;
    if (!(fields >> second) || (fields >> extra)) throw ParseError(line_no, "expected '<s> <i>'");
    auto to_int = [&](const std::string& tok) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw ParseError(line_no, "invalid index '" + tok + "'");
      }
      return v;
    };
    out.confirmed.insert({to_int(first), to_int(second)});
  }
  return out;
}

ResponseMatrix load_responses_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read response file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_responses(buf.str());
}

std::string format_responses(const ResponseMatrix& responses) {
  std::ostringstream os;
  for (const auto& r : responses.confirmed) os << r.symptom << ' ' << r.indicator << '\n';
  return os.str();
}

void check_responses(const KnowledgeBase& kb, const ResponseMatrix& responses, ChoiceRule rule) {
  int previous_symptom = 0;
  for (const auto& r : responses.confirmed) {
    if (!kb.symptoms.find(r.symptom)) {
      throw InvalidArgument("response references unknown symptom " + std::to_string(r.symptom));
    }
    if (!kb.indicators.is_defined(r.symptom, r.indicator)) {
      throw InvalidArgument("response references undefined indicator slot " + std::to_string(r.indicator) +
                            " of symptom " + std::to_string(r.symptom));
    }
    // The set is ordered by symptom, so repeats are adjacent.
    if (rule == ChoiceRule::single && r.symptom == previous_symptom) {
      throw InvalidArgument("more than one indicator confirmed for symptom " + std::to_string(r.symptom));
    }
    previous_symptom = r.symptom;
  }
}

AgreementVector agreement(const NormalizedWeightTable& weights, const ResponseMatrix& responses) {
  for (const auto& r : responses.confirmed) {
    const auto it = weights.indicator_slots.find(r.symptom);
    if (it == weights.indicator_slots.end() || r.indicator < 1 || r.indicator > it->second) {
      throw InvalidArgument("catalog mismatch: response (" + std::to_string(r.symptom) + "," +
                            std::to_string(r.indicator) + ") is not defined by the weight table");
    }
  }
  // Exact rational sum per disease, converted once at the scoring boundary.
  std::map<int, Weight> sums;
  for (const auto& e : weights.entries) {
    if (responses.confirmed.count({e.key.symptom, e.key.indicator})) sums[e.key.disease] += e.normalized;
  }
  AgreementVector out;
  out.diseases = weights.disease_order;
  out.values.reserve(out.diseases.size());
  for (int d : out.diseases) {
    const auto it = sums.find(d);
    out.values.push_back(it == sums.end() ? 0.0 : to_double(it->second));
  }
  return out;
}

std::optional<LikelihoodVector> likelihood(const AgreementVector& agreement) {
  double total = 0.0;
  for (double a : agreement.values) total += a;
  if (!(total > kLikelihoodEpsilon)) return std::nullopt;
  LikelihoodVector out;
  out.diseases = agreement.diseases;
  out.values.reserve(agreement.values.size());
  for (double a : agreement.values) out.values.push_back(a / total);
  return out;
}

DiagnosisStats stats(const AgreementVector& agreement, VarianceConvention convention) {
  DiagnosisStats out;
  out.convention = convention;
  const auto n = agreement.values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double a : agreement.values) sum += a;
  out.mean = sum / static_cast<double>(n);
  double squares = 0.0;
  for (double a : agreement.values) squares += (a - out.mean) * (a - out.mean);
  const double divisor =
      convention == VarianceConvention::population ? static_cast<double>(n) : static_cast<double>(n) - 1.0;
  out.sigma = divisor > 0.0 ? std::sqrt(squares / divisor) : 0.0;
  if (out.sigma > kSigmaEpsilon) {
    std::vector<double> deltas;
    deltas.reserve(n);
    for (double a : agreement.values) deltas.push_back((a - out.mean) / out.sigma);
    out.deltas = std::move(deltas);
  }
  return out;
}

std::string_view to_string(Reliability r) {
  switch (r) {
    case Reliability::outstanding: return "outstanding";
    case Reliability::moderate: return "moderate";
    case Reliability::weak: return "weak";
    case Reliability::undefined: return "undefined";
  }
  return "undefined";
}

// Bands follow the <A>+sigma and <A>+2 sigma reference lines of the chart.
Reliability reliability_from_delta(std::optional<double> delta) {
  if (!delta) return Reliability::undefined;
  if (*delta >= 2.0) return Reliability::outstanding;
  if (*delta >= 1.0) return Reliability::moderate;
  return Reliability::weak;
}

std::optional<double> DiagnosisResult::selected_delta() const {
  if (!stats.deltas) return std::nullopt;
  const auto it = std::find(agreement.diseases.begin(), agreement.diseases.end(), selected);
  if (it == agreement.diseases.end()) return std::nullopt;
  return (*stats.deltas)[static_cast<std::size_t>(it - agreement.diseases.begin())];
}

DiagnosisResult diagnose(const KnowledgeBase& kb, const ResponseMatrix& responses, ChoiceRule rule) {
  check_responses(kb, responses, rule);
  const auto weights = normalize(kb);

  DiagnosisResult result;
  result.agreement = agreement(weights, responses);
  if (std::all_of(result.agreement.values.begin(), result.agreement.values.end(),
                  [](double a) { return a == 0.0; })) {
    throw NoSignal();
  }
  result.likelihood = likelihood(result.agreement);
  result.stats = stats(result.agreement);
  result.kb_version = kb.version;
  for (int d : result.agreement.diseases) result.disease_names.push_back(kb.diseases.find(d)->name);

  // Strict comparison keeps the lowest index on ties.
  std::size_t best = 0;
  for (std::size_t k = 1; k < result.agreement.values.size(); ++k) {
    if (result.agreement.values[k] > result.agreement.values[best]) best = k;
  }
  result.selected = result.agreement.diseases[best];
  result.selected_name = result.disease_names[best];
  result.reliability = reliability_from_delta(result.selected_delta());
  return result;
}

ChartData chart_data(const DiagnosisResult& result) {
  ChartData chart;
  chart.selected = result.selected;
  for (std::size_t k = 0; k < result.agreement.diseases.size(); ++k) {
    ChartBar bar;
    bar.disease = result.agreement.diseases[k];
    bar.name = k < result.disease_names.size() ? result.disease_names[k] : std::string{};
    bar.agreement_pct = 100.0 * result.agreement.values[k];
    if (result.likelihood) bar.likelihood_pct = 100.0 * result.likelihood->values[k];
    chart.bars.push_back(std::move(bar));
  }
  if (result.stats.deltas) {
    const double mean = 100.0 * result.stats.mean;
    const double sigma = 100.0 * result.stats.sigma;
    chart.reference = ReferenceLevels{mean, mean + sigma, mean + 2.0 * sigma};
  }
  return chart;
}

}  // namespace snn
