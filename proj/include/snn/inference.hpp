#pragma once
// Scoring engine: agreement of each disease neuron with the confirmed
// indicators, likelihood as the share of total excitation, and the
// relative deviation of each neuron from the layer mean.

#include "snn/knowledge_base.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace snn {

struct IndicatorRef {
  int symptom = 0;
  int indicator = 0;
  auto operator<=>(const IndicatorRef&) const = default;
};

// R(s,i) = 1 for every confirmed pair, 0 otherwise.
struct ResponseMatrix {
  std::set<IndicatorRef> confirmed;

  bool empty() const { return confirmed.empty(); }
  bool operator==(const ResponseMatrix&) const = default;
};

// Questionnaire answers allow one indicator per symptom; formal sets and
// response files may confirm several.
enum class ChoiceRule { multiple, single };

// Response file: one "<s> <i>" per line, '#' comments, blank lines ignored.
ResponseMatrix parse_responses(std::string_view text);
ResponseMatrix load_responses_file(const std::filesystem::path& path);
std::string format_responses(const ResponseMatrix& responses);

// Throws InvalidArgument naming the first offending pair.
void check_responses(const KnowledgeBase& kb, const ResponseMatrix& responses, ChoiceRule rule);

// Values are ordered like the disease catalog.
struct AgreementVector {
  std::vector<int> diseases;
  std::vector<double> values;

  double at(int disease) const;
  bool operator==(const AgreementVector&) const = default;
};

struct LikelihoodVector {
  std::vector<int> diseases;
  std::vector<double> values;

  double at(int disease) const;
  bool operator==(const LikelihoodVector&) const = default;
};

enum class VarianceConvention { population, sample };

// Sample variance (divide by N_d - 1) gives 3.25 sigma for the hypertension
// self-test, the reference figure; population variance gives 3.36.
inline constexpr VarianceConvention kDefaultVariance = VarianceConvention::sample;

inline constexpr double kLikelihoodEpsilon = 1e-9;
inline constexpr double kSigmaEpsilon = 1e-12;

struct DiagnosisStats {
  double mean = 0.0;
  double sigma = 0.0;
  VarianceConvention convention = kDefaultVariance;
  // Empty when sigma is (numerically) zero.
  std::optional<std::vector<double>> deltas;

  bool operator==(const DiagnosisStats&) const = default;
};

enum class Reliability { outstanding, moderate, weak, undefined };

std::string_view to_string(Reliability r);
Reliability reliability_from_delta(std::optional<double> delta);

struct DiagnosisResult {
  AgreementVector agreement;
  std::optional<LikelihoodVector> likelihood;
  DiagnosisStats stats;
  int selected = 0;
  std::string selected_name;
  Reliability reliability = Reliability::undefined;
  std::uint64_t kb_version = 0;
  std::vector<std::string> disease_names;

  std::optional<double> selected_delta() const;
  bool operator==(const DiagnosisResult&) const = default;
};

AgreementVector agreement(const NormalizedWeightTable& weights, const ResponseMatrix& responses);

std::optional<LikelihoodVector> likelihood(const AgreementVector& agreement);

DiagnosisStats stats(const AgreementVector& agreement, VarianceConvention convention = kDefaultVariance);

// Throws NoSignal when every agreement is zero.
DiagnosisResult diagnose(const KnowledgeBase& kb, const ResponseMatrix& responses,
                         ChoiceRule rule = ChoiceRule::multiple);

struct ChartBar {
  int disease = 0;
  std::string name;
  double agreement_pct = 0.0;
  std::optional<double> likelihood_pct;
};

struct ReferenceLevels {
  double mean_pct = 0.0;
  double plus_one_sigma_pct = 0.0;
  double plus_two_sigma_pct = 0.0;
};

struct ChartData {
  std::vector<ChartBar> bars;
  std::optional<ReferenceLevels> reference;
  int selected = 0;
};

ChartData chart_data(const DiagnosisResult& result);

}  // namespace snn
