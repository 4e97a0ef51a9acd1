#include "snn/selftest.hpp"

#include <algorithm>
#include <cmath>

namespace snn {

FormalResponseSet formal_responses(const KnowledgeBase& kb, int disease) {
  if (!kb.diseases.find(disease)) throw InvalidArgument("unknown disease index " + std::to_string(disease));
  FormalResponseSet set;
  set.disease = disease;
  for (const auto& e : kb.weights.entries) {
    if (e.key.disease == disease && e.weight > 0) set.responses.confirmed.insert({e.key.symptom, e.key.indicator});
  }
  return set;
}

DiagnosisResult self_test(const KnowledgeBase& kb, int disease) {
  return diagnose(kb, formal_responses(kb, disease).responses, ChoiceRule::multiple);
}

OptimalProfile optimal_likelihood_profile(const KnowledgeBase& kb) {
  OptimalProfile profile;
  for (const auto& d : kb.diseases.entries) {
    const auto result = self_test(kb, d.index);
    ProfileEntry entry;
    entry.disease = d.index;
    entry.name = d.name;
    entry.likelihood_pct = result.likelihood ? 100.0 * result.likelihood->at(d.index) : 0.0;
    entry.likelihood_rounded = static_cast<int>(std::lround(entry.likelihood_pct));
    const auto it = std::find(result.agreement.diseases.begin(), result.agreement.diseases.end(), d.index);
    if (result.stats.deltas) {
      entry.delta = (*result.stats.deltas)[static_cast<std::size_t>(it - result.agreement.diseases.begin())];
    }
    entry.selected = result.selected;
    profile.entries.push_back(std::move(entry));
  }
  if (profile.entries.empty()) return profile;

  const auto n = static_cast<double>(profile.entries.size());
  double sum = 0.0;
  double sum_unrounded = 0.0;
  for (const auto& e : profile.entries) {
    sum += e.likelihood_rounded;
    sum_unrounded += e.likelihood_pct;
  }
  profile.mean_pct = sum / n;
  profile.mean_unrounded_pct = sum_unrounded / n;
  double squares = 0.0;
  for (const auto& e : profile.entries) {
    squares += (e.likelihood_rounded - profile.mean_pct) * (e.likelihood_rounded - profile.mean_pct);
  }
  profile.sigma_pct = std::sqrt(squares / n);

  const auto [lo, hi] = std::minmax_element(
      profile.entries.begin(), profile.entries.end(),
      [](const auto& a, const auto& b) { return a.likelihood_rounded < b.likelihood_rounded; });
  profile.min_pct = lo->likelihood_rounded;
  profile.max_pct = hi->likelihood_rounded;
  for (const auto& e : profile.entries) {
    if (e.likelihood_rounded == profile.max_pct) profile.argmax.push_back(e.disease);
    if (e.likelihood_rounded == profile.min_pct) profile.argmin.push_back(e.disease);
  }
  return profile;
}

}  // namespace snn
