#pragma once
// Self-testing on formal symptom sets: each disease is diagnosed from its own
// positive-weight indicators, which must excite its neuron fully.

#include "snn/inference.hpp"

#include <vector>

namespace snn {

struct FormalResponseSet {
  int disease = 0;
  ResponseMatrix responses;
};

// {(s,i) : W(d,s,i) > 0}. May hold several indicators of one symptom.
FormalResponseSet formal_responses(const KnowledgeBase& kb, int disease);

DiagnosisResult self_test(const KnowledgeBase& kb, int disease);

struct ProfileEntry {
  int disease = 0;
  std::string name;
  double likelihood_pct = 0.0;  // unrounded
  int likelihood_rounded = 0;
  std::optional<double> delta;
  int selected = 0;
};

// Summary statistics are taken over the integer-rounded percentages.
struct OptimalProfile {
  std::vector<ProfileEntry> entries;
  double mean_pct = 0.0;
  double mean_unrounded_pct = 0.0;
  double sigma_pct = 0.0;  // population
  int max_pct = 0;
  int min_pct = 0;
  std::vector<int> argmax;
  std::vector<int> argmin;
};

OptimalProfile optimal_likelihood_profile(const KnowledgeBase& kb);

}  // namespace snn
