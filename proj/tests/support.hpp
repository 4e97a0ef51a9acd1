#pragma once
// Shared test helpers: the shipped knowledge base, scratch directories, a
// random KB generator and a dense triple-loop scoring oracle that shares no
// code with the engine.

#include "snn/knowledge_base.hpp"
#include "snn/inference.hpp"

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace snn::test {

inline const std::string kDefaultKbPath = SNN_DEFAULT_KB_PATH;

inline const KnowledgeBase& default_kb() {
  static const KnowledgeBase kb = load_knowledge_base_file(kDefaultKbPath);
  return kb;
}

class ScratchDir {
 public:
  ScratchDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("snn-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Dense weights w[d][s][i] (0-based) with a per-symptom count of defined slots.
struct DenseInstance {
  int diseases = 0;
  int symptoms = 0;
  int max_slots = 0;
  std::vector<int> slots;
  std::vector<std::vector<std::vector<double>>> w;
};

struct RandomInstance {
  KnowledgeBase kb;
  DenseInstance dense;
};

// Weights are integers in [weight_lo, weight_hi]; each disease gets at least
// one positive entry so the KB validates.
inline RandomInstance random_instance(std::mt19937_64& rng, int max_diseases, int max_symptoms, int max_slots,
                                      int weight_lo, int weight_hi, double density = 0.4) {
  std::uniform_int_distribution<int> nd_dist(1, max_diseases);
  std::uniform_int_distribution<int> ns_dist(1, max_symptoms);
  std::uniform_int_distribution<int> slot_dist(2, std::max(2, max_slots));
  std::uniform_int_distribution<int> w_dist(weight_lo, weight_hi);
  std::bernoulli_distribution present(density);

  RandomInstance out;
  auto& kb = out.kb;
  auto& dense = out.dense;
  dense.diseases = nd_dist(rng);
  dense.symptoms = ns_dist(rng);
  dense.max_slots = std::max(2, max_slots);
  for (int d = 1; d <= dense.diseases; ++d) kb.diseases.entries.push_back({d, "disease " + std::to_string(d)});
  for (int s = 1; s <= dense.symptoms; ++s) {
    kb.symptoms.entries.push_back({s, "symptom " + std::to_string(s)});
    const int n = slot_dist(rng);
    dense.slots.push_back(n);
    if (n != 2) {
      std::vector<std::string> labels;
      for (int i = 1; i <= n; ++i) labels.push_back("ind " + std::to_string(i));
      kb.indicators.rows[s] = labels;
    }
  }
  dense.w.assign(dense.diseases,
                 std::vector<std::vector<double>>(dense.symptoms, std::vector<double>(dense.max_slots, 0.0)));
  for (int d = 1; d <= dense.diseases; ++d) {
    bool has_positive = false;
    for (int s = 1; s <= dense.symptoms; ++s) {
      for (int i = 1; i <= dense.slots[s - 1]; ++i) {
        if (!present(rng)) continue;
        const int w = w_dist(rng);
        if (w == 0) continue;
        kb.weights.entries.push_back({{d, s, i}, Weight(w)});
        dense.w[d - 1][s - 1][i - 1] = w;
        has_positive = has_positive || w > 0;
      }
    }
    if (!has_positive) {
      std::uniform_int_distribution<int> s_pick(1, dense.symptoms);
      const int s = s_pick(rng);
      std::uniform_int_distribution<int> i_pick(1, dense.slots[s - 1]);
      const int i = i_pick(rng);
      const int w = std::max(1, weight_hi);
      auto& cell = dense.w[d - 1][s - 1][i - 1];
      if (cell != 0.0) {
        for (auto& e : kb.weights.entries)
          if (e.key == WeightKey{d, s, i}) e.weight = Weight(w);
      } else {
        kb.weights.entries.push_back({{d, s, i}, Weight(w)});
      }
      cell = w;
    }
  }
  return out;
}

inline std::vector<std::vector<int>> random_responses(std::mt19937_64& rng, const DenseInstance& dense,
                                                      double p = 0.3) {
  std::bernoulli_distribution on(p);
  std::vector<std::vector<int>> r(dense.symptoms, std::vector<int>(dense.max_slots, 0));
  for (int s = 0; s < dense.symptoms; ++s)
    for (int i = 0; i < dense.slots[s]; ++i) r[s][i] = on(rng) ? 1 : 0;
  return r;
}

inline ResponseMatrix to_matrix(const std::vector<std::vector<int>>& r) {
  ResponseMatrix m;
  for (std::size_t s = 0; s < r.size(); ++s)
    for (std::size_t i = 0; i < r[s].size(); ++i)
      if (r[s][i]) m.confirmed.insert({static_cast<int>(s + 1), static_cast<int>(i + 1)});
  return m;
}

// A(d) = sum_s sum_i W(d,s,i)/W_t(d) * R(s,i), W_t gated by H(W).
inline std::vector<double> oracle_agreement(const DenseInstance& dense, const std::vector<std::vector<int>>& r) {
  std::vector<double> a(dense.diseases, 0.0);
  for (int d = 0; d < dense.diseases; ++d) {
    double total = 0.0;
    for (int s = 0; s < dense.symptoms; ++s)
      for (int i = 0; i < dense.max_slots; ++i)
        if (dense.w[d][s][i] > 0) total += dense.w[d][s][i];
    for (int s = 0; s < dense.symptoms; ++s)
      for (int i = 0; i < dense.max_slots; ++i) a[d] += dense.w[d][s][i] / total * r[s][i];
  }
  return a;
}

inline std::optional<std::vector<double>> oracle_likelihood(const std::vector<double>& a) {
  double total = 0.0;
  for (double x : a) total += x;
  if (total <= 1e-9) return std::nullopt;
  std::vector<double> l;
  for (double x : a) l.push_back(x / total);
  return l;
}

}  // namespace snn::test
