#pragma once
// Knowledge base for the sensory-neural diagnostic network: symptom,
// indicator and disease catalogs plus the sparse signed weight table
// W(d,s,i), and its per-disease normalization.

#include "snn/errors.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace snn {

using Weight = boost::rational<std::int64_t>;

inline constexpr int kMaxIndicators = 9;

struct SymptomEntry {
  int index = 0;
  std::string name;
  bool operator==(const SymptomEntry&) const = default;
};

struct DiseaseEntry {
  int index = 0;
  std::string name;
  bool operator==(const DiseaseEntry&) const = default;
};

struct SymptomCatalog {
  std::vector<SymptomEntry> entries;

  const SymptomEntry* find(int index) const;
  bool operator==(const SymptomCatalog&) const = default;
};

struct DiseaseCatalog {
  std::vector<DiseaseEntry> entries;

  const DiseaseEntry* find(int index) const;
  std::size_t size() const { return entries.size(); }
  bool operator==(const DiseaseCatalog&) const = default;
};

// Indicator labels per symptom. A symptom without an explicit row has the
// default two-slot list {yes, no}; slots past the list length are empty and
// can never be confirmed.
struct IndicatorCatalog {
  std::map<int, std::vector<std::string>> rows;

  std::vector<std::string> labels(int symptom) const;
  int defined_slots(int symptom) const;
  bool is_defined(int symptom, int slot) const;
  bool operator==(const IndicatorCatalog&) const = default;
};

struct WeightKey {
  int disease = 0;
  int symptom = 0;
  int indicator = 0;
  auto operator<=>(const WeightKey&) const = default;
};

struct WeightEntry {
  WeightKey key;
  Weight weight;
  bool operator==(const WeightEntry&) const = default;
};

// Sparse weights; absent triples have weight 0. Kept as a flat list so a
// loader can represent (and validate) duplicates before they are rejected.
struct WeightTable {
  std::vector<WeightEntry> entries;

  Weight at(const WeightKey& key) const;
  bool operator==(const WeightTable&) const = default;
};

struct KnowledgeBase {
  SymptomCatalog symptoms;
  IndicatorCatalog indicators;
  DiseaseCatalog diseases;
  WeightTable weights;
  std::uint64_t version = 1;

  // Content equality; version is deliberately not compared.
  bool same_content(const KnowledgeBase& other) const;
};

struct NormalizedEntry {
  WeightKey key;
  Weight normalized;
};

// W_n(d,s,i) = W(d,s,i) / W_t(d). Entries are sorted by (d,s,i).
struct NormalizedWeightTable {
  std::vector<NormalizedEntry> entries;
  std::map<int, Weight> totals;
  // Catalog shape, used to reject response matrices from another KB.
  std::map<int, int> indicator_slots;
  std::vector<int> disease_order;
  std::uint64_t kb_version = 0;

  bool operator==(const NormalizedWeightTable&) const = default;
};

bool operator==(const NormalizedEntry& a, const NormalizedEntry& b);

// --- parsing / serialization ---

KnowledgeBase parse_knowledge_base(std::string_view text);
KnowledgeBase load_knowledge_base(std::string_view text);
KnowledgeBase load_knowledge_base_file(const std::filesystem::path& path);
std::string export_knowledge_base(const KnowledgeBase& kb);

// Writes to a sibling temp file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

Weight parse_weight(std::string_view token);
std::string format_weight(const Weight& w);

// --- validation and normalization ---

std::vector<Violation> validate(const KnowledgeBase& kb);

Weight total_positive_weight(const KnowledgeBase& kb, int disease);

NormalizedWeightTable normalize(const KnowledgeBase& kb);

// Copy-on-write edit. w == 0 removes the entry. The returned snapshot has
// version + 1; the edit is rejected if the result would not validate.
KnowledgeBase set_weight(const KnowledgeBase& kb, const WeightKey& key, const Weight& w);

}  // namespace snn
