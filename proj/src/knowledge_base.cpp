#include "snn/knowledge_base.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace snn {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool parse_int(std::string_view s, long long& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && !s.empty();
}

int parse_index(std::string_view s, int line, const char* what) {
  long long v = 0;
  if (!parse_int(trim(s), v) || v < -1'000'000 || v > 1'000'000) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return static_cast<int>(v);
}

enum class Section { none, diseases, symptoms, indicators, weights };

Violation make_violation(std::string code, int d, int s, int i, std::string message) {
  Violation v;
  v.code = std::move(code);
  v.disease = d;
  v.symptom = s;
  v.indicator = i;
  v.message = std::move(message);
  return v;
}

template <typename Entry>
void check_catalog(const std::vector<Entry>& entries, const char* kind, int Violation::*field,
                   std::vector<Violation>& out) {
  if (entries.empty()) {
    out.push_back(make_violation("empty_catalog", 0, 0, 0, std::string(kind) + " catalog is empty"));
    return;
  }
  std::set<int> seen_index;
  std::set<std::string> seen_name;
  for (const auto& e : entries) {
    auto v = [&](std::string code, std::string msg) {
      Violation viol = make_violation(std::move(code), 0, 0, 0, std::move(msg));
      viol.*field = e.index;
      out.push_back(std::move(viol));
    };
    if (!seen_index.insert(e.index).second) {
      v("duplicate_index", std::string("duplicate ") + kind + " index " + std::to_string(e.index));
    }
    if (e.name.empty()) {
      v("empty_name", std::string(kind) + " " + std::to_string(e.index) + " has an empty name");
    } else if (!seen_name.insert(e.name).second) {
      v("duplicate_name", std::string("duplicate ") + kind + " name '" + e.name + "'");
    }
  }
  const int n = static_cast<int>(entries.size());
  if (*seen_index.begin() != 1 || *seen_index.rbegin() != n || static_cast<int>(seen_index.size()) != n) {
    out.push_back(make_violation("noncontiguous_index", 0, 0, 0,
                                 std::string(kind) + " indices are not contiguous from 1"));
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error([&] {
        std::ostringstream os;
        os << violations.size() << " violation(s)";
        for (const auto& v : violations) os << "\n  " << v.code << ": " << v.message;
        return os.str();
      }()),
      violations_(std::move(violations)) {}

const SymptomEntry* SymptomCatalog::find(int index) const {
  for (const auto& e : entries)
    if (e.index == index) return &e;
  return nullptr;
}

const DiseaseEntry* DiseaseCatalog::find(int index) const {
  for (const auto& e : entries)
    if (e.index == index) return &e;
  return nullptr;
}

std::vector<std::string> IndicatorCatalog::labels(int symptom) const {
  if (const auto it = rows.find(symptom); it != rows.end()) return it->second;
  return {"yes", "no"};
}

int IndicatorCatalog::defined_slots(int symptom) const {
  if (const auto it = rows.find(symptom); it != rows.end()) {
    return static_cast<int>(std::min<std::size_t>(it->second.size(), kMaxIndicators));
  }
  return 2;
}

bool IndicatorCatalog::is_defined(int symptom, int slot) const {
  return slot >= 1 && slot <= defined_slots(symptom);
}

Weight WeightTable::at(const WeightKey& key) const {
  for (const auto& e : entries)
    if (e.key == key) return e.weight;
  return Weight{0};
}

bool KnowledgeBase::same_content(const KnowledgeBase& other) const {
  auto sorted = [](std::vector<WeightEntry> v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    return v;
  };
  return symptoms == other.symptoms && indicators == other.indicators && diseases == other.diseases &&
         sorted(weights.entries) == sorted(other.weights.entries);
}

bool operator==(const NormalizedEntry& a, const NormalizedEntry& b) {
  return a.key == b.key && a.normalized == b.normalized;
}

Weight parse_weight(std::string_view token) {
  token = trim(token);
  long long num = 0;
  if (const auto slash = token.find('/'); slash != std::string_view::npos) {
    long long den = 0;
    if (!parse_int(token.substr(0, slash), num) || !parse_int(token.substr(slash + 1), den) || den == 0) {
      throw InvalidArgument("invalid weight '" + std::string(token) + "'");
    }
    return Weight(num, den);
  }
  if (const auto dot = token.find('.'); dot != std::string_view::npos) {
    const auto int_part = token.substr(0, dot);
    const auto frac_part = token.substr(dot + 1);
    const bool negative = !int_part.empty() && int_part.front() == '-';
    long long whole = 0;
    long long frac = 0;
    const bool whole_ok = int_part.empty() || int_part == "-" || int_part == "+" || parse_int(int_part, whole);
    if (!whole_ok || frac_part.empty() || frac_part.size() > 12 || frac_part.front() == '-' ||
        frac_part.front() == '+' || !parse_int(frac_part, frac)) {
      throw InvalidArgument("invalid weight '" + std::string(token) + "'");
    }
    long long scale = 1;
    for (std::size_t k = 0; k < frac_part.size(); ++k) scale *= 10;
    const long long magnitude = (whole < 0 ? -whole : whole) * scale + frac;
    return Weight(negative ? -magnitude : magnitude, scale);
  }
  if (!parse_int(token, num)) throw InvalidArgument("invalid weight '" + std::string(token) + "'");
  return Weight(num);
}

std::string format_weight(const Weight& w) {
  if (w.denominator() == 1) return std::to_string(w.numerator());
  return std::to_string(w.numerator()) + "/" + std::to_string(w.denominator());
}

KnowledgeBase parse_knowledge_base(std::string_view text) {
  KnowledgeBase kb;
  Section section = Section::none;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line == "[diseases]") section = Section::diseases;
      else if (line == "[symptoms]") section = Section::symptoms;
      else if (line == "[indicators]") section = Section::indicators;
      else if (line == "[weights]") section = Section::weights;
      else throw ParseError(line_no, "unknown section " + std::string(line));
      continue;
    }
    switch (section) {
      case Section::none:
        throw ParseError(line_no, "content before the first section header");
      case Section::diseases:
      case Section::symptoms: {
        const auto bar = line.find('|');
        if (bar == std::string_view::npos) throw ParseError(line_no, "expected <index>|<name>");
        const int index = parse_index(line.substr(0, bar), line_no, "index");
        std::string name(trim(line.substr(bar + 1)));
        if (section == Section::diseases) kb.diseases.entries.push_back({index, std::move(name)});
        else kb.symptoms.entries.push_back({index, std::move(name)});
        break;
      }
      case Section::indicators: {
        const auto fields = split(line, '|');
        if (fields.size() < 2) throw ParseError(line_no, "expected <symptom>|<label>|...");
        const int symptom = parse_index(fields[0], line_no, "symptom index");
        std::vector<std::string> labels;
        for (std::size_t k = 1; k < fields.size(); ++k) labels.emplace_back(trim(fields[k]));
        if (!kb.indicators.rows.emplace(symptom, std::move(labels)).second) {
          throw ParseError(line_no, "duplicate indicator row for symptom " + std::to_string(symptom));
        }
        break;
      }
      case Section::weights: {
        const auto tokens = split_ws(line);
        if (tokens.size() != 4) throw ParseError(line_no, "expected '<d> <s> <i> <w>'");
        WeightEntry entry;
        entry.key.disease = parse_index(tokens[0], line_no, "disease index");
        entry.key.symptom = parse_index(tokens[1], line_no, "symptom index");
        entry.key.indicator = parse_index(tokens[2], line_no, "indicator index");
        try {
          entry.weight = parse_weight(tokens[3]);
        } catch (const InvalidArgument& e) {
          throw ParseError(line_no, e.what());
        }
        kb.weights.entries.push_back(entry);
        break;
      }
    }
  }
  return kb;
}

KnowledgeBase load_knowledge_base(std::string_view text) {
  auto kb = parse_knowledge_base(text);
  if (auto violations = validate(kb); !violations.empty()) throw ValidationError(std::move(violations));
  return kb;
}

KnowledgeBase load_knowledge_base_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read knowledge base file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_knowledge_base(buf.str());
}

std::string export_knowledge_base(const KnowledgeBase& kb) {
  if (auto violations = validate(kb); !violations.empty()) throw ValidationError(std::move(violations));
  std::ostringstream os;
  os << "[diseases]\n";
  for (const auto& d : kb.diseases.entries) os << d.index << '|' << d.name << '\n';
  os << "\n[symptoms]\n";
  for (const auto& s : kb.symptoms.entries) os << s.index << '|' << s.name << '\n';
  os << "\n[indicators]\n";
  for (const auto& [symptom, labels] : kb.indicators.rows) {
    os << symptom;
    for (const auto& l : labels) os << '|' << l;
    os << '\n';
  }
  os << "\n[weights]\n";
  for (const auto& e : kb.weights.entries) {
    os << e.key.disease << ' ' << e.key.symptom << ' ' << e.key.indicator << ' ' << format_weight(e.weight)
       << '\n';
  }
  return os.str();
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw StorageError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw StorageError("cannot replace " + path.string());
  }
}

std::vector<Violation> validate(const KnowledgeBase& kb) {
  std::vector<Violation> out;
  check_catalog(kb.symptoms.entries, "symptom", &Violation::symptom, out);
  check_catalog(kb.diseases.entries, "disease", &Violation::disease, out);

  for (const auto& [symptom, labels] : kb.indicators.rows) {
    if (!kb.symptoms.find(symptom)) {
      out.push_back(make_violation("unknown_symptom", 0, symptom, 0,
                                   "indicator row for unknown symptom " + std::to_string(symptom)));
    }
    if (labels.size() < 2) {
      out.push_back(make_violation("too_few_indicators", 0, symptom, 0,
                                   "symptom " + std::to_string(symptom) + " defines fewer than 2 indicators"));
    }
    if (labels.size() > static_cast<std::size_t>(kMaxIndicators)) {
      out.push_back(make_violation("too_many_indicators", 0, symptom, 0,
                                   "symptom " + std::to_string(symptom) + " defines more than 9 indicators"));
    }
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (labels[k].empty()) {
        out.push_back(make_violation("empty_label", 0, symptom, static_cast<int>(k + 1),
                                     "empty indicator label at slot " + std::to_string(k + 1) +
                                         " of symptom " + std::to_string(symptom)));
      }
    }
  }

  std::set<WeightKey> seen;
  std::map<int, bool> has_positive;
  for (const auto& e : kb.weights.entries) {
    const auto [d, s, i] = e.key;
    const auto where = "(" + std::to_string(d) + "," + std::to_string(s) + "," + std::to_string(i) + ")";
    if (!seen.insert(e.key).second) {
      out.push_back(make_violation("duplicate_entry", d, s, i, "duplicate weight entry " + where));
    }
    if (!kb.diseases.find(d)) {
      out.push_back(make_violation("unknown_disease", d, s, i, "unknown disease index " + where));
    }
    if (!kb.symptoms.find(s)) {
      out.push_back(make_violation("unknown_symptom", d, s, i, "unknown symptom index " + where));
    } else if (!kb.indicators.is_defined(s, i)) {
      out.push_back(make_violation("undefined_indicator_slot", d, s, i, "undefined indicator slot " + where));
    }
    if (e.weight == Weight{0}) {
      out.push_back(make_violation("zero_weight", d, s, i, "explicit zero weight " + where));
    }
    if (e.weight > 0) has_positive[d] = true;
  }
  for (const auto& d : kb.diseases.entries) {
    if (!has_positive[d.index]) {
      out.push_back(make_violation("no_positive_weight", d.index, 0, 0,
                                   "no positive weight for disease " + std::to_string(d.index)));
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.disease, a.symptom, a.indicator) < std::tie(b.disease, b.symptom, b.indicator);
  });
  return out;
}

Weight total_positive_weight(const KnowledgeBase& kb, int disease) {
  if (!kb.diseases.find(disease)) {
    throw InvalidArgument("unknown disease index " + std::to_string(disease));
  }
  Weight total{0};
  for (const auto& e : kb.weights.entries) {
    if (e.key.disease == disease && e.weight > 0) total += e.weight;
  }
  return total;
}

NormalizedWeightTable normalize(const KnowledgeBase& kb) {
  if (auto violations = validate(kb); !violations.empty()) throw ValidationError(std::move(violations));
  NormalizedWeightTable table;
  table.kb_version = kb.version;
  for (const auto& d : kb.diseases.entries) {
    table.disease_order.push_back(d.index);
    table.totals[d.index] = total_positive_weight(kb, d.index);
  }
  for (const auto& s : kb.symptoms.entries) table.indicator_slots[s.index] = kb.indicators.defined_slots(s.index);
  table.entries.reserve(kb.weights.entries.size());
  for (const auto& e : kb.weights.entries) {
    table.entries.push_back({e.key, e.weight / table.totals.at(e.key.disease)});
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const NormalizedEntry& a, const NormalizedEntry& b) { return a.key < b.key; });
  return table;
}

KnowledgeBase set_weight(const KnowledgeBase& kb, const WeightKey& key, const Weight& w) {
  if (!kb.diseases.find(key.disease)) {
    throw InvalidArgument("unknown disease index " + std::to_string(key.disease));
  }
  if (!kb.symptoms.find(key.symptom)) {
    throw InvalidArgument("unknown symptom index " + std::to_string(key.symptom));
  }
  if (!kb.indicators.is_defined(key.symptom, key.indicator)) {
    throw InvalidArgument("undefined indicator slot " + std::to_string(key.indicator) + " of symptom " +
                          std::to_string(key.symptom));
  }

  KnowledgeBase next = kb;
  auto& entries = next.weights.entries;
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.key == key; });
  if (it != entries.end()) {
    if (w == Weight{0}) entries.erase(it);
    else it->weight = w;
  } else if (w != Weight{0}) {
    const auto pos = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return key < e.key; });
    entries.insert(pos, WeightEntry{key, w});
  }
  if (auto violations = validate(next); !violations.empty()) throw ValidationError(std::move(violations));
  next.version = kb.version + 1;
  return next;
}

}  // namespace snn
