#include "snn/session.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

namespace snn {
namespace fs = std::filesystem;
namespace {

std::string random_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw StorageError("corrupt document " + path.string() + ": " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StorageError("cannot create directory " + dir.string() + ": " + ec.message());
}

bool safe_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(now.time_since_epoch()).count() % 1'000'000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  const auto n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof buf - n, ".%06lldZ", static_cast<long long>(micros));
  return buf;
}

// --- Session / Report encodings ---

Json to_json(const Session& s) {
  Json answers = Json::array();
  for (const auto& a : s.answers) {
    answers.push_back({{"symptom", a.symptom}, {"indicator", a.indicator ? Json(*a.indicator) : Json(nullptr)}});
  }
  return {{"id", s.id},
          {"patient_label", s.patient_label},
          {"kb_version", s.kb_version},
          {"answers", answers},
          {"symptom_count", s.symptom_count},
          {"cursor", s.cursor()},
          {"done", s.done()},
          {"created_at", s.created_at},
          {"finalized_at", s.finalized_at ? Json(*s.finalized_at) : Json(nullptr)},
          {"status", s.status ? Json(*s.status) : Json(nullptr)},
          {"result", s.result ? to_json(*s.result) : Json(nullptr)}};
}

Session session_from_json(const Json& j) {
  Session s;
  s.id = j.at("id").get<std::string>();
  s.patient_label = j.at("patient_label").get<std::string>();
  s.kb_version = j.at("kb_version").get<std::uint64_t>();
  for (const auto& a : j.at("answers")) {
    Answer answer{a.at("symptom").get<int>(), std::nullopt};
    if (!a.at("indicator").is_null()) answer.indicator = a.at("indicator").get<int>();
    s.answers.push_back(answer);
  }
  s.symptom_count = j.at("symptom_count").get<int>();
  s.created_at = j.at("created_at").get<std::string>();
  if (!j.at("finalized_at").is_null()) s.finalized_at = j.at("finalized_at").get<std::string>();
  if (!j.at("status").is_null()) s.status = j.at("status").get<std::string>();
  if (!j.at("result").is_null()) s.result = result_from_json(j.at("result"));
  return s;
}

ResponseMatrix responses_from_answers(const std::vector<Answer>& answers) {
  ResponseMatrix r;
  for (const auto& a : answers) {
    if (a.indicator) r.confirmed.insert({a.symptom, *a.indicator});
  }
  return r;
}

Json to_json(const Report& r) {
  return {{"id", r.id},
          {"sequence", r.sequence},
          {"created_at", r.created_at},
          {"status", r.status},
          {"session", to_json(r.session)},
          {"result", r.result ? to_json(*r.result) : Json(nullptr)},
          {"chart", r.result ? to_json(chart_data(*r.result)) : Json(nullptr)},
          {"summary", r.summary}};
}

Report report_from_json(const Json& j) {
  Report r;
  r.id = j.at("id").get<std::string>();
  r.sequence = j.at("sequence").get<std::uint64_t>();
  r.created_at = j.at("created_at").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.session = session_from_json(j.at("session"));
  if (!j.at("result").is_null()) r.result = result_from_json(j.at("result"));
  r.summary = j.at("summary").get<std::string>();
  return r;
}

std::string report_summary(const Session& session, const std::string& status,
                           const std::optional<DiagnosisResult>& result) {
  std::ostringstream os;
  os << "Patient: " << session.patient_label << "\n";
  os << "Session: " << session.id << "   knowledge base version " << session.kb_version << "\n";
  os << "Finalized: " << session.finalized_at.value_or("-") << "\n\n";
  os << "Responses:\n";
  for (const auto& a : session.answers) {
    if (a.indicator) os << "  symptom " << a.symptom << ": indicator " << *a.indicator << "\n";
  }
  const auto skipped = std::count_if(session.answers.begin(), session.answers.end(),
                                     [](const Answer& a) { return !a.indicator; });
  os << "  (" << skipped << " skipped)\n\n";
  if (!result) {
    os << "Status: " << status << " - no confirmed indicator excites any disease neuron.\n";
    return os.str();
  }
  os << format_result_table(*result);
  return os.str();
}

// --- KbRepository ---

KbRepository::KbRepository(KnowledgeBase initial, std::optional<fs::path> kb_file,
                           std::optional<fs::path> archive_dir)
    : kb_file_(std::move(kb_file)), archive_dir_(std::move(archive_dir)) {
  if (auto violations = validate(initial); !violations.empty()) throw ValidationError(std::move(violations));
  if (archive_dir_) {
    ensure_dir(*archive_dir_);
    for (const auto& entry : fs::directory_iterator(*archive_dir_)) {
      if (entry.path().extension() != ".kbtxt") continue;
      std::uint64_t version = 0;
      try {
        version = std::stoull(entry.path().stem().string());
      } catch (const std::exception&) {
        continue;
      }
      auto kb = load_knowledge_base_file(entry.path());
      kb.version = version;
      versions_[version] = std::make_shared<const KnowledgeBase>(std::move(kb));
    }
    if (!versions_.empty()) {
      const auto& [latest, snapshot] = *versions_.rbegin();
      initial.version = snapshot->same_content(initial) ? latest : latest + 1;
    }
  }
  auto snapshot = std::make_shared<const KnowledgeBase>(std::move(initial));
  if (!versions_.count(snapshot->version)) archive(*snapshot);
  versions_[snapshot->version] = snapshot;
  current_ = snapshot;
}

std::shared_ptr<const KnowledgeBase> KbRepository::current() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::shared_ptr<const KnowledgeBase> KbRepository::at(std::uint64_t version) const {
  std::lock_guard lock(mutex_);
  const auto it = versions_.find(version);
  if (it == versions_.end()) throw NotFound("unknown knowledge base version " + std::to_string(version));
  return it->second;
}

std::shared_ptr<const KnowledgeBase> KbRepository::commit(std::uint64_t expected_version, const WeightKey& key,
                                                          const Weight& w) {
  std::lock_guard lock(mutex_);
  if (current_->version != expected_version) throw VersionConflict(expected_version, current_->version);
  auto next = std::make_shared<const KnowledgeBase>(set_weight(*current_, key, w));
  archive(*next);
  if (kb_file_) write_file_atomically(*kb_file_, export_knowledge_base(*next));
  versions_[next->version] = next;
  current_ = next;
  return next;
}

void KbRepository::archive(const KnowledgeBase& kb) const {
  if (!archive_dir_) return;
  write_file_atomically(*archive_dir_ / (std::to_string(kb.version) + ".kbtxt"), export_knowledge_base(kb));
}

std::shared_ptr<KbRepository> open_kb_repository(const fs::path& kb_file, const fs::path& archive_dir) {
  return std::make_shared<KbRepository>(load_knowledge_base_file(kb_file), kb_file, archive_dir);
}

// --- ReportStore ---

ReportStore::ReportStore(fs::path root) : root_(std::move(root)) {
  ensure_dir(root_ / "sessions");
  ensure_dir(root_ / "reports");
}

void ReportStore::save_session(const Session& s) {
  std::lock_guard lock(mutex_);
  write_file_atomically(root_ / "sessions" / (s.id + ".json"), to_json(s).dump(2));
}

std::vector<Session> ReportStore::load_sessions() const {
  std::lock_guard lock(mutex_);
  std::vector<Session> out;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
    if (entry.path().extension() != ".json") continue;
    try {
      out.push_back(session_from_json(read_json(entry.path())));
    } catch (const Json::exception& e) {
      throw StorageError("corrupt session " + entry.path().string() + ": " + e.what());
    }
  }
  return out;
}

Report ReportStore::save_report(Report r) {
  std::lock_guard lock(mutex_);
  std::uint64_t max_sequence = 0;
  for (const auto& entry : fs::directory_iterator(root_ / "reports")) {
    if (entry.path().extension() != ".json") continue;
    max_sequence = std::max(max_sequence, read_json(entry.path()).at("sequence").get<std::uint64_t>());
  }
  r.sequence = max_sequence + 1;
  write_file_atomically(root_ / "reports" / (r.id + ".json"), to_json(r).dump(2));
  return r;
}

std::optional<Report> ReportStore::fetch_report(const std::string& id) const {
  if (!safe_id(id)) return std::nullopt;
  std::lock_guard lock(mutex_);
  const auto path = root_ / "reports" / (id + ".json");
  if (!fs::exists(path)) return std::nullopt;
  try {
    return report_from_json(read_json(path));
  } catch (const Json::exception& e) {
    throw StorageError("corrupt report " + path.string() + ": " + e.what());
  }
}

std::vector<Report> ReportStore::list_reports() const {
  std::lock_guard lock(mutex_);
  std::vector<Report> out;
  for (const auto& entry : fs::directory_iterator(root_ / "reports")) {
    if (entry.path().extension() != ".json") continue;
    try {
      out.push_back(report_from_json(read_json(entry.path())));
    } catch (const Json::exception& e) {
      throw StorageError("corrupt report " + entry.path().string() + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end(), [](const Report& a, const Report& b) { return a.sequence > b.sequence; });
  return out;
}

// --- SessionService ---

SessionService::SessionService(std::shared_ptr<KbRepository> kb, std::shared_ptr<ReportStore> store)
    : kb_(std::move(kb)), store_(std::move(store)) {
  if (!store_) return;
  for (auto& s : store_->load_sessions()) {
    auto slot = std::make_shared<Slot>();
    slot->session = std::move(s);
    sessions_[slot->session.id] = slot;
  }
}

std::shared_ptr<SessionService::Slot> SessionService::slot(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session " + id);
  return it->second;
}

Session SessionService::create_session(const std::string& patient_label) {
  const auto kb = kb_->current();
  auto slot = std::make_shared<Slot>();
  auto& s = slot->session;
  s.id = random_id();
  s.patient_label = patient_label.empty() ? "anonymous" : patient_label;
  s.kb_version = kb->version;
  s.symptom_count = static_cast<int>(kb->symptoms.entries.size());
  s.created_at = utc_timestamp();
  if (store_) store_->save_session(s);
  std::lock_guard lock(sessions_mutex_);
  sessions_[s.id] = slot;
  return s;
}

Session SessionService::session(const std::string& id) const {
  const auto sl = slot(id);
  std::lock_guard lock(sl->mutex);
  return sl->session;
}

std::optional<Question> SessionService::next_question(const std::string& id) const {
  const auto sl = slot(id);
  std::lock_guard lock(sl->mutex);
  const auto& s = sl->session;
  if (s.finalized()) throw SessionStateError("session " + id + " is finalized");
  if (s.done()) return std::nullopt;
  const auto kb = kb_->at(s.kb_version);
  const auto* symptom = kb->symptoms.find(s.cursor());
  if (!symptom) throw NotFound("symptom " + std::to_string(s.cursor()) + " missing from knowledge base");
  auto labels = kb->indicators.labels(symptom->index);
  labels.resize(static_cast<std::size_t>(kb->indicators.defined_slots(symptom->index)));
  return Question{symptom->index, symptom->name, std::move(labels)};
}

Session SessionService::record_answer(const std::string& id, std::optional<int> indicator) {
  const auto sl = slot(id);
  std::lock_guard lock(sl->mutex);
  auto& s = sl->session;
  if (s.finalized()) throw SessionStateError("session " + id + " is finalized");
  if (s.done()) throw SessionStateError("all symptoms of session " + id + " are answered");
  const int symptom = s.cursor();
  if (indicator) {
    const auto kb = kb_->at(s.kb_version);
    if (!kb->indicators.is_defined(symptom, *indicator)) {
      throw InvalidArgument("indicator " + std::to_string(*indicator) + " is not defined for symptom " +
                            std::to_string(symptom));
    }
  }
  Session next = s;
  next.answers.push_back({symptom, indicator});
  if (store_) store_->save_session(next);
  s = std::move(next);
  return s;
}

Report SessionService::finalize(const std::string& id) {
  const auto sl = slot(id);
  std::lock_guard lock(sl->mutex);
  auto& s = sl->session;
  if (s.finalized()) throw SessionStateError("session " + id + " is already finalized");
  if (!s.done()) {
    throw SessionStateError("session " + id + " is incomplete: next symptom is " + std::to_string(s.cursor()));
  }
  const auto kb = kb_->at(s.kb_version);

  Session next = s;
  next.finalized_at = utc_timestamp();
  try {
    next.result = diagnose(*kb, responses_from_answers(next.answers), ChoiceRule::single);
    next.status = "ok";
  } catch (const NoSignal&) {
    next.status = "no signal";
  }

  Report report;
  report.id = next.id;
  report.created_at = *next.finalized_at;
  report.session = next;
  report.status = *next.status;
  report.result = next.result;
  report.summary = report_summary(next, report.status, report.result);
  if (store_) {
    report = store_->save_report(std::move(report));
    store_->save_session(next);
  } else {
    report.sequence = 1;
  }
  s = std::move(next);
  return report;
}

std::vector<Report> SessionService::list_reports() const {
  if (!store_) return {};
  return store_->list_reports();
}

Report SessionService::fetch_report(const std::string& id) const {
  if (store_) {
    if (auto r = store_->fetch_report(id)) return *r;
  }
  throw NotFound("unknown report " + id);
}

}  // namespace snn
