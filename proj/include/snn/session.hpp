#pragma once
// Questionnaire sessions, versioned knowledge-base snapshots and the
// file-backed report store behind the HTTP API.
//
// The store is a plain directory of JSON documents. It is not a medical
// records system: patient labels are kept verbatim and unencrypted.

#include "snn/serialize.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace snn {

struct Answer {
  int symptom = 0;
  std::optional<int> indicator;  // nullopt: skipped
  bool operator==(const Answer&) const = default;
};

struct Session {
  std::string id;
  std::string patient_label;
  std::uint64_t kb_version = 0;
  std::vector<Answer> answers;
  int symptom_count = 0;
  std::string created_at;
  std::optional<std::string> finalized_at;
  std::optional<std::string> status;  // "ok" or "no signal" once finalized
  std::optional<DiagnosisResult> result;

  // Next symptom to ask (1-based); symptom_count + 1 when done.
  int cursor() const { return static_cast<int>(answers.size()) + 1; }
  bool done() const { return cursor() > symptom_count; }
  bool finalized() const { return finalized_at.has_value(); }
};

Json to_json(const Session& s);
Session session_from_json(const Json& j);

ResponseMatrix responses_from_answers(const std::vector<Answer>& answers);

struct Question {
  int symptom = 0;
  std::string name;
  std::vector<std::string> indicators;  // slot k is labels[k-1]
};

struct Report {
  std::string id;
  std::uint64_t sequence = 0;
  std::string created_at;
  Session session;
  std::string status;
  std::optional<DiagnosisResult> result;
  std::string summary;
};

Json to_json(const Report& r);
Report report_from_json(const Json& j);

std::string report_summary(const Session& session, const std::string& status,
                           const std::optional<DiagnosisResult>& result);

// Single-writer commit point for knowledge-base edits. Every committed
// version stays readable so pinned sessions keep their snapshot.
class KbRepository {
 public:
  // With an archive directory, each version is written as <version>.kbtxt
  // and the KB file (if given) is rewritten on commit.
  KbRepository(KnowledgeBase initial, std::optional<std::filesystem::path> kb_file = std::nullopt,
               std::optional<std::filesystem::path> archive_dir = std::nullopt);

  std::shared_ptr<const KnowledgeBase> current() const;
  std::shared_ptr<const KnowledgeBase> at(std::uint64_t version) const;

  // Compare-and-swap on version; throws VersionConflict when stale.
  std::shared_ptr<const KnowledgeBase> commit(std::uint64_t expected_version, const WeightKey& key,
                                              const Weight& w);

 private:
  void archive(const KnowledgeBase& kb) const;

  mutable std::mutex mutex_;
  std::map<std::uint64_t, std::shared_ptr<const KnowledgeBase>> versions_;
  std::shared_ptr<const KnowledgeBase> current_;
  std::optional<std::filesystem::path> kb_file_;
  std::optional<std::filesystem::path> archive_dir_;
};

// Directory layout: sessions/<id>.json, reports/<id>.json, kb/<version>.kbtxt.
class ReportStore {
 public:
  explicit ReportStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path kb_archive_dir() const { return root_ / "kb"; }

  void save_session(const Session& s);
  std::vector<Session> load_sessions() const;

  // Assigns the next sequence number and writes the document.
  Report save_report(Report r);
  std::optional<Report> fetch_report(const std::string& id) const;
  // Newest first.
  std::vector<Report> list_reports() const;

 private:
  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

class SessionService {
 public:
  SessionService(std::shared_ptr<KbRepository> kb, std::shared_ptr<ReportStore> store);

  Session create_session(const std::string& patient_label);
  Session session(const std::string& id) const;
  std::optional<Question> next_question(const std::string& id) const;
  Session record_answer(const std::string& id, std::optional<int> indicator);
  Report finalize(const std::string& id);

  std::vector<Report> list_reports() const;
  Report fetch_report(const std::string& id) const;

  KbRepository& kb() { return *kb_; }
  const KbRepository& kb() const { return *kb_; }

 private:
  struct Slot {
    std::mutex mutex;
    Session session;
  };
  std::shared_ptr<Slot> slot(const std::string& id) const;

  std::shared_ptr<KbRepository> kb_;
  std::shared_ptr<ReportStore> store_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

// Thrown when a session is in the wrong state for the request.
class SessionStateError : public Error {
 public:
  using Error::Error;
};

// Loads the KB file and reconciles it with the archived versions.
std::shared_ptr<KbRepository> open_kb_repository(const std::filesystem::path& kb_file,
                                                 const std::filesystem::path& archive_dir);

std::string utc_timestamp();

}  // namespace snn
