// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "support.hpp"

#include "snn/http_api.hpp"
#include "snn/selftest.hpp"
#include "snn/session.hpp"

#include <httplib.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>
#include <thread>

using namespace snn;

namespace {

// Tolerances.
constexpr double kProfileTolPp = 2.0;
constexpr double kRuntimeLimitS = 1.0;
constexpr double kMeanLo = 33.5, kMeanHi = 35.1;
constexpr double kSigmaTarget = 7.0, kSigmaTol = 1.5;
constexpr double kAgreementTol = 1e-9;
constexpr double kL13Target = 35.0, kL13Tol = 1.0;
constexpr double kDelta13Target = 3.25, kDelta13Tol = 0.10;
constexpr double kNormTol = 1e-9;
constexpr double kOracleTol = 1e-12;

const int kReference[15] = {29, 32, 34, 32, 37, 33, 29, 48, 24, 32, 28, 28, 35, 48, 41};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (!pass) detail << "; ";
    pass = false;
    detail << why;
  }
};

struct CliRun {
  int status = -1;
  std::string out;
  double seconds = 0.0;
};

CliRun cli(const std::string& args) {
  CliRun r;
  const auto t0 = std::chrono::steady_clock::now();
  FILE* pipe = popen((std::string(SNN_CLI_PATH) + " " + args + " 2>&1").c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (const auto n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << std::fixed << v;
  return s.str();
}

void profile_reproduction(Outcome& o) {
  const auto& kb = test::default_kb();
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = optimal_likelihood_profile(kb);
  const double in_process = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& e : p.entries) {
    const int want = kReference[e.disease - 1];
    if (std::abs(e.likelihood_rounded - want) > kProfileTolPp) {
      o.fail("d=" + std::to_string(e.disease) + " got " + std::to_string(e.likelihood_rounded) + "% want " +
             std::to_string(want) + "%");
    }
  }
  if (p.argmax != std::vector<int>{8, 14} && p.argmax != std::vector<int>{8} && p.argmax != std::vector<int>{14})
    o.fail("argmax outside {8,14}");
  if (p.argmin != std::vector<int>{9}) o.fail("argmin is not d=9");
  const auto run = cli("selftest --all");
  if (run.status != 0) o.fail("cli selftest --all exited " + std::to_string(run.status));
  if (run.seconds >= kRuntimeLimitS) o.fail("cli runtime " + fmt(run.seconds) + " s");
  if (in_process >= kRuntimeLimitS) o.fail("runtime " + fmt(in_process) + " s");
  if (o.pass) o.detail << "cli " << fmt(run.seconds) << " s";
}

void profile_statistics(Outcome& o) {
  const auto p = optimal_likelihood_profile(test::default_kb());
  if (p.mean_pct < kMeanLo || p.mean_pct > kMeanHi) o.fail("mean " + fmt(p.mean_pct));
  if (std::abs(p.sigma_pct - kSigmaTarget) > kSigmaTol) o.fail("sigma " + fmt(p.sigma_pct));
  if (o.pass) o.detail << "mean " << fmt(p.mean_pct) << "%, sigma " << fmt(p.sigma_pct) << "%";
}

void hypertension(Outcome& o) {
  const auto r = self_test(test::default_kb(), 13);
  const double a = r.agreement.at(13);
  if (std::abs(a - 1.0) > kAgreementTol) o.fail("A(13) " + fmt(a, 12));
  if (!r.likelihood) {
    o.fail("likelihood undefined");
  } else if (std::abs(100.0 * r.likelihood->at(13) - kL13Target) > kL13Tol) {
    o.fail("L(13) " + fmt(100.0 * r.likelihood->at(13)));
  }
  const auto delta = r.selected_delta();
  if (!delta) {
    o.fail("delta undefined");
  } else if (std::abs(*delta - kDelta13Target) > kDelta13Tol) {
    o.fail("delta " + fmt(*delta));
  }
  if (r.selected != 13) o.fail("selected " + std::to_string(r.selected));
  if (o.pass)
    o.detail << "A=" << fmt(a, 9) << " L=" << fmt(100.0 * r.likelihood->at(13)) << "% delta=" << fmt(*delta);
}

void self_identification(Outcome& o) {
  const auto& kb = test::default_kb();
  for (const auto& d : kb.diseases.entries) {
    const auto r = self_test(kb, d.index);
    if (r.selected != d.index) o.fail("d=" + std::to_string(d.index) + " selects " + std::to_string(r.selected));
    if (std::abs(r.agreement.at(d.index) - 1.0) > kAgreementTol) o.fail("A(" + std::to_string(d.index) + ") != 1");
  }
  if (o.pass) o.detail << kb.diseases.entries.size() << " diseases";
}

void normalization(Outcome& o) {
  std::mt19937_64 rng(20240501);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = test::random_instance(rng, 6, 8, 4, -5, 9);
    const auto table = normalize(inst.kb);
    std::map<int, double> sums;
    for (const auto& e : table.entries)
      if (e.normalized > 0) sums[e.key.disease] += boost::rational_cast<double>(e.normalized);
    for (const auto& d : inst.kb.diseases.entries) {
      if (std::abs(sums[d.index] - 1.0) > kNormTol) {
        o.fail("trial " + std::to_string(trial) + " d=" + std::to_string(d.index) + " sum " + fmt(sums[d.index], 12));
      }
    }
    auto scaled = inst.kb;
    std::uniform_int_distribution<int> factor(2, 97);
    std::map<int, int> f;
    for (const auto& d : scaled.diseases.entries) f[d.index] = factor(rng);
    for (auto& e : scaled.weights.entries) e.weight *= f[e.key.disease];
    const auto m = test::to_matrix(test::random_responses(rng, inst.dense, 0.5));
    const auto a = agreement(normalize(inst.kb), m);
    const auto b = agreement(normalize(scaled), m);
    if (a.values != b.values) o.fail("trial " + std::to_string(trial) + " scaling changed A");
  }
  if (o.pass) o.detail << "200 knowledge bases";
}

void oracle_equivalence(Outcome& o) {
  std::mt19937_64 rng(77);
  int undefined = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = test::random_instance(rng, 5, 6, 3, -3, 4);
    std::bernoulli_distribution dense_pick(0.5);
    const auto r = test::random_responses(rng, inst.dense, dense_pick(rng) ? 0.5 : 0.1);
    const auto want_a = test::oracle_agreement(inst.dense, r);
    const auto want_l = test::oracle_likelihood(want_a);
    const auto got_a = agreement(normalize(inst.kb), test::to_matrix(r));
    const auto got_l = likelihood(got_a);
    for (std::size_t k = 0; k < want_a.size(); ++k) {
      if (std::abs(got_a.values[k] - want_a[k]) > kOracleTol) {
        o.fail("trial " + std::to_string(trial) + " A mismatch");
        break;
      }
    }
    if (want_l.has_value() != got_l.has_value()) {
      o.fail("trial " + std::to_string(trial) + " likelihood definedness differs");
      continue;
    }
    if (!want_l) {
      ++undefined;
      continue;
    }
    for (std::size_t k = 0; k < want_l->size(); ++k) {
      if (std::abs(got_l->values[k] - (*want_l)[k]) > kOracleTol) {
        o.fail("trial " + std::to_string(trial) + " L mismatch");
        break;
      }
    }
  }
  if (o.pass) o.detail << "500 instances, " << undefined << " with undefined likelihood";
}

void answer_all(SessionService& service, const std::string& id, const std::map<int, int>& choices) {
  while (const auto q = service.next_question(id)) {
    const auto it = choices.find(q->symptom);
    service.record_answer(id, it == choices.end() ? std::nullopt : std::optional<int>(it->second));
  }
}

void determinism(Outcome& o) {
  test::ScratchDir dir;
  const std::map<int, int> choices{{2, 1}, {3, 2}, {4, 1}, {8, 3}, {11, 1}, {15, 2}, {21, 2}, {41, 2}};
  std::string saved_id;
  Json saved;
  std::optional<DiagnosisResult> first;
  {
    auto store = std::make_shared<ReportStore>(dir.path());
    SessionService service(std::make_shared<KbRepository>(test::default_kb(), std::nullopt, store->kb_archive_dir()),
                           store);
    for (int run = 0; run < 3; ++run) {
      const auto id = service.create_session("replay").id;
      answer_all(service, id, choices);
      const auto report = service.finalize(id);
      if (!report.result) {
        o.fail("no result");
        return;
      }
      if (!first) first = report.result;
      if (!(*report.result == *first)) o.fail("replay " + std::to_string(run) + " differs");
      saved_id = id;
      saved = to_json(report);
    }
  }
  auto store = std::make_shared<ReportStore>(dir.path());
  SessionService service(std::make_shared<KbRepository>(test::default_kb(), std::nullopt, store->kb_archive_dir()),
                         store);
  if (service.list_reports().size() != 3) o.fail("reports lost on restart");
  try {
    const auto fetched = service.fetch_report(saved_id);
    if (to_json(fetched) != saved) o.fail("restored report differs");
    if (!fetched.result || !(*fetched.result == *first)) o.fail("restored result differs");
  } catch (const NotFound&) {
    o.fail("report missing after restart");
  }
  if (o.pass) o.detail << "3 replays bitwise equal, 3 reports restored";
}

void primary_only(Outcome& o) {
  const auto diag = cli(std::string("diagnose ") + SNN_DATA_DIR + "/responses/formal_d13.txt");
  if (diag.status != 0 || diag.out.find("selected: 13 Hypertension") == std::string::npos)
    o.fail("cli diagnose exited " + std::to_string(diag.status));
  if (cli("kb validate").status != 0) o.fail("cli kb validate");

  test::ScratchDir dir;
  auto store = std::make_shared<ReportStore>(dir.path());
  SessionService service(std::make_shared<KbRepository>(test::default_kb(), std::nullopt, store->kb_archive_dir()),
                         store);
  httplib::Server server;
  mount_api(server, service);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client c("127.0.0.1", port);
  const auto health = c.Get("/healthz");
  if (!health || health->status != 200) o.fail("healthz");
  const auto st = c.Get("/selftest/13");
  if (!st || st->status != 200 || Json::parse(st->body)["result"]["selected"] != 13) o.fail("GET /selftest/13");
  const auto created = c.Post("/sessions", "{}", "application/json");
  if (!created || created->status != 201) o.fail("POST /sessions");
  server.stop();
  t.join();
  if (o.pass) o.detail << "cli and http api exercised without the web ui";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"optimal likelihood profile reproduction", profile_reproduction},
      {"profile statistics", profile_statistics},
      {"hypertension formal test", hypertension},
      {"self-identification", self_identification},
      {"normalization", normalization},
      {"oracle equivalence", oracle_equivalence},
      {"determinism and durability", determinism},
      {"primary suite without web ui", primary_only},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail.str() << "\n";
    failed += o.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
