// snn: batch diagnosis, self-tests, knowledge-base editing and the HTTP
// service for the sensory-neural diagnostic network.
//
// Exit codes: 0 ok, 1 domain error (parse, validation, unknown index),
// 2 no signal, 3 environment (I/O, bind failure).

#include "snn/http_api.hpp"
#include "snn/selftest.hpp"
#include "snn/serialize.hpp"
#include "snn/session.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#ifndef SNN_DEFAULT_KB_PATH
#define SNN_DEFAULT_KB_PATH "kb/default.kbtxt"
#endif

namespace {

enum Exit { kOk = 0, kDomain = 1, kNoSignal = 2, kEnvironment = 3 };

struct Options {
  std::string kb_path = SNN_DEFAULT_KB_PATH;
  std::string out_path;
  std::string responses_path;
  std::string listen = "127.0.0.1:8080";
  std::string reports_dir = "snn-data";
  std::string webui_dir;
  int disease = 0;
  bool all = false;
  int d = 0, s = 0, i = 0;
  std::string w;
};

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return;
  }
  snn::write_file_atomically(path, contents);
}

int cmd_diagnose(const Options& o) {
  const auto kb = snn::load_knowledge_base_file(o.kb_path);
  const auto responses = snn::load_responses_file(o.responses_path);
  const auto result = snn::diagnose(kb, responses);
  std::cout << snn::format_result_table(result);
  if (!o.out_path.empty()) {
    snn::Json bundle{{"result", snn::to_json(result)}, {"chart", snn::to_json(snn::chart_data(result))}};
    snn::write_file_atomically(o.out_path, bundle.dump(2) + "\n");
  }
  return kOk;
}

int cmd_selftest(const Options& o) {
  const auto kb = snn::load_knowledge_base_file(o.kb_path);
  if (o.all) {
    std::cout << snn::format_profile_table(snn::optimal_likelihood_profile(kb));
    return kOk;
  }
  const auto result = snn::self_test(kb, o.disease);
  std::cout << snn::format_result_table(result);
  char line[64];
  std::snprintf(line, sizeof line, "L_o(%d) = %.1f%%\n", o.disease,
                snn::round_one_decimal(result.likelihood ? 100.0 * result.likelihood->at(o.disease) : 0.0));
  std::cout << line;
  return kOk;
}

int cmd_kb_validate(const Options& o) {
  std::ifstream in(o.kb_path, std::ios::binary);
  if (!in) throw snn::StorageError("cannot read knowledge base file " + o.kb_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto violations = snn::validate(snn::parse_knowledge_base(buf.str()));
  for (const auto& v : violations) std::cout << v.code << ": " << v.message << '\n';
  std::cout << violations.size() << " violations\n";
  return violations.empty() ? kOk : kDomain;
}

int cmd_kb_set_weight(const Options& o) {
  const auto kb = snn::load_knowledge_base_file(o.kb_path);
  const auto next = snn::set_weight(kb, {o.d, o.s, o.i}, snn::parse_weight(o.w));
  snn::write_file_atomically(o.kb_path, snn::export_knowledge_base(next));
  std::cout << "W(" << o.d << "," << o.s << "," << o.i << ") = " << o.w << "; W_t(" << o.d
            << ") = " << snn::format_weight(snn::total_positive_weight(next, o.d)) << '\n';
  return kOk;
}

int cmd_kb_export(const Options& o) {
  write_output(o.out_path, snn::export_knowledge_base(snn::load_knowledge_base_file(o.kb_path)));
  return kOk;
}

int cmd_serve(const Options& o) {
  const auto colon = o.listen.rfind(':');
  if (colon == std::string::npos) throw snn::InvalidArgument("--listen expects HOST:PORT");
  const auto host = o.listen.substr(0, colon);
  const int port = std::stoi(o.listen.substr(colon + 1));

  auto store = std::make_shared<snn::ReportStore>(o.reports_dir);
  auto kb = snn::open_kb_repository(o.kb_path, store->kb_archive_dir());
  snn::SessionService service(kb, store);

  httplib::Server server;
  snn::mount_api(server, service);
  if (!o.webui_dir.empty() && !server.set_mount_point("/", o.webui_dir)) {
    throw snn::StorageError("cannot serve web UI from " + o.webui_dir);
  }

  // Signals are handled on a dedicated thread so stop() runs outside a
  // signal handler; listen() returns after in-flight requests complete.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  if (!server.bind_to_port(host, port)) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    std::cerr << "error: cannot bind " << o.listen << '\n';
    return kEnvironment;
  }
  std::cerr << "listening on " << o.listen << " (kb version " << kb->current()->version << ")\n";
  server.listen_after_bind();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensory-neural network diagnosis engine"};
  app.require_subcommand(1);
  Options o;

  auto add_kb = [&o](CLI::App* cmd) {
    cmd->add_option("--kb", o.kb_path, "knowledge base file")->envname("SNN_KB");
  };

  auto* diagnose = app.add_subcommand("diagnose", "diagnose from a response file");
  add_kb(diagnose);
  diagnose->add_option("responses", o.responses_path, "response file ('<s> <i>' per line)")->required();
  diagnose->add_option("--out", o.out_path, "write the result and chart bundle as JSON");

  auto* selftest = app.add_subcommand("selftest", "diagnose formal symptom sets");
  add_kb(selftest);
  auto* disease_opt = selftest->add_option("--disease", o.disease, "disease index");
  auto* all_opt = selftest->add_flag("--all", o.all, "all diseases: optimal likelihood profile");
  disease_opt->excludes(all_opt);
  selftest->callback([&] {
    if (!o.all && disease_opt->count() == 0) throw CLI::ValidationError("selftest", "--disease or --all required");
  });

  auto* kb = app.add_subcommand("kb", "validate, edit or export the knowledge base");
  kb->require_subcommand(1);
  auto* validate = kb->add_subcommand("validate", "report every violation");
  add_kb(validate);
  auto* set_weight = kb->add_subcommand("set-weight", "set W(d,s,i); 0 removes the entry");
  add_kb(set_weight);
  set_weight->add_option("d", o.d)->required();
  set_weight->add_option("s", o.s)->required();
  set_weight->add_option("i", o.i)->required();
  set_weight->add_option("w", o.w, "integer, p/q or decimal")->required();
  auto* export_cmd = kb->add_subcommand("export", "write the canonical KB text");
  add_kb(export_cmd);
  export_cmd->add_option("--out", o.out_path);

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  add_kb(serve);
  serve->add_option("--listen", o.listen, "HOST:PORT")->envname("SNN_LISTEN");
  serve->add_option("--reports", o.reports_dir, "session and report directory")->envname("SNN_REPORTS");
  serve->add_option("--webui", o.webui_dir, "static web UI directory to serve at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kDomain;
  }

  try {
    if (*diagnose) return cmd_diagnose(o);
    if (*selftest) return cmd_selftest(o);
    if (*validate) return cmd_kb_validate(o);
    if (*set_weight) return cmd_kb_set_weight(o);
    if (*export_cmd) return cmd_kb_export(o);
    if (*serve) return cmd_serve(o);
  } catch (const snn::NoSignal& e) {
    std::cerr << "no signal: no confirmed indicator excites any disease neuron\n";
    return kNoSignal;
  } catch (const snn::StorageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEnvironment;
  } catch (const snn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kOk;
}
