#include "snn/http_api.hpp"

#include <httplib.h>

#include <functional>

namespace snn {
namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

Json error_body(std::string_view code, const std::string& message) {
  return {{"error", code}, {"message", message}};
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  auto j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InvalidArgument("request body is not a JSON object");
  return j;
}

int path_int(const httplib::Request& req, const std::string& name) {
  const auto& raw = req.path_params.at(name);
  try {
    std::size_t used = 0;
    const int v = std::stoi(raw, &used);
    if (used == raw.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("invalid " + name + " '" + raw + "'");
}

// Maps domain exceptions onto HTTP status codes.
httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const NotFound& e) {
      reply(res, 404, error_body("not_found", e.what()));
    } catch (const VersionConflict& e) {
      auto body = error_body("version_conflict", e.what());
      body["current_version"] = e.current();
      reply(res, 409, body);
    } catch (const SessionStateError& e) {
      reply(res, 409, error_body("session_state", e.what()));
    } catch (const ValidationError& e) {
      auto body = error_body("validation", e.what());
      body["violations"] = Json::array();
      for (const auto& v : e.violations()) body["violations"].push_back(to_json(v));
      reply(res, 422, body);
    } catch (const NoSignal& e) {
      reply(res, 422, error_body("no_signal", e.what()));
    } catch (const InvalidArgument& e) {
      reply(res, 400, error_body("invalid_argument", e.what()));
    } catch (const Json::exception& e) {
      reply(res, 400, error_body("invalid_argument", e.what()));
    } catch (const StorageError& e) {
      reply(res, 500, error_body("storage", e.what()));
    } catch (const std::exception& e) {
      reply(res, 500, error_body("internal", e.what()));
    }
  };
}

Json question_json(const Question& q) {
  Json indicators = Json::array();
  for (std::size_t k = 0; k < q.indicators.size(); ++k) {
    indicators.push_back({{"index", static_cast<int>(k + 1)}, {"label", q.indicators[k]}});
  }
  return {{"done", false}, {"symptom", {{"index", q.symptom}, {"name", q.name}}}, {"indicators", indicators}};
}

Json report_listing(const Report& r) {
  return {{"id", r.id},
          {"sequence", r.sequence},
          {"created_at", r.created_at},
          {"patient_label", r.session.patient_label},
          {"status", r.status},
          {"selected", r.result ? Json(r.result->selected) : Json(nullptr)},
          {"selected_name", r.result ? Json(r.result->selected_name) : Json(nullptr)},
          {"kb_version", r.session.kb_version}};
}

Weight weight_from_json(const Json& j) {
  if (j.is_number_integer()) return Weight(j.get<std::int64_t>());
  if (j.is_string()) return parse_weight(j.get<std::string>());
  throw InvalidArgument("w must be an integer or a rational string such as \"3/2\"");
}

}  // namespace

void mount_api(httplib::Server& server, SessionService& service) {
  server.Get("/healthz", guarded([](const auto&, auto& res) { reply(res, 200, {{"status", "ok"}}); }));

  server.Post("/sessions", guarded([&service](const auto& req, auto& res) {
                const auto body = parse_body(req);
                const auto label = body.contains("patient_label") && !body["patient_label"].is_null()
                                       ? body["patient_label"].template get<std::string>()
                                       : std::string{};
                reply(res, 201, {{"session", to_json(service.create_session(label))}});
              }));

  server.Get("/sessions/:id", guarded([&service](const auto& req, auto& res) {
               reply(res, 200, {{"session", to_json(service.session(req.path_params.at("id")))}});
             }));

  server.Get("/sessions/:id/question", guarded([&service](const auto& req, auto& res) {
               const auto q = service.next_question(req.path_params.at("id"));
               reply(res, 200, q ? question_json(*q) : Json{{"done", true}});
             }));

  server.Post("/sessions/:id/answer", guarded([&service](const auto& req, auto& res) {
                const auto body = parse_body(req);
                std::optional<int> indicator;
                const bool skip = body.contains("skip") && body["skip"].is_boolean() && body["skip"].template get<bool>();
                if (!skip) {
                  if (!body.contains("indicator_index") || !body["indicator_index"].is_number_integer()) {
                    throw InvalidArgument("expected {\"indicator_index\": n} or {\"skip\": true}");
                  }
                  indicator = body["indicator_index"].template get<int>();
                }
                reply(res, 200, {{"session", to_json(service.record_answer(req.path_params.at("id"), indicator))}});
              }));

  server.Post("/sessions/:id/finalize", guarded([&service](const auto& req, auto& res) {
                reply(res, 200, {{"report", to_json(service.finalize(req.path_params.at("id")))}});
              }));

  server.Get("/reports", guarded([&service](const auto&, auto& res) {
               Json list = Json::array();
               for (const auto& r : service.list_reports()) list.push_back(report_listing(r));
               reply(res, 200, {{"reports", list}});
             }));

  server.Get("/reports/:id", guarded([&service](const auto& req, auto& res) {
               reply(res, 200, {{"report", to_json(service.fetch_report(req.path_params.at("id")))}});
             }));

  server.Get("/kb", guarded([&service](const auto&, auto& res) {
               const auto kb = service.kb().current();
               reply(res, 200, {{"version", kb->version}, {"kb", to_json(*kb)}});
             }));

  server.Patch("/kb/weights", guarded([&service](const auto& req, auto& res) {
                 const auto body = parse_body(req);
                 const WeightKey key{body.at("d").template get<int>(), body.at("s").template get<int>(),
                                     body.at("i").template get<int>()};
                 const auto expected = body.at("expected_version").template get<std::uint64_t>();
                 const auto kb = service.kb().commit(expected, key, weight_from_json(body.at("w")));
                 reply(res, 200, {{"version", kb->version}});
               }));

  server.Get("/selftest", guarded([&service](const auto&, auto& res) {
               const auto kb = service.kb().current();
               auto body = to_json(optimal_likelihood_profile(*kb));
               body["kb_version"] = kb->version;
               reply(res, 200, body);
             }));

  server.Get("/selftest/:d", guarded([&service](const auto& req, auto& res) {
               const auto kb = service.kb().current();
               const int d = path_int(req, "d");
               if (!kb->diseases.find(d)) throw NotFound("unknown disease index " + std::to_string(d));
               const auto result = self_test(*kb, d);
               reply(res, 200, {{"result", to_json(result)}, {"chart", to_json(chart_data(result))}});
             }));
}

}  // namespace snn
