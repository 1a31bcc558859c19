#include "jasmine/http_service.hpp"

#include <httplib.h>

#include <json.hpp>
#include <set>

#include "text_util.hpp"

namespace jasmine {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json fractions_json(const QueryFractions& f) {
  return {{"t", f.t}, {"alpha_a", f.alpha_a}, {"alpha_z", f.alpha_z}, {"alpha_r", f.alpha_r}};
}

json record_json(const IterationRecord& r) {
  json j{{"t", r.t},
         {"labeled", r.labeled},
         {"labeled_positive", r.labeled_positive},
         {"f1", optional_number(r.f1)},
         {"alpha_a", r.fractions.alpha_a},
         {"alpha_z", r.fractions.alpha_z},
         {"alpha_r", r.fractions.alpha_r},
         {"q_a", r.q_a},
         {"q_z", r.q_z},
         {"q_r", r.q_r},
         {"degenerate", r.degenerate},
         {"classifier", to_string(r.kind)},
         {"theta", r.theta}};
  if (r.deltas) {
    j["delta_a"] = r.deltas->delta_a;
    j["delta_z"] = r.deltas->delta_z;
    j["delta"] = r.deltas->delta;
    j["delta_gamma"] = r.deltas->delta_gamma;
  } else {
    j["delta_a"] = j["delta_z"] = j["delta"] = j["delta_gamma"] = nullptr;
  }
  return j;
}

json session_json(const SessionView& v) {
  return {{"id", v.id},
          {"status", to_string(v.status)},
          {"method", v.method},
          {"dataset", v.dataset},
          {"t", v.t},
          {"iterations", v.iterations},
          {"q", v.q},
          {"labeled", v.labeled},
          {"unlabeled", v.unlabeled},
          {"evaluation", v.evaluation},
          {"stop_reason", v.stop_reason.empty() ? json(nullptr) : json(v.stop_reason)},
          {"fractions", fractions_json(v.fractions)}};
}

json batch_json(const BatchView& b) {
  json items = json::array();
  for (const auto& item : b.items) {
    json features = json::array();
    for (const auto& f : item.features) {
      features.push_back({{"name", f.name}, {"value", f.value}, {"percentile", f.percentile}});
    }
    items.push_back({{"id", item.id},
                     {"prob", item.prob},
                     {"predicted", item.predicted},
                     {"flags", {{"anomalous", item.anomalous}, {"uncertain", item.uncertain}, {"random", item.random}}},
                     {"features", std::move(features)}});
  }
  return {{"session", b.session},
          {"iteration", b.iteration},
          {"q", b.q},
          {"counts", {{"anomalous", b.q_a}, {"uncertain", b.q_z}, {"random", b.q_r}}},
          {"fractions", fractions_json(b.fractions)},
          {"items", std::move(items)}};
}

json metrics_json(const MetricsView& m) {
  json rows = json::array();
  for (const auto& r : m.iterations) rows.push_back(record_json(r));
  return {{"session", m.session}, {"initial", record_json(m.initial)}, {"iterations", std::move(rows)}};
}

HttpResponse error_response(int status, const std::string& code, const std::string& message,
                            const std::string& field = {}) {
  json e{{"code", code}, {"message", message}};
  e["field"] = field.empty() ? json(nullptr) : json(field);
  return {status, json{{"error", e}}.dump()};
}

json parse_body(std::string_view body) {
  if (detail::trim(body).empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ServiceError(400, "invalid_json", e.what());
  }
}

std::string scalar_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array() && key == "methods") {
    std::string out;
    for (const auto& m : v) {
      if (!m.is_string()) throw ServiceError(400, "invalid_config", "methods must be strings", key);
      out += (out.empty() ? "" : ",") + m.get<std::string>();
    }
    return out;
  }
  throw ServiceError(400, "invalid_config", "unsupported value type", key);
}

SessionRequest parse_session_request(const json& body) {
  if (!body.is_object()) throw ServiceError(400, "invalid_json", "request body must be an object");
  SessionRequest req;
  try {
    if (body.contains("preset")) {
      if (!body["preset"].is_string()) throw ServiceError(400, "invalid_config", "preset must be a string", "preset");
      req.config = ExperimentConfig::preset(body["preset"].get<std::string>());
    }
    if (body.contains("config")) {
      const auto& cfg = body["config"];
      if (!cfg.is_object()) throw ServiceError(400, "invalid_config", "config must be an object", "config");
      for (const auto& [key, value] : cfg.items()) req.config.set(key, scalar_text(value, key));
    }
    if (body.contains("method")) {
      if (!body["method"].is_string()) throw ServiceError(400, "invalid_config", "method must be a string", "method");
      req.method = parse_method(body["method"].get<std::string>());
    }
  } catch (const ConfigError& e) {
    throw ServiceError(400, "invalid_config", e.what(), e.field() == "methods" ? "method" : e.field());
  }
  if (body.contains("sim")) {
    if (!body["sim"].is_number_integer()) throw ServiceError(400, "invalid_config", "sim must be an integer", "sim");
    req.sim = body["sim"].get<int>();
  }
  return req;
}

Label parse_label(const json& v, const std::string& id) {
  if (v.is_number_integer()) {
    const auto x = v.get<long long>();
    if (x == 0 || x == 1) return static_cast<Label>(x);
  }
  throw ServiceError(422, "invalid_label", "label for '" + id + "' must be 0 or 1", id);
}

std::map<std::string, Label> parse_labels(const json& body) {
  if (!body.is_object() || !body.contains("labels")) {
    throw ServiceError(400, "invalid_json", "expected an object with a 'labels' member");
  }
  const auto& labels = body["labels"];
  std::map<std::string, Label> out;
  if (labels.is_object()) {
    for (const auto& [id, v] : labels.items()) out[id] = parse_label(v, id);
  } else if (labels.is_array()) {
    for (const auto& entry : labels) {
      if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string() || !entry.contains("label")) {
        throw ServiceError(400, "invalid_json", "label entries need 'id' and 'label'");
      }
      const auto id = entry["id"].get<std::string>();
      if (out.count(id)) throw ServiceError(422, "duplicate_item", "item '" + id + "' labeled twice", id);
      out[id] = parse_label(entry["label"], id);
    }
  } else {
    throw ServiceError(400, "invalid_json", "'labels' must be an object or an array");
  }
  return out;
}

}  // namespace

HttpResponse handle_request(SessionService& service, std::string_view method, std::string_view path,
                            std::string_view body) {
  try {
    auto parts = detail::split(path.substr(0, path.find('?')), '/');
    std::vector<std::string> seg;
    for (auto p : parts) {
      if (!p.empty()) seg.emplace_back(p);
    }
    if (seg.empty() || seg[0] != "sessions" || seg.size() > 3) {
      return error_response(404, "not_found", "no route for " + std::string(path));
    }
    if (seg.size() == 1) {
      if (method != "POST") return error_response(405, "method_not_allowed", "use POST /sessions");
      const auto id = service.create(parse_session_request(parse_body(body)));
      return {201, session_json(service.get(id)).dump()};
    }
    const std::string& id = seg[1];
    if (seg.size() == 2) {
      if (method != "GET") return error_response(405, "method_not_allowed", "use GET");
      return {200, session_json(service.get(id)).dump()};
    }
    const std::string& leaf = seg[2];
    if (leaf == "batch") {
      if (method != "GET") return error_response(405, "method_not_allowed", "use GET");
      return {200, batch_json(service.batch(id)).dump()};
    }
    if (leaf == "metrics") {
      if (method != "GET") return error_response(405, "method_not_allowed", "use GET");
      return {200, metrics_json(service.metrics(id)).dump()};
    }
    if (leaf == "labels") {
      if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
      const auto labels = parse_labels(parse_body(body));
      const auto record = service.post_labels(id, labels);
      const auto view = service.get(id);
      return {200, json{{"session", id}, {"status", to_string(view.status)}, {"iteration", record_json(record)}}.dump()};
    }
    return error_response(404, "not_found", "no route for " + std::string(path));
  } catch (const ServiceError& e) {
    return error_response(e.status(), e.code(), e.what(), e.field());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

struct HttpServer::Impl {
  SessionService& service;
  httplib::Server server;
  int port = -1;

  explicit Impl(SessionService& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      const auto out = handle_request(service, req.method, req.path, req.body);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    server.Post(R"(/.*)", handler);
    server.Get(R"(/.*)", handler);
    server.Put(R"(/.*)", handler);
    server.Patch(R"(/.*)", handler);
    server.Delete(R"(/.*)", handler);
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  }
};

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  return impl_->port;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}
bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace jasmine
