#include "sheriff/net/messages.hpp"

#include "sheriff/net/socket.hpp"

namespace sheriff::net {

using nlohmann::json;

namespace {

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed ") + what + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ProtocolError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

std::string to_string(FetchStatus s) {
  switch (s) {
    case FetchStatus::Ok: return "ok";
    case FetchStatus::HttpError: return "http-error";
    case FetchStatus::Timeout: return "timeout";
    case FetchStatus::SelectorMiss: return "selector-miss";
  }
  return "?";
}

FetchStatus fetch_status_from_string(std::string_view text) {
  if (text == "ok") return FetchStatus::Ok;
  if (text == "http-error") return FetchStatus::HttpError;
  if (text == "timeout") return FetchStatus::Timeout;
  if (text == "selector-miss") return FetchStatus::SelectorMiss;
  throw ProtocolError("unknown fetch status '" + std::string(text) + "'");
}

json to_json(const RegisterMsg& m) {
  return {{"type", "REGISTER"}, {"id", m.id}, {"country", m.country}, {"city", m.city}, {"clock", m.clock}};
}

json to_json(const PrepareMsg& m) {
  json j = {{"type", "PREPARE"},
            {"wave", m.wave},
            {"uri", m.uri},
            {"selector", extract::to_json(m.selector)},
            {"timeout_ms", m.timeout_ms}};
  if (m.profile) j["profile"] = sheriff::to_json(*m.profile);
  return j;
}

json to_json(const GoMsg& m) {
  return {{"type", "GO"}, {"wave", m.wave}, {"start_at", m.start_at}, {"window_ms", m.window_ms}};
}

json to_json(const ResultMsg& m) {
  json j = {{"type", "RESULT"},         {"wave", m.wave},
            {"status", to_string(m.status)}, {"http_status", m.http_status},
            {"started_at", m.started_at}, {"latency_ms", m.latency_ms},
            {"error", m.error}};
  if (m.body) j["body"] = *m.body;
  return j;
}

json registered_msg(std::int64_t clock) { return {{"type", "REGISTERED"}, {"clock", clock}}; }
json ready_msg(const std::string& wave) { return {{"type", "READY"}, {"wave", wave}}; }
json abort_msg(const std::string& wave) { return {{"type", "ABORT"}, {"wave", wave}}; }

RegisterMsg register_from_json(const json& j) {
  return guarded("REGISTER", [&] {
    RegisterMsg m;
    m.id = j.at("id").get<std::string>();
    m.country = j.value("country", std::string());
    m.city = j.value("city", std::string());
    m.clock = j.value("clock", std::int64_t{0});
    if (m.id.empty()) throw ProtocolError("REGISTER without id");
    return m;
  });
}

PrepareMsg prepare_from_json(const json& j) {
  return guarded("PREPARE", [&] {
    PrepareMsg m;
    m.wave = j.at("wave").get<std::string>();
    m.uri = j.at("uri").get<std::string>();
    m.selector = extract::selector_from_json(j.at("selector"));
    if (j.contains("profile") && !j.at("profile").is_null()) m.profile = persona_from_json(j.at("profile"));
    m.timeout_ms = j.value("timeout_ms", std::int64_t{20000});
    return m;
  });
}

GoMsg go_from_json(const json& j) {
  return guarded("GO", [&] {
    GoMsg m;
    m.wave = j.at("wave").get<std::string>();
    m.start_at = j.at("start_at").get<std::int64_t>();
    m.window_ms = j.value("window_ms", std::int64_t{5000});
    return m;
  });
}

ResultMsg result_from_json(const json& j) {
  return guarded("RESULT", [&] {
    ResultMsg m;
    m.wave = j.at("wave").get<std::string>();
    m.status = fetch_status_from_string(j.at("status").get<std::string>());
    m.http_status = j.value("http_status", 0);
    if (j.contains("body") && !j.at("body").is_null()) m.body = j.at("body").get<std::string>();
    m.started_at = j.value("started_at", std::int64_t{0});
    m.latency_ms = j.value("latency_ms", std::int64_t{0});
    m.error = j.value("error", std::string());
    return m;
  });
}

std::string message_type(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ProtocolError("message without type");
  }
  return j.at("type").get<std::string>();
}

}  // namespace sheriff::net
