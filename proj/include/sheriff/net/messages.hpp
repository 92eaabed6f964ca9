#pragma once

#include "sheriff/core/persona.hpp"
#include "sheriff/core/time.hpp"
#include "sheriff/extract/selector.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace sheriff::net {

// Agent protocol. Every message is a JSON object with a "type" field.
//
//   agent -> coordinator   REGISTER {id, country, city, clock}
//   coordinator -> agent   REGISTERED {clock}
//   coordinator -> agent   PREPARE {wave, uri, selector, profile?, timeout_ms}
//   agent -> coordinator   READY {wave}
//   coordinator -> agent   GO {wave, start_at, window_ms}
//   agent -> coordinator   RESULT {wave, status, http_status, body?, started_at, latency_ms, error}
//   coordinator -> agent   ABORT {wave}
//
// Clocks are epoch milliseconds; start_at and started_at are on the
// coordinator's clock.

enum class FetchStatus { Ok, HttpError, Timeout, SelectorMiss };

std::string to_string(FetchStatus s);
FetchStatus fetch_status_from_string(std::string_view text);

struct RegisterMsg {
  std::string id;
  std::string country;
  std::string city;
  std::int64_t clock = 0;
};

struct PrepareMsg {
  std::string wave;
  std::string uri;
  extract::PriceSelector selector;
  std::optional<PersonaProfile> profile;
  std::int64_t timeout_ms = 20000;
};

struct GoMsg {
  std::string wave;
  std::int64_t start_at = 0;
  std::int64_t window_ms = 5000;
};

struct ResultMsg {
  std::string wave;
  FetchStatus status = FetchStatus::Timeout;
  int http_status = 0;
  std::optional<std::string> body;
  std::int64_t started_at = 0;
  std::int64_t latency_ms = 0;
  std::string error;
};

nlohmann::json to_json(const RegisterMsg& m);
nlohmann::json to_json(const PrepareMsg& m);
nlohmann::json to_json(const GoMsg& m);
nlohmann::json to_json(const ResultMsg& m);
nlohmann::json registered_msg(std::int64_t clock);
nlohmann::json ready_msg(const std::string& wave);
nlohmann::json abort_msg(const std::string& wave);

// Throw ProtocolError on missing or mistyped fields.
RegisterMsg register_from_json(const nlohmann::json& j);
PrepareMsg prepare_from_json(const nlohmann::json& j);
GoMsg go_from_json(const nlohmann::json& j);
ResultMsg result_from_json(const nlohmann::json& j);
std::string message_type(const nlohmann::json& j);

}  // namespace sheriff::net
