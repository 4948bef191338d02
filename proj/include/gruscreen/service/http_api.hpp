// Copyright 2026 The gruscreen Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON API over cpp-httplib:
//   POST /v1/sessions                      -> {session_id, question}
//   POST /v1/sessions/{id}/messages {text} -> {score, next_question, aggregate, state}
//   GET  /v1/sessions/{id}/report          -> report JSON (?format=text for plain text)
//   GET  /v1/health                        -> {status, model_checksum}
// Every /v1 route requires "Authorization: Bearer <token>" when a token is
// configured. Schemas: docs/api.md.

#include <string>

#include "gruscreen/error.hpp"
#include "gruscreen/service/chat_service.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gruscreen::service {

/// Environment variable holding the API bearer token.
inline constexpr const char* kTokenEnv = "GRUSCREEN_API_TOKEN";

namespace detail {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSessionNotFound: return 404;
    case ErrorCode::kSessionClosed: return 409;
    case ErrorCode::kModelNotLoaded: return 503;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kFormatError: return 400;
    default: return 500;
  }
}

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", std::string(code)}, {"message", message}});
}

template <typename Handler>
httplib::Server::Handler guarded(const std::string& token, Handler handler) {
  return [token, handler](const httplib::Request& req, httplib::Response& res) {
    if (!token.empty() && req.get_header_value("Authorization") != "Bearer " + token) {
      send_error(res, 401, "Unauthorized", "missing or invalid bearer token");
      return;
    }
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    }
  };
}

}  // namespace detail

/// Registers the API routes. `service` must outlive the server.
inline void register_routes(httplib::Server& server, ChatService& service, const std::string& token) {
  using detail::guarded;
  using detail::send_json;

  server.Get("/v1/health", guarded(token, [&service](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200,
                         {{"status", service.model_loaded() ? "ok" : "degraded"},
                          {"model_checksum", service.model_checksum()}});
             }));

  server.Post("/v1/sessions", guarded(token, [&service](const httplib::Request&, httplib::Response& res) {
                auto created = service.create_session();
                send_json(res, 201, {{"session_id", created.session_id}, {"question", to_json_value(created.question)}});
              }));

  server.Post(R"(/v1/sessions/([0-9A-Za-z_-]+)/messages)",
              guarded(token, [&service](const httplib::Request& req, httplib::Response& res) {
                const auto body = nlohmann::json::parse(req.body);
                if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
                  throw Error(ErrorCode::kInvalidArgument, "body must be {\"text\": string}");
                }
                auto result = service.post_message(req.matches[1].str(), body["text"].get<std::string>());
                send_json(res, 200,
                          {{"score", result.score},
                           {"next_question", to_json_value(result.next_question)},
                           {"aggregate", result.aggregate},
                           {"state", std::string(to_string(result.state))}});
              }));

  server.Get(R"(/v1/sessions/([0-9A-Za-z_-]+)/report)",
             guarded(token, [&service](const httplib::Request& req, httplib::Response& res) {
               auto report = service.generate_report(req.matches[1].str());
               if (req.get_param_value("format") == "text") {
                 res.set_content(report_to_text(report), "text/plain; charset=utf-8");
               } else {
                 send_json(res, 200, report_to_json(report));
               }
             }));
}

}  // namespace gruscreen::service
