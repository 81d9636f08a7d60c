// Copyright 2026 The affectrec Authors. All Rights Reserved.
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

// JSON-over-HTTP binding of SessionService. Errors are returned as
// {"code": <kind>, "message": <text>}.

#include <optional>
#include <string>

#include "json.hpp"

#include "affectrec/error.hpp"
#include "affectrec/service/service.hpp"

// After Eigen: httplib pulls in <resolv.h>, whose _res macro collides with
// Eigen parameter names.
#include "httplib.h"

namespace affectrec::service {

inline int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::invalid_parameter:
    case ErrorKind::parse:
      return 400;
    case ErrorKind::not_found:
      return 404;
    case ErrorKind::state:
    case ErrorKind::conflict:
      return 409;
    case ErrorKind::unknown_item:
    case ErrorKind::no_preferences:
      return 422;
    case ErrorKind::not_ready:
      return 503;
    default:
      return 500;
  }
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, ErrorKind kind, const std::string& message) {
  send_json(res, http_status(kind), {{"code", std::string(to_string(kind))}, {"message", message}});
}

inline nlohmann::json parse_body(const httplib::Request& req) {
  try {
    return req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::validation, std::string("malformed JSON body: ") + e.what());
  }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.kind(), e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, ErrorKind::validation, e.what());
    } catch (const std::exception& e) {
      send_json(res, 500, {{"code", "internal"}, {"message", e.what()}});
    }
  };
}

inline nlohmann::json public_view(const SessionService& svc, const Session& s) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : s.elicitation_items) items.push_back(svc.item_view(it.item_id, it.modality));
  return {{"session_id", s.session_id},
          {"engine", std::string(to_string(s.engine))},
          {"state", std::string(to_string(s.state))},
          {"elicitation", items}};
}

}  // namespace detail

inline void mount_routes(httplib::Server& server, SessionService& svc) {
  using detail::guarded;
  using detail::parse_body;
  using detail::send_json;

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  server.Post("/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    require(body.is_object() && body.contains("engine") && body["engine"].is_string(), ErrorKind::validation,
            "body needs an 'engine' string");
    std::optional<std::uint64_t> seed;
    if (body.contains("seed") && !body["seed"].is_null()) {
      require(body["seed"].is_number_unsigned(), ErrorKind::validation, "'seed' must be a nonnegative integer");
      seed = body["seed"].get<std::uint64_t>();
    }
    Engine engine;
    try {
      engine = parse_engine(body["engine"].get<std::string>());
    } catch (const Error& e) {
      fail(ErrorKind::validation, e.what());
    }
    send_json(res, 201, detail::public_view(svc, svc.create_session(engine, seed)));
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, detail::public_view(svc, svc.get(req.matches[1])));
  }));

  server.Get(R"(/sessions/([^/]+)/elicitation)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, svc.elicitation_view(req.matches[1]));
  }));

  server.Post(R"(/sessions/([^/]+)/ratings)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    require(body.is_object() && body.contains("ratings") && body["ratings"].is_array(), ErrorKind::validation,
            "body needs a 'ratings' array");
    std::vector<std::pair<std::string, int>> ratings;
    for (const auto& r : body["ratings"]) {
      require(r.is_object() && r.contains("item_id") && r["item_id"].is_string() && r.contains("rating") &&
                  r["rating"].is_number_integer(),
              ErrorKind::validation, "each rating needs 'item_id' and integer 'rating'");
      ratings.emplace_back(r["item_id"].get<std::string>(), r["rating"].get<int>());
    }
    const Session s = svc.submit_ratings(req.matches[1], ratings);
    send_json(res, 200, {{"session_id", s.session_id}, {"state", std::string(to_string(s.state))}});
  }));

  server.Get(R"(/sessions/([^/]+)/recommendations)",
             guarded([&svc](const httplib::Request& req, httplib::Response& res) {
               std::optional<std::size_t> n;
               if (req.has_param("n")) {
                 const std::string text = req.get_param_value("n");
                 std::size_t used = 0;
                 long long v = 0;
                 try {
                   v = std::stoll(text, &used);
                 } catch (const std::exception&) {
                   used = 0;
                 }
                 require(used == text.size() && v >= 1, ErrorKind::validation, "'n' must be a positive integer");
                 n = static_cast<std::size_t>(v);
               }
               const RecommendationList list = svc.get_recommendations(req.matches[1], n);
               nlohmann::json body = to_json(list);
               body["session_id"] = std::string(req.matches[1]);
               for (auto& e : body["entries"]) {
                 e["item"] = svc.item_view(e["painting_id"].get<std::string>(), Modality::painting);
               }
               send_json(res, 200, body);
             }));

  server.Post(R"(/sessions/([^/]+)/mood)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    require(body.is_object() && body.contains("phase") && body["phase"].is_string(), ErrorKind::validation,
            "body needs a 'phase' of 'pre' or 'post'");
    const Session s = svc.submit_mood(req.matches[1], body["phase"].get<std::string>(), body);
    send_json(res, 200, {{"session_id", s.session_id}, {"state", std::string(to_string(s.state))}});
  }));

  server.Post(R"(/sessions/([^/]+)/reflections)",
              guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                auto body = parse_body(req);
                if (body.is_object() && body.contains("reflections")) body = body["reflections"];
                const Session s = svc.submit_reflections(req.matches[1], body);
                send_json(res, 200, {{"session_id", s.session_id}, {"state", std::string(to_string(s.state))}});
              }));

  server.Post(R"(/sessions/([^/]+)/feedback)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const Session s = svc.submit_feedback(req.matches[1], parse_body(req));
    send_json(res, 200, {{"session_id", s.session_id}, {"state", std::string(to_string(s.state))}});
  }));
}

}  // namespace affectrec::service
