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

// Study sessions and the events that build them. Every mutation is an event;
// applying the same event sequence always yields the same session.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "affectrec/catalog/record.hpp"
#include "affectrec/engine/index.hpp"
#include "affectrec/engine/recommend.hpp"
#include "affectrec/error.hpp"

namespace affectrec::service {

enum class SessionState { created, elicited, recommended, completed };

constexpr std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::created: return "created";
    case SessionState::elicited: return "elicited";
    case SessionState::recommended: return "recommended";
    case SessionState::completed: return "completed";
  }
  return "unknown";
}

struct ElicitationItem {
  std::string item_id;
  Modality modality = Modality::music;
  bool attention_check = false;

  friend bool operator==(const ElicitationItem&, const ElicitationItem&) = default;
};

/// Mood category plus optional short-form affect schedule item scores.
struct MoodPayload {
  std::string category;
  std::vector<int> panas;

  friend bool operator==(const MoodPayload&, const MoodPayload&) = default;
};

struct Reflection {
  std::string text;
  std::string aspects;

  friend bool operator==(const Reflection&, const Reflection&) = default;
};

inline constexpr std::array<std::string_view, 6> kQualityMetrics{
    "accuracy", "diversity", "novelty", "serendipity", "immersion", "engagement"};

using QualityFeedback = std::map<std::string, int>;

struct Session {
  std::string session_id;
  Engine engine = Engine::haydn;
  std::uint64_t seed = 0;
  std::vector<ElicitationItem> elicitation_items;
  std::vector<PreferenceRating> ratings;
  std::optional<bool> attention_passed;
  std::optional<RecommendationList> recommendations;
  std::optional<MoodPayload> mood_pre;
  std::optional<MoodPayload> mood_post;
  std::map<std::string, Reflection> reflections;
  std::optional<QualityFeedback> quality_feedback;
  SessionState state = SessionState::created;
  std::string created_at;
  std::string updated_at;

  bool flagged() const { return attention_passed.has_value() && !*attention_passed; }
};

// --- payload validation -----------------------------------------------------

inline MoodPayload parse_mood(const nlohmann::json& j) {
  require(j.is_object(), ErrorKind::validation, "mood payload must be an object");
  require(j.contains("category") && j["category"].is_string() &&
              !j["category"].get<std::string>().empty(),
          ErrorKind::validation, "mood payload needs a non-empty 'category'");
  MoodPayload mood{j["category"].get<std::string>(), {}};
  if (j.contains("panas") && !j["panas"].is_null()) {
    const auto& items = j["panas"];
    require(items.is_array() && (items.size() == 10 || items.size() == 11), ErrorKind::validation,
            "'panas' must hold 10 or 11 item scores");
    for (const auto& x : items) {
      require(x.is_number_integer() && x.get<int>() >= 1 && x.get<int>() <= 5, ErrorKind::validation,
              "'panas' scores must be integers in 1..5");
      mood.panas.push_back(x.get<int>());
    }
  }
  return mood;
}

inline QualityFeedback parse_feedback(const nlohmann::json& j) {
  require(j.is_object(), ErrorKind::validation, "feedback payload must be an object");
  QualityFeedback out;
  std::vector<std::string> missing;
  for (auto metric : kQualityMetrics) {
    const std::string key(metric);
    if (!j.contains(key)) {
      missing.push_back(key);
      continue;
    }
    const auto& v = j[key];
    require(v.is_number_integer() && v.get<int>() >= 1 && v.get<int>() <= 5, ErrorKind::validation,
            "feedback '" + key + "' must be an integer in 1..5");
    out[key] = v.get<int>();
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    fail(ErrorKind::validation, "feedback is missing: " + names);
  }
  for (const auto& [key, _] : j.items()) {
    require(out.contains(key), ErrorKind::validation, "unknown feedback metric '" + key + "'");
  }
  return out;
}

// --- serialization ----------------------------------------------------------

inline nlohmann::json to_json(const MoodPayload& m) {
  nlohmann::json j{{"category", m.category}};
  if (!m.panas.empty()) j["panas"] = m.panas;
  return j;
}

inline nlohmann::json items_to_json(const std::vector<ElicitationItem>& items) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& it : items) {
    out.push_back({{"item_id", it.item_id},
                   {"modality", std::string(to_string(it.modality))},
                   {"attention_check", it.attention_check}});
  }
  return out;
}

inline nlohmann::json ratings_to_json(const std::vector<PreferenceRating>& ratings) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : ratings) {
    out.push_back({{"item_id", r.item_id}, {"rating", r.rating}, {"attention_check", r.is_attention_check}});
  }
  return out;
}

/// Full internal state, attention flags included.
inline nlohmann::json to_json(const Session& s) {
  nlohmann::json j{{"session_id", s.session_id},
                   {"engine", std::string(to_string(s.engine))},
                   {"seed", s.seed},
                   {"state", std::string(to_string(s.state))},
                   {"elicitation_items", items_to_json(s.elicitation_items)},
                   {"ratings", ratings_to_json(s.ratings)},
                   {"attention_passed", s.attention_passed ? nlohmann::json(*s.attention_passed) : nlohmann::json()},
                   {"flagged", s.flagged()},
                   {"recommendations", s.recommendations ? to_json(*s.recommendations) : nlohmann::json()},
                   {"mood_pre", s.mood_pre ? to_json(*s.mood_pre) : nlohmann::json()},
                   {"mood_post", s.mood_post ? to_json(*s.mood_post) : nlohmann::json()},
                   {"quality_feedback", s.quality_feedback ? nlohmann::json(*s.quality_feedback) : nlohmann::json()},
                   {"created_at", s.created_at},
                   {"updated_at", s.updated_at}};
  nlohmann::json refl = nlohmann::json::object();
  for (const auto& [pid, r] : s.reflections) refl[pid] = {{"text", r.text}, {"aspects", r.aspects}};
  j["reflections"] = refl;
  return j;
}

// --- events -----------------------------------------------------------------

/// Applies one logged event. Events were validated when first recorded, so
/// this only re-checks structural invariants.
inline void apply_event(std::map<std::string, Session>& sessions, const nlohmann::json& event) {
  const std::string type = event.at("type").get<std::string>();
  const std::string id = event.at("session_id").get<std::string>();
  const std::string at = event.value("at", "");

  if (type == "created") {
    Session s;
    s.session_id = id;
    s.engine = parse_engine(event.at("engine").get<std::string>());
    s.seed = event.at("seed").get<std::uint64_t>();
    for (const auto& it : event.at("items")) {
      s.elicitation_items.push_back({it.at("item_id").get<std::string>(),
                                     parse_modality(it.at("modality").get<std::string>()),
                                     it.at("attention_check").get<bool>()});
    }
    s.created_at = s.updated_at = at;
    require(sessions.emplace(id, std::move(s)).second, ErrorKind::integrity, "session '" + id + "' created twice");
    return;
  }

  auto found = sessions.find(id);
  require(found != sessions.end(), ErrorKind::integrity, "event for unknown session '" + id + "'");
  Session& s = found->second;
  s.updated_at = at;
  if (type == "ratings") {
    require(s.state == SessionState::created, ErrorKind::integrity, "ratings event out of order");
    for (const auto& r : event.at("ratings")) {
      s.ratings.push_back({r.at("item_id").get<std::string>(), r.at("rating").get<int>(),
                           r.at("attention_check").get<bool>()});
    }
    s.attention_passed = event.at("attention_passed").get<bool>();
    s.state = SessionState::elicited;
  } else if (type == "recommendations") {
    require(s.state == SessionState::elicited, ErrorKind::integrity, "recommendations event out of order");
    s.recommendations = recommendation_list_from_json(event.at("list"));
    s.state = SessionState::recommended;
  } else if (type == "mood") {
    const auto mood = parse_mood(event.at("mood"));
    if (event.at("phase").get<std::string>() == "pre") {
      s.mood_pre = mood;
    } else {
      s.mood_post = mood;
    }
  } else if (type == "reflections") {
    for (const auto& [pid, r] : event.at("reflections").items()) {
      s.reflections[pid] = {r.at("text").get<std::string>(), r.value("aspects", "")};
    }
  } else if (type == "feedback") {
    s.quality_feedback = parse_feedback(event.at("feedback"));
    s.state = SessionState::completed;
  } else {
    fail(ErrorKind::integrity, "unknown event type '" + type + "'");
  }
}

}  // namespace affectrec::service
