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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <type_traits>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "affectrec/affect.hpp"
#include "affectrec/catalog/record.hpp"
#include "affectrec/engine/index.hpp"
#include "affectrec/engine/recommend.hpp"
#include "affectrec/error.hpp"
#include "affectrec/service/session.hpp"

namespace affectrec::service {

/// Append-only JSON-lines event log. Each append is flushed before returning.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::app);
    if (!out_) fail(ErrorKind::io, "cannot open event log: " + path.string());
  }

  void append(const nlohmann::json& event) {
    std::lock_guard lock(mutex_);
    lines_.push_back(event.dump());
    if (out_.is_open()) {
      out_ << lines_.back() << '\n';
      out_.flush();
    }
  }

  void flush() {
    std::lock_guard lock(mutex_);
    if (out_.is_open()) out_.flush();
  }

  /// Events appended through this instance, in order.
  std::vector<nlohmann::json> events() const {
    std::lock_guard lock(mutex_);
    std::vector<nlohmann::json> out;
    for (const auto& l : lines_) out.push_back(nlohmann::json::parse(l));
    return out;
  }

  static std::vector<nlohmann::json> read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open event log: " + path.string());
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      try {
        out.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::integrity, path.string() + ":" + std::to_string(n) + ": " + e.what());
      }
    }
    return out;
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  mutable std::mutex mutex_;
  std::vector<std::string> lines_;
};

inline std::map<std::string, Session> replay(const std::vector<nlohmann::json>& events) {
  std::map<std::string, Session> sessions;
  for (const auto& e : events) apply_event(sessions, e);
  return sessions;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

struct ServiceOptions {
  std::size_t elicitation_items = 11;  // including one attention check per modality
  std::size_t default_recommendations = 3;
  // Therapist-reviewed paintings; when set, the only paintings ever shown.
  std::optional<std::unordered_set<std::string>> painting_allowlist;
  bool curate_music = true;
  std::function<std::string()> clock = utc_timestamp;
};

/// Runs the elicitation -> recommendation -> reflection protocol for many
/// concurrent sessions. Each session is guarded by its own mutex; indices
/// and the catalog are shared read-only.
class SessionService {
 public:
  SessionService(Catalog catalog, std::map<Engine, SimilarityIndex> indices,
                 std::shared_ptr<EventLog> log, ServiceOptions options = {})
      : catalog_(std::move(catalog)), indices_(std::move(indices)), log_(std::move(log)), options_(std::move(options)) {
    require(log_ != nullptr, ErrorKind::invalid_parameter, "service needs an event log");
    for (const auto& r : catalog_.music()) {
      if (!options_.curate_music || therapeutic_curation_filter(r.va)) curated_music_.push_back(r.id);
    }
    for (const auto& r : catalog_.paintings()) {
      if (!therapeutic_curation_filter(r.va)) continue;
      if (options_.painting_allowlist && !options_.painting_allowlist->contains(r.id)) continue;
      curated_paintings_.push_back(r.id);
      curated_painting_set_.insert(r.id);
    }
    std::random_device rd;
    id_rng_.seed((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  }

  /// Restores sessions from a previously written log before serving.
  void restore(const std::vector<nlohmann::json>& events) {
    std::unique_lock lock(map_mutex_);
    auto sessions = replay(events);
    for (auto& [id, s] : sessions) {
      auto slot = std::make_unique<Slot>();
      slot->session = std::move(s);
      slots_[id] = std::move(slot);
    }
  }

  bool ready(Engine engine) const { return indices_.contains(engine); }
  const std::vector<std::string>& curated_music() const noexcept { return curated_music_; }
  const std::vector<std::string>& curated_paintings() const noexcept { return curated_paintings_; }
  const Catalog& catalog() const noexcept { return catalog_; }

  Session create_session(Engine engine, std::optional<std::uint64_t> seed = std::nullopt) {
    if (!ready(engine)) {
      fail(ErrorKind::not_ready, "no index loaded for engine '" + std::string(to_string(engine)) + "'");
    }
    std::string id;
    std::uint64_t session_seed = 0;
    {
      std::lock_guard lock(id_mutex_);
      session_seed = seed.value_or(id_rng_());
      char buf[24];
      std::snprintf(buf, sizeof buf, "s-%016llx", static_cast<unsigned long long>(id_rng_()));
      id = buf;
    }
    std::mt19937_64 rng(session_seed);
    nlohmann::json items = nlohmann::json::array();
    auto sample = [&](const std::vector<std::string>& pool, Modality m) {
      if (pool.size() < options_.elicitation_items) {
        fail(ErrorKind::not_ready, "curated " + std::string(to_string(m)) + " pool holds " +
                                       std::to_string(pool.size()) + " items, need " +
                                       std::to_string(options_.elicitation_items));
      }
      std::vector<std::string> chosen;
      std::sample(pool.begin(), pool.end(), std::back_inserter(chosen),
                  static_cast<std::ptrdiff_t>(options_.elicitation_items), rng);
      std::shuffle(chosen.begin(), chosen.end(), rng);
      const std::size_t attention = std::uniform_int_distribution<std::size_t>(0, chosen.size() - 1)(rng);
      for (std::size_t i = 0; i < chosen.size(); ++i) {
        items.push_back({{"item_id", chosen[i]},
                         {"modality", std::string(to_string(m))},
                         {"attention_check", i == attention}});
      }
    };
    sample(curated_music_, Modality::music);
    if (engine == Engine::visual) sample(curated_paintings_, Modality::painting);

    nlohmann::json event{{"type", "created"},       {"session_id", id}, {"engine", std::string(to_string(engine))},
                         {"seed", session_seed},    {"items", items},   {"at", options_.clock()}};
    auto slot = std::make_unique<Slot>();
    std::lock_guard slot_lock(slot->mutex);
    std::map<std::string, Session> one;
    apply_event(one, event);
    slot->session = std::move(one.begin()->second);
    Session snapshot = slot->session;
    {
      std::unique_lock lock(map_mutex_);
      log_->append(event);
      slots_.emplace(id, std::move(slot));
    }
    return snapshot;
  }

  Session get(const std::string& id) const {
    return with_session(id, [](Session& s) { return s; });
  }

  /// Elicitation items as shown to the client: no attention flags.
  nlohmann::json elicitation_view(const std::string& id) const {
    const Session s = get(id);
    nlohmann::json items = nlohmann::json::array();
    for (const auto& it : s.elicitation_items) items.push_back(item_view(it.item_id, it.modality));
    return {{"session_id", s.session_id}, {"items", items}};
  }

  nlohmann::json item_view(const std::string& id, Modality m) const {
    nlohmann::json j{{"item_id", id}, {"modality", std::string(to_string(m))}};
    if (const auto* r = catalog_.find(id)) {
      for (const char* key : {"title", "artist", "asset", "genre", "duration"}) {
        if (auto it = r->metadata.find(key); it != r->metadata.end()) j[key] = it->second;
      }
    }
    return j;
  }

  /// Every elicitation item must be rated exactly once, 1..5. Attention
  /// checks pass iff rated 1; a failure flags the session but never aborts it.
  Session submit_ratings(const std::string& id, const std::vector<std::pair<std::string, int>>& ratings) {
    return with_session(id, [&](Session& s) {
      if (s.state != SessionState::created) {
        fail(ErrorKind::conflict, "ratings already submitted for session '" + id + "'");
      }
      std::map<std::string, int> given;
      for (const auto& [item, rating] : ratings) {
        require(rating >= 1 && rating <= 5, ErrorKind::validation,
                "rating for '" + item + "' must be in 1..5, got " + std::to_string(rating));
        require(given.emplace(item, rating).second, ErrorKind::validation, "item '" + item + "' rated twice");
      }
      nlohmann::json stored = nlohmann::json::array();
      bool passed = true;
      std::vector<std::string> missing;
      for (const auto& it : s.elicitation_items) {
        auto g = given.find(it.item_id);
        if (g == given.end()) {
          missing.push_back(it.item_id);
          continue;
        }
        if (it.attention_check && g->second != 1) passed = false;
        stored.push_back({{"item_id", it.item_id}, {"rating", g->second}, {"attention_check", it.attention_check}});
        given.erase(g);
      }
      if (!missing.empty()) fail(ErrorKind::validation, "missing rating for '" + missing.front() + "'");
      if (!given.empty()) fail(ErrorKind::validation, "'" + given.begin()->first + "' is not an elicitation item");
      record(s, {{"type", "ratings"}, {"session_id", id}, {"ratings", stored}, {"attention_passed", passed}});
      return s;
    });
  }

  /// Ranks curated paintings for the session's engine. Once computed, the
  /// list is fixed for the session.
  RecommendationList get_recommendations(const std::string& id, std::optional<std::size_t> n = std::nullopt) {
    return with_session(id, [&](Session& s) {
      if (s.recommendations) return *s.recommendations;
      if (s.state != SessionState::elicited) {
        fail(ErrorKind::state, "session '" + id + "' has no ratings yet");
      }
      const std::size_t count = n.value_or(options_.default_recommendations);
      require(count >= 1, ErrorKind::validation, "n must be at least 1");
      const Modality rows = s.engine == Engine::visual ? Modality::painting : Modality::music;
      std::vector<PreferenceRating> ratings;
      RecommendOptions opts;
      opts.allowed = curated_painting_set_;
      for (const auto& r : s.ratings) {
        const auto* item = find_item(s, r.item_id);
        if (item->modality == Modality::painting) opts.exclude.insert(r.item_id);
        if (item->modality == rows) ratings.push_back(r);
      }
      const RecommendationList list = recommend(indices_.at(s.engine), ratings, count, opts);
      record(s, {{"type", "recommendations"}, {"session_id", id}, {"n", count}, {"list", to_json(list)}});
      return list;
    });
  }

  Session submit_mood(const std::string& id, const std::string& phase, const nlohmann::json& payload) {
    return with_session(id, [&](Session& s) {
      require(phase == "pre" || phase == "post", ErrorKind::validation, "mood phase must be 'pre' or 'post'");
      const MoodPayload mood = parse_mood(payload);
      if (phase == "pre") {
        if (s.state != SessionState::created || s.mood_pre) {
          fail(ErrorKind::state, "pre-study mood is accepted once, before elicitation");
        }
      } else if (s.state != SessionState::recommended || s.mood_post) {
        fail(ErrorKind::state, "post-study mood is accepted once, after recommendations");
      }
      record(s, {{"type", "mood"}, {"session_id", id}, {"phase", phase}, {"mood", to_json(mood)}});
      return s;
    });
  }

  /// payload: {painting_id: {"text": ..., "aspects": ...}} or an array of
  /// {"painting_id", "text", "aspects"}.
  Session submit_reflections(const std::string& id, const nlohmann::json& payload) {
    return with_session(id, [&](Session& s) {
      if (s.state != SessionState::recommended) {
        fail(ErrorKind::state, "reflections are accepted after recommendations and before feedback");
      }
      nlohmann::json entries = nlohmann::json::object();
      auto add = [&](const std::string& pid, const nlohmann::json& body) {
        require(body.is_object() && body.contains("text") && body["text"].is_string(), ErrorKind::validation,
                "reflection for '" + pid + "' needs a 'text' string");
        require(!body["text"].get<std::string>().empty(), ErrorKind::validation,
                "reflection for '" + pid + "' is empty");
        const auto ids = s.recommendations->ids();
        require(std::find(ids.begin(), ids.end(), pid) != ids.end(), ErrorKind::validation,
                "'" + pid + "' was not recommended in this session");
        std::string aspects;
        if (body.contains("aspects")) {
          require(body["aspects"].is_string(), ErrorKind::validation, "'aspects' must be a string");
          aspects = body["aspects"].get<std::string>();
        }
        entries[pid] = {{"text", body["text"]}, {"aspects", aspects}};
      };
      if (payload.is_array()) {
        for (const auto& e : payload) {
          require(e.is_object() && e.contains("painting_id") && e["painting_id"].is_string(),
                  ErrorKind::validation, "each reflection needs a 'painting_id'");
          add(e["painting_id"].get<std::string>(), e);
        }
      } else {
        require(payload.is_object(), ErrorKind::validation, "reflections must be an object or array");
        for (const auto& [pid, body] : payload.items()) add(pid, body);
      }
      require(!entries.empty(), ErrorKind::validation, "no reflections given");
      record(s, {{"type", "reflections"}, {"session_id", id}, {"reflections", entries}});
      return s;
    });
  }

  /// Six 1..5 quality scores. Requires the post-study mood; completes the session.
  Session submit_feedback(const std::string& id, const nlohmann::json& payload) {
    return with_session(id, [&](Session& s) {
      const QualityFeedback feedback = parse_feedback(payload);
      if (s.state != SessionState::recommended) {
        fail(ErrorKind::state, "feedback is accepted once, after recommendations");
      }
      if (!s.mood_post) fail(ErrorKind::state, "submit the post-study mood before feedback");
      record(s, {{"type", "feedback"}, {"session_id", id}, {"feedback", feedback}});
      return s;
    });
  }

  /// Every session's full state keyed by id.
  nlohmann::json export_sessions() const {
    std::shared_lock lock(map_mutex_);
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [id, slot] : slots_) {
      std::lock_guard g(slot->mutex);
      out[id] = to_json(slot->session);
    }
    return out;
  }

  EventLog& log() noexcept { return *log_; }

 private:
  struct Slot {
    mutable std::mutex mutex;
    Session session;
  };

  template <typename Fn>
  std::invoke_result_t<Fn, Session&> with_session(const std::string& id, Fn&& fn) const {
    Slot* slot = nullptr;
    {
      std::shared_lock lock(map_mutex_);
      auto it = slots_.find(id);
      if (it == slots_.end()) fail(ErrorKind::not_found, "no session '" + id + "'");
      slot = it->second.get();
    }
    std::lock_guard lock(slot->mutex);
    return fn(slot->session);
  }

  static const ElicitationItem* find_item(const Session& s, const std::string& id) {
    for (const auto& it : s.elicitation_items) {
      if (it.item_id == id) return &it;
    }
    fail(ErrorKind::integrity, "rated item '" + id + "' is not part of the session");
  }

  /// Applies the event to the in-memory session and appends it to the log.
  void record(Session& s, nlohmann::json event) const {
    event["at"] = options_.clock();
    std::map<std::string, Session> view;
    view.emplace(s.session_id, s);
    apply_event(view, event);
    log_->append(event);
    s = std::move(view.begin()->second);
  }

  Catalog catalog_;
  std::map<Engine, SimilarityIndex> indices_;
  std::shared_ptr<EventLog> log_;
  ServiceOptions options_;
  std::vector<std::string> curated_music_;
  std::vector<std::string> curated_paintings_;
  std::unordered_set<std::string> curated_painting_set_;

  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
  std::mutex id_mutex_;
  std::mt19937_64 id_rng_;
};

}  // namespace affectrec::service
