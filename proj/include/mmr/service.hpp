#pragma once

// Session service behind the HTTP API. Transport-free: each call returns a
// status code and a JSON body, so it can be driven directly in tests.

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "mmr/artifacts.hpp"
#include "mmr/editor.hpp"
#include "mmr/reify.hpp"

namespace mmr {

inline constexpr std::size_t kMaxUploadBytes = 10 * 1024 * 1024;

struct Response {
  int status = 200;
  Json body;
};

inline Response error_response(int status, const std::string& code, const std::string& message, Json extra = nullptr) {
  Json body{{"error", code}, {"message", message}};
  if (!extra.is_null()) body["report"] = std::move(extra);
  return {status, body};
}

class SessionService {
 public:
  // Body: {"name", "format": "csv"|"json", "content"}, or empty for a
  // session with no dataset.
  Response create_session(const std::string& body) {
    if (body.size() > kMaxUploadBytes) return error_response(413, "payload-too-large", "uploads are capped at 10 MB");
    EditorState state;
    try {
      if (!body.empty()) {
        Json j = Json::parse(body);
        if (!j.is_object()) return error_response(400, "malformed-payload", "expected a JSON object");
        Json action = j;
        action["type"] = "load_dataset";
        state = apply_edit(state, action_from_json(action));
      }
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "malformed-payload", e.what());
    } catch (const InvalidAction& e) {
      return error_response(400, "malformed-payload", e.what(), to_json(e.report()));
    } catch (const Error& e) {
      return error_response(400, e.code(), e.what());
    }
    auto session = std::make_shared<Session>();
    session->id = "s" + std::to_string(++counter_);
    session->created_at = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();
    session->snapshot = std::make_shared<const Snapshot>(Snapshot{std::move(state), 1});
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_[session->id] = session;
    }
    auto snap = session->snapshot;
    return {201, Json{{"session_id", session->id},
                      {"created_at", session->created_at},
                      {"version", snap->version},
                      {"state", to_json(snap->state)}}};
  }

  Response get_state(const std::string& id) const {
    auto snap = snapshot(id);
    if (!snap) return not_found(id);
    return {200, Json{{"session_id", id}, {"version", snap->version}, {"state", to_json(snap->state)}}};
  }

  Response list_actions(const std::string& id) const {
    auto snap = snapshot(id);
    if (!snap) return not_found(id);
    Json actions = Json::array();
    for (const auto& a : available_actions(snap->state)) actions.push_back(to_json(a, false));
    return {200, Json{{"version", snap->version}, {"actions", actions}}};
  }

  Response post_action(const std::string& id, const std::string& body) {
    if (body.size() > kMaxUploadBytes) return error_response(413, "payload-too-large", "uploads are capped at 10 MB");
    auto session = find(id);
    if (!session) return not_found(id);
    EditAction action;
    try {
      action = action_from_json(Json::parse(body));
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "malformed-payload", e.what());
    } catch (const Error& e) {
      return error_response(400, e.code(), e.what());
    }
    std::lock_guard edit_lock(session->edit_mutex);  // one edit at a time per session
    auto current = load(*session);
    try {
      auto next = std::make_shared<const Snapshot>(Snapshot{apply_edit(current->state, action), current->version + 1});
      store(*session, next);
      session->log.push_back(action);
      return {200, Json{{"version", next->version}, {"state", to_json(next->state)}}};
    } catch (const InvalidAction& e) {
      Json body = error_response(409, "invalid-action", e.what(), to_json(e.report())).body;
      body["version"] = current->version;
      return {409, body};
    }
  }

  // kind: visual | text | audio. Audio accepts rate and ticks parameters.
  Response get_artifact(const std::string& id, const std::string& kind, const std::map<std::string, std::string>& params = {}) const {
    auto snap = snapshot(id);
    if (!snap) return not_found(id);
    if (kind != "visual" && kind != "text" && kind != "audio") {
      return error_response(404, "unknown-artifact", "no artifact '" + kind + "'");
    }
    if (!snap->state.has_rows()) return error_response(404, "no-dataset", "the session has no dataset");
    try {
      ArtifactOptions options;
      if (auto it = params.find("rate"); it != params.end()) options.audio.rate = std::stod(it->second);
      if (auto it = params.find("ticks"); it != params.end()) options.audio.ticks = it->second != "off" && it->second != "false";
      if (auto it = params.find("order"); it != params.end()) options.order = it->second;
      if (auto it = params.find("filter"); it != params.end()) options.audio.filter = predicate_from_json(Json::parse(it->second));
      const auto art = compile_artifacts(snap->state.spec, *snap->state.dataset, options);
      Json payload;
      if (kind == "visual") {
        if (!art.visual) return error_response(404, "no-visual-units", "the spec has no visual units");
        payload = *art.visual;
      } else if (kind == "text") {
        payload = Json{{"tree", art.text_json()}, {"plain", art.text_plain()}};
      } else {
        payload = art.audio_json();
      }
      return {200, Json{{"version", snap->version}, {"artifact", payload}}};
    } catch (const std::logic_error&) {
      return error_response(400, "malformed-payload", "rate must be a number");
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "malformed-payload", e.what());
    } catch (const Error& e) {
      return error_response(400, e.code(), e.what());
    }
  }

  // Body: a sync message. A version other than the current one is stale.
  Response post_selection(const std::string& id, const std::string& body) const {
    auto snap = snapshot(id);
    if (!snap) return not_found(id);
    SyncMessage message;
    try {
      message = sync_message_from_json(Json::parse(body));
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "malformed-payload", e.what());
    } catch (const Error& e) {
      return error_response(400, e.code(), e.what());
    }
    if (message.version && *message.version != snap->version) {
      Json body = error_response(409, "stale-version", "selection was made against version " +
                                                           std::to_string(*message.version))
                      .body;
      body["version"] = snap->version;
      return {409, body};
    }
    if (!snap->state.has_rows()) return error_response(409, "no-dataset", "the session has no dataset");
    try {
      const Dataset data = typed_for(snap->state.spec, *snap->state.dataset);
      const auto ctx = ViewerContext::make(snap->state.spec, data);
      Json effects = Json::object();
      for (const auto& [kind, effect] : reify_all(ctx, message)) effects[std::string(to_string(kind))] = to_json(effect);
      return {200, Json{{"version", snap->version}, {"source", to_string(message.source)}, {"effects", effects}}};
    } catch (const Error& e) {
      return error_response(400, e.code(), e.what());
    }
  }

  Response get_log(const std::string& id) const {
    auto session = find(id);
    if (!session) return not_found(id);
    std::lock_guard edit_lock(session->edit_mutex);
    Json actions = Json::array();
    for (const auto& a : session->log) actions.push_back(to_json(a));
    return {200, Json{{"version", load(*session)->version}, {"actions", actions}}};
  }

 private:
  struct Snapshot {
    EditorState state;
    std::uint64_t version = 0;
  };

  struct Session {
    std::string id;
    long long created_at = 0;
    mutable std::mutex edit_mutex;
    mutable std::mutex snapshot_mutex;
    std::shared_ptr<const Snapshot> snapshot;
    std::vector<EditAction> log;
  };

  static std::shared_ptr<const Snapshot> load(const Session& s) {
    std::lock_guard lock(s.snapshot_mutex);
    return s.snapshot;
  }

  static void store(Session& s, std::shared_ptr<const Snapshot> next) {
    std::lock_guard lock(s.snapshot_mutex);
    s.snapshot = std::move(next);
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::shared_ptr<const Snapshot> snapshot(const std::string& id) const {
    auto s = find(id);
    return s ? load(*s) : nullptr;
  }

  static Response not_found(const std::string& id) {
    return error_response(404, "unknown-session", "no session '" + id + "'");
  }

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace mmr
