#pragma once

// HTTP routes over SessionService.

#include <httplib.h>

#include <cstdlib>
#include <string>

#include "mmr/service.hpp"

namespace mmr {

namespace detail {

inline void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

// Raw CSV or JSON-record uploads are wrapped into the create-session body.
inline std::string session_body(const httplib::Request& req) {
  const std::string type = req.get_header_value("Content-Type");
  if (req.body.empty() || type.rfind("application/json", 0) == 0) return req.body;
  const std::string name = req.has_param("name") ? req.get_param_value("name") : "upload";
  const bool json = req.get_param_value("format") == "json";
  return Json{{"name", name}, {"format", json ? "json" : "csv"}, {"content", req.body}}.dump();
}

}  // namespace detail

inline void install_routes(httplib::Server& server, SessionService& service) {
  server.set_payload_max_length(kMaxUploadBytes + 1024);
  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    if (req.body.size() > kMaxUploadBytes) {
      detail::reply(res, error_response(413, "payload-too-large", "uploads are capped at 10 MB"));
      return;
    }
    detail::reply(res, service.create_session(detail::session_body(req)));
  });
  server.Get(R"(/sessions/([^/]+)/state)", [&](const httplib::Request& req, httplib::Response& res) {
    detail::reply(res, service.get_state(req.matches[1]));
  });
  server.Get(R"(/sessions/([^/]+)/actions)", [&](const httplib::Request& req, httplib::Response& res) {
    detail::reply(res, service.list_actions(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/actions)", [&](const httplib::Request& req, httplib::Response& res) {
    detail::reply(res, service.post_action(req.matches[1], req.body));
  });
  server.Get(R"(/sessions/([^/]+)/log)", [&](const httplib::Request& req, httplib::Response& res) {
    detail::reply(res, service.get_log(req.matches[1]));
  });
  server.Get(R"(/sessions/([^/]+)/artifacts/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> params;
    for (const auto& [k, v] : req.params) params[k] = v;
    detail::reply(res, service.get_artifact(req.matches[1], req.matches[2], params));
  });
  server.Post(R"(/sessions/([^/]+)/selection)", [&](const httplib::Request& req, httplib::Response& res) {
    detail::reply(res, service.post_selection(req.matches[1], req.body));
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 413) {
      detail::reply(res, error_response(413, "payload-too-large", "uploads are capped at 10 MB"));
    } else {
      detail::reply(res, error_response(res.status, "not-found", "no such route"));
    }
  });
}

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// MMR_HOST and MMR_PORT override the defaults.
inline BindAddress bind_address_from_env() {
  BindAddress b;
  if (const char* h = std::getenv("MMR_HOST"); h && *h) b.host = h;
  if (const char* p = std::getenv("MMR_PORT"); p && *p) b.port = std::atoi(p);
  return b;
}

}  // namespace mmr
