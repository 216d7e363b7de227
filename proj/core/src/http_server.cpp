// Copyright 2026 The linkqd Authors.
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

#include "linkqd/http_server.hpp"

#include <charconv>
#include <string_view>

#include <httplib.h>

#include "linkqd/buildsheet.hpp"

namespace linkqd {

using json = nlohmann::json;

struct HttpServer::Impl {
  const RepertoireService& service;
  httplib::Server server;

  explicit Impl(const RepertoireService& s) : service(s) {}
};

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::size_t parse_size(std::string_view text, const char* what) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ServiceError(400, "invalid_request",
                       std::string(what) + " must be an unsigned integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::size_t query_size(const httplib::Request& req, const char* key, std::size_t fallback) {
  return req.has_param(key) ? parse_size(req.get_param_value(key), key) : fallback;
}

std::array<std::size_t, 2> query_dims(const httplib::Request& req) {
  if (!req.has_param("dims")) return {0, 1};
  const std::string text = req.get_param_value("dims");
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw ServiceError(400, "invalid_request", "dims must look like 'i,j'");
  }
  return {parse_size(std::string_view(text).substr(0, comma), "dims"),
          parse_size(std::string_view(text).substr(comma + 1), "dims")};
}

/// Runs `body`, turning exceptions into structured error responses.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    reply(res, 200, body());
  } catch (const ServiceError& e) {
    reply(res, e.status(), e.to_json());
  } catch (const std::exception& e) {
    reply(res, 500, {{"code", "internal"}, {"message", e.what()}});
  }
}

}  // namespace

HttpServer::HttpServer(const RepertoireService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  const RepertoireService& svc = impl_->service;

  srv.Get("/api/repertoires", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return svc.list_repertoires(); });
  });

  srv.Get(R"(/api/repertoires/([^/]+)/grid)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const std::size_t rows = query_size(req, "rows", 5);
              const std::size_t cols = query_size(req, "cols", 5);
              return svc.get_grid(req.matches[1].str(), rows, cols, query_dims(req));
            });
          });

  srv.Get(R"(/api/repertoires/([^/]+)/cells/([^/]+)/buildsheet)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              double pitch = kDefaultPitch;
              if (req.has_param("pitch")) {
                const std::string text = req.get_param_value("pitch");
                const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), pitch);
                if (ec != std::errc{} || end != text.data() + text.size()) {
                  throw ServiceError(400, "invalid_request", "pitch must be a number");
                }
              }
              return svc.build_sheet(req.matches[1].str(), parse_size(req.matches[2].str(), "cell"),
                                     pitch);
            });
          });

  srv.Get(R"(/api/repertoires/([^/]+)/cells/([^/]+))",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              return svc.get_cell(req.matches[1].str(), parse_size(req.matches[2].str(), "cell"));
            });
          });

  srv.Post("/api/simulate", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded()) throw ServiceError(400, "invalid_json", "request body is not valid JSON");
      return svc.simulate(body);
    });
  });

  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 404 ? "not_found" : "http_error";
    res.set_content(json{{"code", code}, {"message", "no route for " + req.method + " " + req.path}}.dump(),
                    "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace linkqd
