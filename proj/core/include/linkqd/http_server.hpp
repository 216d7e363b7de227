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

#pragma once

#include <memory>
#include <string>

#include "linkqd/service.hpp"

namespace linkqd {

/// JSON-over-HTTP front end for a RepertoireService.
///
///   GET  /api/repertoires
///   GET  /api/repertoires/{id}/grid?rows=&cols=&dims=i,j
///   GET  /api/repertoires/{id}/cells/{index}
///   GET  /api/repertoires/{id}/cells/{index}/buildsheet?pitch=
///   POST /api/simulate
///
/// Failures answer with {"code": ..., "message": ...} and a 4xx/5xx status.
class HttpServer {
 public:
  explicit HttpServer(const RepertoireService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the bound port,
  /// or -1 when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called. Requires a successful bind().
  bool listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace linkqd
