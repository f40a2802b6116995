// Copyright 2026 The Qrec Authors
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

#include "qrec/service.hpp"

#include <httplib.h>

namespace qrec {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(std::shared_ptr<SessionService> service)
    : impl_(std::make_unique<Impl>()), service_(std::move(service)) {
  if (!service_) throw Error(ErrorCode::invalid_argument, "http server needs a service");
  auto& server = impl_->server;
  server.set_default_headers({
      {"Access-Control-Allow-Origin", service_->config().cors_origin},
      {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
      {"Access-Control-Allow-Headers", "Content-Type"},
  });
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    ServiceRequest request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.query.emplace(key, value);
    auto response = service_->handle(request);
    res.status = response.status;
    if (!response.body.empty()) res.set_content(response.body, "application/json");
  };
  // SO_REUSEADDR only.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Options(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start(const std::string& host, int port) {
  if (thread_.joinable()) throw Error(ErrorCode::state, "server already started");
  auto& server = impl_->server;
  if (port == 0) {
    port_ = server.bind_to_any_port(host);
    if (port_ <= 0) throw Error(ErrorCode::io, "cannot bind " + host + " to a free port");
  } else {
    if (!server.bind_to_port(host, port)) {
      throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

void HttpServer::wait() {
  if (thread_.joinable()) thread_.join();
}

}  // namespace qrec
