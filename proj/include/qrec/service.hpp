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

#pragma once

#include "qrec/dataset.hpp"
#include "qrec/session.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>

namespace qrec {

struct ServiceConfig {
  std::size_t nq_cap = 20;
  std::chrono::seconds ttl{30 * 60};
  std::size_t grid_size = 16;
  std::string cors_origin = "*";
  HyperParams hp;
  std::uint64_t seed = 0;  // 0: session ids from std::random_device
};

struct ServiceRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

// Session API behind the HTTP routes. Every route is a plain function of the
// request, so it can be exercised without sockets.
class SessionService {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  SessionService(std::shared_ptr<const Dataset> dataset,
                 std::shared_ptr<const SessionContext> context, ServiceConfig config,
                 Clock clock = {});

  ServiceResponse handle(const ServiceRequest& request);

  ServiceResponse create_session(const std::string& body);
  ServiceResponse answer(const std::string& id, const std::string& body);
  ServiceResponse recommendations(const std::string& id, const std::string& k);
  ServiceResponse stop(const std::string& id);
  ServiceResponse item(const std::string& item_id);
  ServiceResponse health();

  // Drops sessions idle for longer than the TTL; returns how many.
  std::size_t evict_expired();
  std::size_t session_count() const;
  const ServiceConfig& config() const { return config_; }

 private:
  struct Resource;

  std::shared_ptr<Resource> find(const std::string& id);
  std::string new_id();

  std::shared_ptr<const Dataset> dataset_;
  std::shared_ptr<const SessionContext> context_;
  ServiceConfig config_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Resource>> sessions_;
  std::mt19937_64 id_rng_;
  std::uint64_t session_counter_ = 0;
};

// cpp-httplib front end for a SessionService, served from a background
// thread.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<SessionService> service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free port) and starts serving. Throws io on bind
  // failure.
  void start(const std::string& host, int port);
  int port() const { return port_; }
  void stop();
  // Blocks until the server stops.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<SessionService> service_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace qrec
