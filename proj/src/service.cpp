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

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <vector>

namespace qrec {

using nlohmann::json;

namespace {

ServiceResponse reply(int status, const json& body) { return {status, body.dump()}; }

ServiceResponse error_reply(int status, std::string_view error, const std::string& detail) {
  return reply(status, json{{"error", error}, {"detail", detail}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::optional<json> parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  return parsed;
}

}  // namespace

struct SessionService::Resource {
  Resource(std::shared_ptr<const SessionContext> context, std::optional<std::size_t> user,
           SessionOptions options)
      : session(std::move(context), user, std::move(options)) {}

  std::mutex mutex;
  std::string id;
  std::string mode;
  std::optional<std::string> user_id;
  std::optional<std::uint32_t> target;
  Session session;
  std::optional<Question> question;
  bool done = false;
  std::optional<json> summary;
  std::chrono::steady_clock::time_point last_active;
};

SessionService::SessionService(std::shared_ptr<const Dataset> dataset,
                               std::shared_ptr<const SessionContext> context,
                               ServiceConfig config, Clock clock)
    : dataset_(std::move(dataset)),
      context_(std::move(context)),
      config_(std::move(config)),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); })) {
  if (!dataset_ || !context_) {
    throw Error(ErrorCode::invalid_argument, "service needs a dataset and a session context");
  }
  if (config_.nq_cap == 0 || config_.grid_size == 0) {
    throw Error(ErrorCode::invalid_argument, "service N_q cap and grid size must be positive");
  }
  config_.hp.validate();
  id_rng_.seed(config_.seed != 0 ? config_.seed : std::random_device{}());
}

std::string SessionService::new_id() {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(id_rng_()),
                static_cast<unsigned long long>(id_rng_()));
  return buf;
}

std::shared_ptr<SessionService::Resource> SessionService::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  auto now = clock_();
  if (now - it->second->last_active > config_.ttl) {
    sessions_.erase(it);
    return nullptr;
  }
  it->second->last_active = now;
  return it->second;
}

std::size_t SessionService::evict_expired() {
  std::lock_guard lock(mutex_);
  auto now = clock_();
  std::size_t evicted = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now - it->second->last_active > config_.ttl) {
      it = sessions_.erase(it);
      ++evicted;
    } else {
      ++it;
    }
  }
  return evicted;
}

std::size_t SessionService::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

namespace {

json grid_json(const Session& session, const ItemCorpus& corpus, std::size_t k) {
  json items = json::array();
  for (const auto& rec : session.recommendations(k)) {
    const auto& item = corpus.item(rec.item);
    items.push_back(
        {{"rank", rec.rank}, {"item_id", item.item_id}, {"title", item.title}, {"score", rec.score}});
  }
  return items;
}

json question_json(const std::optional<Question>& question, const ItemCorpus& corpus,
                   std::size_t number) {
  if (!question) return nullptr;
  return {{"entity", corpus.entity(question->entity)}, {"text", question->text}, {"number", number}};
}

}  // namespace

ServiceResponse SessionService::create_session(const std::string& body) {
  auto request = parse_body(body);
  if (!request) return error_reply(400, "bad_request", "request body must be a JSON object");
  const auto& corpus = context_->corpus();

  std::string mode = "interactive";
  if (request->contains("mode")) {
    if (!(*request)["mode"].is_string()) return error_reply(400, "bad_request", "mode must be a string");
    mode = (*request)["mode"].get<std::string>();
  }
  if (mode != "interactive" && mode != "study") {
    return error_reply(400, "bad_request", "mode must be 'interactive' or 'study'");
  }

  std::optional<std::size_t> user;
  std::optional<std::string> user_id;
  if (request->contains("user_id") && !(*request)["user_id"].is_null()) {
    if (!(*request)["user_id"].is_string()) return error_reply(400, "bad_request", "user_id must be a string");
    user_id = (*request)["user_id"].get<std::string>();
    user = dataset_->find_user(*user_id);
    if (!user) return error_reply(404, "not_found", "unknown user '" + *user_id + "'");
  }

  std::optional<std::uint32_t> target;
  if (request->contains("target_item") && !(*request)["target_item"].is_null()) {
    if (!(*request)["target_item"].is_string()) {
      return error_reply(400, "bad_request", "target_item must be a string");
    }
    auto id = (*request)["target_item"].get<std::string>();
    auto index = corpus.find_item(id);
    if (!index) return error_reply(404, "not_found", "unknown item '" + id + "'");
    target = static_cast<std::uint32_t>(*index);
  }
  if (mode == "study" && !target) {
    return error_reply(400, "bad_request", "study mode needs a target_item");
  }

  SessionOptions options;
  options.hp = config_.hp;
  if (request->contains("gamma")) {
    const auto& gamma = (*request)["gamma"];
    if (!gamma.is_number() || gamma.get<double>() < 0) {
      return error_reply(400, "bad_request", "gamma must be a non-negative number");
    }
    options.hp.gamma = gamma.get<double>();
  }

  evict_expired();
  std::shared_ptr<Resource> resource;
  {
    std::lock_guard lock(mutex_);
    options.seed = config_.seed + session_counter_++;
    resource = std::make_shared<Resource>(context_, user, options);
    resource->id = new_id();
    while (sessions_.contains(resource->id)) resource->id = new_id();
    resource->mode = mode;
    resource->user_id = user_id;
    resource->target = target;
    resource->last_active = clock_();
    sessions_.emplace(resource->id, resource);
  }

  std::lock_guard lock(resource->mutex);
  auto& session = resource->session;
  resource->question = session.next_question();
  resource->done = !resource->question;
  json out{{"session_id", resource->id},
           {"mode", mode},
           {"questions_asked", 0},
           {"done", resource->done},
           {"question", question_json(resource->question, corpus, 1)},
           {"candidates", session.candidates().size()},
           {"top_items", grid_json(session, corpus, config_.grid_size)}};
  if (user_id) out["user_id"] = *user_id;
  if (target) out["target_item"] = corpus.item(*target).item_id;
  return reply(201, out);
}

ServiceResponse SessionService::answer(const std::string& id, const std::string& body) {
  auto resource = find(id);
  if (!resource) return error_reply(404, "not_found", "unknown session '" + id + "'");
  auto request = parse_body(body);
  if (!request || !request->contains("answer") || !(*request)["answer"].is_string()) {
    return error_reply(400, "bad_request", "body must be {\"answer\": \"yes\" | \"no\" | \"not_sure\"}");
  }
  Answer value;
  try {
    value = parse_answer((*request)["answer"].get<std::string>());
  } catch (const Error& e) {
    return error_reply(400, "bad_request", e.what());
  }

  std::lock_guard lock(resource->mutex);
  auto& session = resource->session;
  const auto& corpus = context_->corpus();
  if (resource->summary) return error_reply(409, "conflict", "session is stopped");
  if (request->contains("questions_asked")) {
    const auto& expected = (*request)["questions_asked"];
    if (!expected.is_number_unsigned() || expected.get<std::size_t>() != session.questions_asked()) {
      return error_reply(409, "conflict",
                         "stale answer: " + std::to_string(session.questions_asked()) +
                             " questions already answered");
    }
  }
  if (resource->done || !resource->question) {
    return error_reply(409, "conflict", "no question is pending");
  }
  session.apply_answer(resource->question->entity, value);
  resource->question.reset();
  if (session.questions_asked() < config_.nq_cap) resource->question = session.next_question();
  resource->done = !resource->question;

  return reply(200, json{{"session_id", id},
                         {"questions_asked", session.questions_asked()},
                         {"done", resource->done},
                         {"question", question_json(resource->question, corpus,
                                                    session.questions_asked() + 1)},
                         {"candidates", session.candidates().size()},
                         {"contradiction", session.contradiction()},
                         {"top_items", grid_json(session, corpus, config_.grid_size)}});
}

ServiceResponse SessionService::recommendations(const std::string& id, const std::string& k) {
  auto resource = find(id);
  if (!resource) return error_reply(404, "not_found", "unknown session '" + id + "'");
  std::size_t count = config_.grid_size;
  if (!k.empty()) {
    auto [end, ec] = std::from_chars(k.data(), k.data() + k.size(), count);
    if (ec != std::errc() || end != k.data() + k.size() || count == 0) {
      return error_reply(400, "bad_request", "k must be a positive integer");
    }
  }
  std::lock_guard lock(resource->mutex);
  const auto& session = resource->session;
  return reply(200, json{{"session_id", id},
                         {"questions_asked", session.questions_asked()},
                         {"items", grid_json(session, context_->corpus(), count)}});
}

ServiceResponse SessionService::stop(const std::string& id) {
  auto resource = find(id);
  if (!resource) return error_reply(404, "not_found", "unknown session '" + id + "'");
  std::lock_guard lock(resource->mutex);
  if (!resource->summary) {
    auto& session = resource->session;
    const auto& corpus = context_->corpus();
    session.stop();
    resource->question.reset();
    resource->done = true;
    json summary{{"session_id", id},
                 {"mode", resource->mode},
                 {"stopped", true},
                 {"questions_asked", session.questions_asked()},
                 {"final_top_k", grid_json(session, corpus, config_.grid_size)}};
    if (resource->target) {
      summary["target_item"] = corpus.item(*resource->target).item_id;
      summary["target_rank"] = session.rank_of(*resource->target);
    }
    resource->summary = std::move(summary);
  }
  return reply(200, *resource->summary);
}

ServiceResponse SessionService::item(const std::string& item_id) {
  const auto& corpus = context_->corpus();
  auto index = corpus.find_item(item_id);
  if (!index) return error_reply(404, "not_found", "unknown item '" + item_id + "'");
  const auto& record = corpus.item(*index);
  json entities = json::array();
  for (auto e : corpus.entities_of(*index)) entities.push_back(corpus.entity(e));
  return reply(200, json{{"item_id", record.item_id},
                         {"index", *index},
                         {"title", record.title},
                         {"document", record.document},
                         {"entities", entities}});
}

ServiceResponse SessionService::health() {
  const auto& corpus = context_->corpus();
  return reply(200, json{{"status", "ok"},
                         {"users", dataset_->num_users()},
                         {"items", corpus.num_items()},
                         {"entities", corpus.num_entities()},
                         {"sessions", session_count()}});
}

ServiceResponse SessionService::handle(const ServiceRequest& request) {
  if (request.method == "OPTIONS") return {204, ""};
  auto parts = split_path(request.path);
  auto method_not_allowed = [&] {
    return error_reply(405, "method_not_allowed", request.method + " " + request.path);
  };
  try {
    if (parts.size() < 2 || parts[0] != "api") {
      return error_reply(404, "not_found", "no route for " + request.path);
    }
    const auto& head = parts[1];
    if (head == "health" && parts.size() == 2) {
      return request.method == "GET" ? health() : method_not_allowed();
    }
    if (head == "items" && parts.size() == 3) {
      return request.method == "GET" ? item(parts[2]) : method_not_allowed();
    }
    if (head == "sessions") {
      if (parts.size() == 2) {
        return request.method == "POST" ? create_session(request.body) : method_not_allowed();
      }
      if (parts.size() == 4) {
        const auto& id = parts[2];
        const auto& action = parts[3];
        if (action == "answer") {
          return request.method == "POST" ? answer(id, request.body) : method_not_allowed();
        }
        if (action == "stop") {
          return request.method == "POST" ? stop(id) : method_not_allowed();
        }
        if (action == "recommendations") {
          if (request.method != "GET") return method_not_allowed();
          auto k = request.query.find("k");
          return recommendations(id, k == request.query.end() ? std::string() : k->second);
        }
      }
    }
    return error_reply(404, "not_found", "no route for " + request.path);
  } catch (const Error& e) {
    int status = e.code() == ErrorCode::not_found ? 404
                 : e.code() == ErrorCode::state || e.code() == ErrorCode::protocol ? 409
                 : e.code() == ErrorCode::invalid_argument ? 400
                                                             : 500;
    return error_reply(status, status == 500 ? "internal" : "error", e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "internal", e.what());
  }
}

}  // namespace qrec
