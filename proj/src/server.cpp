#include "affnego/server.hpp"

#include "httplib.h"

namespace affnego {
namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  // Error messages can echo bytes from the request, which need not be valid UTF-8.
  res.set_content(body.dump(-1, ' ', false, Json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  send_json(res, status, {{"error", msg}, {"status", status}});
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    Json j = Json::parse(req.body);
    if (!j.is_object()) throw ServiceError(422, "request body must be a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    throw ServiceError(422, std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T field(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ServiceError(422, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw ServiceError(422, std::string("field '") + key + "' has the wrong type");
  }
}

std::string sse_frame(const Event& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " + to_json(e).dump() + "\n\n";
}

}  // namespace

struct SessionServer::Impl {
  SessionManager& manager;
  httplib::Server http;
  std::thread thread;
  std::atomic<bool> stopping{false};

  explicit Impl(SessionManager& m) : manager(m) { routes(); }

  template <class F>
  auto guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const ServiceError& e) {
        send_error(res, e.status, e.what());
      } catch (const DomainError& e) {
        send_error(res, 422, e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  }

  void routes() {
    http.new_task_queue = [] { return new httplib::ThreadPool(16); };

    http.Get("/api/policies", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"policies", manager.policy_ids()}});
    }));

    http.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Json body = parse_body(req);
      const auto personality = body.contains("personality") ? field<std::string>(body, "personality") : "baseline";
      const auto policy_id = field<std::string>(body, "policy_id");
      const auto seed = body.contains("seed") ? field<std::uint64_t>(body, "seed") : std::uint64_t{0};
      send_json(res, 201, manager.create(personality, policy_id, seed));
    }));

    http.Get(R"(/api/sessions/([0-9a-f]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, manager.get(req.matches[1])->view());
    }));

    http.Post(R"(/api/sessions/([0-9a-f]+)/decision)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = manager.get(req.matches[1]);
                const Json body = parse_body(req);
                send_json(res, 200, s->decide(field<std::string>(body, "action")));
              }));

    http.Post(R"(/api/sessions/([0-9a-f]+)/affect)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = manager.get(req.matches[1]);
                const Json body = parse_body(req);
                const auto frames_json = field<Json>(body, "frames");
                if (!frames_json.is_array()) throw ServiceError(422, "'frames' must be an array");
                std::vector<std::array<double, 2>> frames;
                for (const auto& f : frames_json) {
                  if (!f.is_object()) throw ServiceError(422, "each frame must be an object");
                  frames.push_back({field<double>(f, "arousal"), field<double>(f, "valence")});
                }
                const auto accepted = s->affect(frames);
                send_json(res, 200, {{"accepted", accepted}, {"session", s->view()}});
              }));

    http.Post(R"(/api/sessions/([0-9a-f]+)/next)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, manager.get(req.matches[1])->next());
    }));

    http.Get(R"(/api/sessions/([0-9a-f]+)/log)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      Json out = Json::array();
      for (const auto& e : manager.get(req.matches[1])->events()) out.push_back(to_json(e));
      send_json(res, 200, out);
    }));

    http.Get(R"(/api/sessions/([0-9a-f]+)/stream)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = manager.get(req.matches[1]);
               std::optional<std::uint64_t> since;
               try {
                 if (req.has_param("since")) since = std::stoull(req.get_param_value("since"));
                 else if (req.has_header("Last-Event-ID")) since = std::stoull(req.get_header_value("Last-Event-ID"));
               } catch (const std::exception&) {
                 throw ServiceError(422, "invalid event cursor");
               }
               if (!since) {
                 // Joining a finished session without a cursor: only the terminal event.
                 const auto all = s->events();
                 since = s->terminal() && !all.empty() ? all.back().seq - 1 : 0;
               }
               res.set_header("Cache-Control", "no-cache");
               auto cursor = std::make_shared<std::uint64_t>(*since);
               res.set_chunked_content_provider(
                   "text/event-stream", [this, s, cursor](std::size_t, httplib::DataSink& sink) {
                     while (!stopping.load()) {
                       const auto batch = s->events_after(*cursor, std::chrono::milliseconds(200));
                       for (const auto& e : batch) {
                         const std::string frame = sse_frame(e);
                         if (!sink.write(frame.data(), frame.size())) return false;
                         *cursor = e.seq;
                         if (e.type == "terminal") {
                           sink.done();
                           return true;
                         }
                       }
                       if (!batch.empty()) return true;
                       if (!sink.is_writable()) return false;
                     }
                     sink.done();
                     return true;
                   });
             }));
  }
};

SessionServer::SessionServer(SessionManager& manager) : impl_(std::make_unique<Impl>(manager)) {}

SessionServer::~SessionServer() { stop(); }

int SessionServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool SessionServer::listen() { return impl_->http.listen_after_bind(); }

int SessionServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  if (bound < 0) return bound;
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

void SessionServer::stop() {
  if (!impl_) return;
  impl_->stopping = true;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace affnego
