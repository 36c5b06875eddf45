#include <atomic>
#include <random>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"

#include "affnego/server.hpp"
#include "cli.hpp"
#include "session_fixture.hpp"

using namespace affnego;
using cli::ScratchDir;

namespace {

struct Frame {
  std::uint64_t id = 0;
  std::string event;
  Json data;
};

std::vector<Frame> parse_sse(const std::string& text) {
  std::vector<Frame> out;
  std::size_t pos = 0;
  while (true) {
    const auto end = text.find("\n\n", pos);
    if (end == std::string::npos) break;
    std::istringstream block(text.substr(pos, end - pos));
    Frame f;
    std::string line;
    while (std::getline(block, line)) {
      if (line.rfind("id: ", 0) == 0) f.id = std::stoull(line.substr(4));
      else if (line.rfind("event: ", 0) == 0) f.event = line.substr(7);
      else if (line.rfind("data: ", 0) == 0) f.data = Json::parse(line.substr(6));
    }
    out.push_back(f);
    pos = end + 2;
  }
  return out;
}

struct Service {
  ScratchDir dir;
  SessionManager manager;
  SessionServer server;
  int port;

  explicit Service(const std::string& name)
      : dir(name), manager(fixture::config(dir.path), fixture::policies()), server(manager) {
    port = server.start("127.0.0.1", 0);
    REQUIRE(port > 0);
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(20, 0);
    return c;
  }

  std::string create(const std::string& personality = "baseline", std::uint64_t seed = 1) {
    const Json body = {{"personality", personality}, {"policy_id", "p1"}, {"seed", seed}};
    auto res = client().Post("/api/sessions", body.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 201);
    return Json::parse(res->body)["id"];
  }

  int post(const std::string& path, const std::string& body, Json* out = nullptr) {
    auto res = client().Post(path, body, "application/json");
    if (!res) return -1;
    if (out) *out = Json::parse(res->body);
    return res->status;
  }

  std::string stream(const std::string& path) {
    std::string buf;
    auto c = client();
    auto res = c.Get(path, [&](const char* data, std::size_t len) {
      buf.append(data, len);
      return true;
    });
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type").find("text/event-stream") != std::string::npos);
    return buf;
  }

  Json log(const std::string& id) {
    auto res = client().Get("/api/sessions/" + id + "/log");
    REQUIRE(res);
    return Json::parse(res->body);
  }
};

void play(Service& s, const std::string& id) {
  const std::string base = "/api/sessions/" + id;
  REQUIRE(s.post(base + "/decision", R"({"action":"reject"})") == 200);
  const Json frames = {{"frames", Json::array({{{"arousal", 0.4}, {"valence", -0.3}},
                                               {{"arousal", 0.5}, {"valence", -0.2}},
                                               {{"arousal", 0.3}, {"valence", 0.1}},
                                               {{"arousal", 0.2}, {"valence", 0.0}}})}};
  Json out;
  REQUIRE(s.post(base + "/affect", frames.dump(), &out) == 200);
  CHECK(out["accepted"] == 4);
  REQUIRE(s.post(base + "/decision", R"({"action":"reject"})") == 200);
  REQUIRE(s.post(base + "/next", "") == 200);
  REQUIRE(s.post(base + "/decision", R"({"action":"accept"})") == 200);
}

void check_matches_log(const std::vector<Frame>& frames, const Json& log) {
  REQUIRE(frames.size() == log.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(frames[i].id == log[i]["seq"]);
    CHECK(frames[i].event == log[i]["type"]);
    CHECK(frames[i].data == log[i]);
  }
}

}  // namespace

TEST_CASE("session lifecycle over HTTP") {
  Service s("affnego_server_lifecycle");
  auto c = s.client();

  auto pol = c.Get("/api/policies");
  REQUIRE(pol);
  CHECK(Json::parse(pol->body)["policies"] == Json::array({"p1", "p2"}));

  const Json body = {{"personality", "patient-high"}, {"policy_id", "p1"}, {"seed", 12}};
  auto created = c.Post("/api/sessions", body.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto v = Json::parse(created->body);
  CHECK(v["first_offer"]["human"].get<double>() <= 20.0);
  CHECK(v["first_offer"]["human"].get<double>() >= 5.0);

  // same seed, same opening
  auto again = c.Post("/api/sessions", body.dump(), "application/json");
  REQUIRE(again);
  CHECK(Json::parse(again->body)["first_offer"] == v["first_offer"]);

  const std::string id = v["id"];
  auto view = c.Get("/api/sessions/" + id);
  REQUIRE(view);
  CHECK(view->status == 200);
  CHECK(Json::parse(view->body)["phase"] == "awaiting_decision");
}

TEST_CASE("error statuses") {
  Service s("affnego_server_errors");
  const std::string id = s.create();
  const std::string base = "/api/sessions/" + id;
  Json err;
  CHECK(s.post("/api/sessions", R"({"policy_id":"missing"})", &err) == 404);
  CHECK(err["status"] == 404);
  CHECK(s.post("/api/sessions", R"({"personality":"baseline"})") == 422);
  CHECK(s.post("/api/sessions", R"({"policy_id":"p1","personality":"grumpy"})") == 422);
  CHECK(s.post("/api/sessions", R"({"policy_id":"p1","seed":"x"})") == 422);
  CHECK(s.post("/api/sessions", "{not json") == 422);
  CHECK(s.post("/api/sessions", "[1,2]") == 422);
  CHECK(s.post("/api/sessions/00000000deadbeef/decision", R"({"action":"accept"})") == 404);
  CHECK(s.client().Get("/api/sessions/00000000deadbeef")->status == 404);
  CHECK(s.client().Get("/api/sessions/00000000deadbeef/stream")->status == 404);

  CHECK(s.post(base + "/decision", R"({"action":"shrug"})") == 422);
  CHECK(s.post(base + "/decision", "{}") == 422);
  CHECK(s.post(base + "/affect", R"({"frames":[]})") == 409);  // not listening
  CHECK(s.post(base + "/next", "") == 409);
  REQUIRE(s.post(base + "/decision", R"({"action":"reject"})") == 200);
  CHECK(s.post(base + "/decision", R"({"action":"reject"})") == 409);
  CHECK(s.post(base + "/affect", R"({"frames":[{"arousal":2,"valence":0}]})") == 422);
  CHECK(s.post(base + "/affect", R"({"frames":[{"arousal":0.1}]})") == 422);
  CHECK(s.post(base + "/affect", R"({"frames":{"arousal":0.1,"valence":0}})") == 422);
  CHECK(s.client().Get(base + "/stream?since=abc")->status == 422);
}

TEST_CASE("empty listening window through next") {
  Service s("affnego_server_next");
  const std::string base = "/api/sessions/" + s.create();
  REQUIRE(s.post(base + "/decision", R"({"action":"reject"})") == 200);
  Json v;
  REQUIRE(s.post(base + "/next", "", &v) == 200);
  CHECK(v["phase"] == "awaiting_decision");
  CHECK(v["round"] == 1);
  CHECK(v["offer"] != Json(nullptr));
}

TEST_CASE("twenty rejections abort over HTTP") {
  Service s("affnego_server_abort");
  const std::string base = "/api/sessions/" + s.create("impatient-low", 3);
  Json v;
  for (int i = 0; i < 20; ++i) {
    REQUIRE(s.post(base + "/decision", R"({"action":"reject"})", &v) == 200);
    if (i < 19) REQUIRE(s.post(base + "/next", "") == 200);
  }
  CHECK(v["status"] == "aborted");
  CHECK(v["phase"] == "terminal");
  CHECK(s.post(base + "/decision", R"({"action":"accept"})") == 409);
}

TEST_CASE("event streams replay the log to concurrent subscribers") {
  Service s("affnego_server_sse");
  const std::string id = s.create("excitatory", 8);
  std::string a, b;
  std::thread ta([&] { a = s.stream("/api/sessions/" + id + "/stream?since=0"); });
  std::thread tb([&] { b = s.stream("/api/sessions/" + id + "/stream?since=0"); });
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  play(s, id);
  ta.join();
  tb.join();

  const Json log = s.log(id);
  CHECK(log.back()["type"] == "terminal");
  check_matches_log(parse_sse(a), log);
  check_matches_log(parse_sse(b), log);
  CHECK(a == b);
  // frames follow the wire format exactly
  CHECK(a.rfind("id: 1\nevent: offer\ndata: {", 0) == 0);
}

TEST_CASE("late subscribers") {
  Service s("affnego_server_late");
  const std::string id = s.create("inhibitory", 9);
  play(s, id);
  const Json log = s.log(id);

  const auto only_terminal = parse_sse(s.stream("/api/sessions/" + id + "/stream"));
  REQUIRE(only_terminal.size() == 1);
  CHECK(only_terminal[0].event == "terminal");
  CHECK(only_terminal[0].data == log.back());

  check_matches_log(parse_sse(s.stream("/api/sessions/" + id + "/stream?since=0")), log);

  const auto tail = parse_sse(s.stream("/api/sessions/" + id + "/stream?since=3"));
  REQUIRE(tail.size() == log.size() - 3);
  CHECK(tail.front().id == 4);

  httplib::Headers h{{"Last-Event-ID", "5"}};
  std::string buf;
  auto c = s.client();
  auto res = c.Get("/api/sessions/" + id + "/stream", h, [&](const char* d, std::size_t n) {
    buf.append(d, n);
    return true;
  });
  REQUIRE(res);
  CHECK(parse_sse(buf).front().id == 6);
}

TEST_CASE("random requests never break the service") {
  Service s("affnego_server_fuzz");
  std::vector<std::string> ids{s.create("baseline", 1), s.create("patient", 2)};
  std::mt19937_64 rng(2024);
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  const std::vector<std::string> suffixes{"", "/decision", "/affect", "/next", "/log", "/bogus"};
  const std::vector<std::string> bodies{
      "", "{}", "null", "[]", "{\"action\":\"accept\"}", "{\"action\":\"reject\"}", "{\"action\":7}",
      "{\"frames\":[{\"arousal\":0.1,\"valence\":0.2}]}", "{\"frames\":[{\"arousal\":9,\"valence\":0}]}",
      "{\"frames\":[1,2]}", "{\"policy_id\":\"p2\",\"personality\":\"excitatory\",\"seed\":5}", "\xff\xfe", "{\"a\":"};
  std::map<int, int> seen;
  for (int i = 0; i < 400; ++i) {
    const bool unknown = std::uniform_int_distribution<int>(0, 9)(rng) == 0;
    const std::string id = unknown ? "feedfacefeedface" : pick(ids);
    const bool root = std::uniform_int_distribution<int>(0, 7)(rng) == 0;
    const std::string path = root ? "/api/sessions" : "/api/sessions/" + id + pick(suffixes);
    auto c = s.client();
    httplib::Result res = std::uniform_int_distribution<int>(0, 2)(rng) == 0
                              ? c.Get(path)
                              : c.Post(path, pick(bodies), "application/json");
    REQUIRE(res);
    ++seen[res->status];
    CHECK_MESSAGE(res->status != 500, path, " -> ", res->body);
    if (res->status == 201) ids.push_back(Json::parse(res->body)["id"]);
  }
  for (const auto& [status, n] : seen) {
    CHECK((status == 200 || status == 201 || status == 404 || status == 409 || status == 422));
  }
  CHECK(seen.count(200) == 1);
  CHECK(seen.count(422) == 1);
  // still serving afterwards
  CHECK(s.client().Get("/api/policies")->status == 200);
}
