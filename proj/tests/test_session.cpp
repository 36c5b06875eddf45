#include <thread>

#include "doctest.h"

#include "affnego/experiment.hpp"
#include "affnego/session.hpp"
#include "cli.hpp"
#include "session_fixture.hpp"

using namespace affnego;
using cli::ScratchDir;

namespace {

int status_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.status;
  }
  return 0;
}

}  // namespace

TEST_CASE("creating a session") {
  ScratchDir d("affnego_session_create");
  SessionManager m(fixture::config(d.path), fixture::policies());
  const auto v = m.create("patient-high", "p1", 7);
  CHECK(v["phase"] == "awaiting_decision");
  CHECK(v["status"] == "active");
  CHECK(v["round"] == 0);
  CHECK(v["personality"] == "patient-high");
  const double h = v["first_offer"]["human"];
  CHECK(h >= 5.0);
  CHECK(h <= 20.0);
  CHECK(v["first_offer"]["robot"].get<double>() == 100.0 - h);
  CHECK(v["mood"]["neutral"] == true);
  CHECK(m.policy_ids() == std::vector<std::string>{"p1", "p2"});

  CHECK(status_of([&] { m.create("baseline", "nope", 1); }) == 404);
  CHECK(status_of([&] { m.create("grumpy", "p1", 1); }) == 422);
  CHECK(status_of([&] { m.get("0123456789abcdef"); }) == 404);
}

TEST_CASE("the seed fixes the opening offer") {
  ScratchDir d("affnego_session_seed");
  const Config cfg = fixture::config(d.path);
  SessionManager m(cfg, fixture::policies());
  const auto a = m.create("baseline", "p1", 99);
  const auto b = m.create("baseline", "p2", 99);
  const auto c = m.create("baseline", "p1", 100);
  CHECK(a["id"] != b["id"]);
  CHECK(a["first_offer"] == b["first_offer"]);
  CHECK(a["first_offer"] != c["first_offer"]);

  // and matches a simulated episode on the same seed
  auto respondent = ScriptedRespondent::always(Decision::Accept);
  PolicyModel pol = *fixture::policy();
  AffectivePipeline p(nullptr, Decoder::identity(), nullptr, nullptr);
  const auto ep = run_episode(pol, respondent, p, cfg.game, 99);
  CHECK(ep.first_offer.human_points() == a["first_offer"]["human"].get<double>());
}

TEST_CASE("accept ends the session") {
  ScratchDir d("affnego_session_accept");
  SessionManager m(fixture::config(d.path), fixture::policies());
  auto s = m.get(m.create("baseline", "p1", 1)["id"]);
  const auto v = s->decide("accept");
  CHECK(v["phase"] == "terminal");
  CHECK(v["status"] == "accepted");
  CHECK(s->terminal());
  CHECK(s->events().back().type == "terminal");
  CHECK(status_of([&] { s->decide("accept"); }) == 409);
  CHECK(status_of([&] { s->affect({{0.1, 0.1}}); }) == 409);
  CHECK(status_of([&] { s->next(); }) == 409);
}

TEST_CASE("reject opens a listening window that affect frames fill") {
  ScratchDir d("affnego_session_listen");
  SessionManager m(fixture::config(d.path), fixture::policies());
  auto s = m.get(m.create("excitatory", "p1", 2)["id"]);
  CHECK(status_of([&] { s->decide("maybe"); }) == 422);
  CHECK(status_of([&] { s->affect({{0.1, 0.1}}); }) == 409);

  CHECK(s->decide("reject")["phase"] == "listening");
  CHECK(status_of([&] { s->decide("reject"); }) == 409);
  // one bad frame rejects the whole batch
  CHECK(status_of([&] { s->affect({{0.1, 0.1}, {1.5, 0.0}}); }) == 422);
  CHECK(s->view()["listen"]["ticks"] == 0);

  CHECK(s->affect({{0.5, -0.5}, {0.6, -0.4}}) == 2);
  CHECK(s->view()["phase"] == "listening");
  CHECK(s->affect({{0.5, -0.5}, {0.6, -0.4}, {0.7, -0.3}}) == 2);  // only the rest of the window
  const auto v = s->view();
  CHECK(v["phase"] == "awaiting_decision");
  CHECK(v["round"] == 1);
  CHECK(v["mood"]["neutral"] == false);
  CHECK(v["history"].size() == 1);

  std::size_t moods = 0;
  for (const auto& e : s->events()) moods += e.type == "mood_update";
  CHECK(moods == 4);
}

TEST_CASE("next closes an empty window") {
  ScratchDir d("affnego_session_next");
  SessionManager m(fixture::config(d.path), fixture::policies());
  auto base = m.get(m.create("baseline", "p1", 3)["id"]);
  base->decide("reject");
  const auto before = base->events().size();
  const auto v = base->next();
  CHECK(v["phase"] == "awaiting_decision");
  CHECK(v["round"] == 1);
  // no perception, no memory, no cores: nothing to tick the mood with
  std::size_t moods = 0;
  for (const auto& e : base->events()) moods += e.type == "mood_update";
  CHECK(moods == 0);
  CHECK(base->events().size() > before);

  // a personality core keeps ticking through an idle window
  auto patient = m.get(m.create("patient", "p1", 3)["id"]);
  patient->decide("reject");
  patient->next();
  moods = 0;
  for (const auto& e : patient->events()) moods += e.type == "mood_update";
  CHECK(moods == 4);
}

TEST_CASE("twenty rejections abort") {
  ScratchDir d("affnego_session_abort");
  SessionManager m(fixture::config(d.path), fixture::policies());
  auto s = m.get(m.create("impatient-high", "p2", 4)["id"]);
  for (int i = 0; i < 19; ++i) {
    s->decide("reject");
    s->affect({{0.6, -0.6}, {0.6, -0.6}, {0.6, -0.6}, {0.6, -0.6}});
  }
  const auto v = s->decide("reject");
  CHECK(v["status"] == "aborted");
  CHECK(v["round"] == 20);
  CHECK(s->terminal());
  const auto last = s->events().back();
  CHECK(last.type == "terminal");
  CHECK(last.payload["status"] == "aborted");
}

TEST_CASE("event log is sequential and mirrored to disk") {
  ScratchDir d("affnego_session_log");
  SessionManager m(fixture::config(d.path), fixture::policies());
  const std::string id = m.create("inhibitory", "p1", 5)["id"];
  auto s = m.get(id);
  s->decide("reject");
  s->affect({{0.1, 0.2}, {0.0, 0.1}, {0.2, 0.2}, {0.1, 0.0}});
  s->decide("accept");
  const auto events = s->events();
  for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i].seq == i + 1);
  CHECK(events.front().type == "offer");

  std::istringstream file(cli::slurp(d.path / (id + ".jsonl")));
  std::string line;
  std::size_t n = 0;
  while (std::getline(file, line)) {
    REQUIRE(n < events.size());
    CHECK(Json::parse(line) == to_json(events[n]));
    ++n;
  }
  CHECK(n == events.size());
}

TEST_CASE("events_after wakes on new events") {
  ScratchDir d("affnego_session_wait");
  SessionManager m(fixture::config(d.path), fixture::policies());
  auto s = m.get(m.create("baseline", "p1", 6)["id"]);
  const auto last = s->events().back().seq;
  CHECK(s->events_after(last, std::chrono::milliseconds(10)).empty());
  std::thread t([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    s->decide("accept");
  });
  const auto got = s->events_after(last, std::chrono::seconds(5));
  t.join();
  REQUIRE_FALSE(got.empty());
  CHECK(got.front().seq == last + 1);
}
