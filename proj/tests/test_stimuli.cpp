#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "affnego/stimuli.hpp"

using namespace affnego;

namespace {

AffectTrace parse(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in, "test");
}

}  // namespace

TEST_CASE("single row trace") {
  const auto t = parse("step,arousal,valence\n0,0.2,-0.3\n");
  REQUIRE(t.frames.size() == 1);
  CHECK(t.dim == 2);
  CHECK(t.frames[0].step == 0);
  CHECK(t.frames[0].av == ArousalValence{0.2, -0.3});
  CHECK(t.frames[0].features == std::vector<double>{0.2, -0.3});
  CHECK(t.source_id == "test");
}

TEST_CASE("feature columns") {
  const auto t = parse("step,arousal,valence,f0,f1,f2\n3,0.1,0.2,1,2,3\n4,0.1,0.2,4,5,6\n");
  CHECK(t.dim == 3);
  CHECK(t.frames[1].features == std::vector<double>{4, 5, 6});
  CHECK_THROWS_AS(parse("step,arousal,valence,f0\n0,0,0,1\n"), TraceParseError);
}

TEST_CASE("trace errors name the row") {
  try {
    parse("step,arousal,valence\n0,0.1,0.1\n1,1.5,0.0\n");
    FAIL("expected a range error");
  } catch (const TraceRangeError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("step,arousal,valence\n1,0,0\n1,0,0\n"), TraceOrderError);
  CHECK_THROWS_AS(parse("step,arousal,valence\n2,0,0\n1,0,0\n"), TraceOrderError);
  CHECK_THROWS_AS(parse("step,arousal,valence\n0,x,0\n"), TraceParseError);
  CHECK_THROWS_AS(parse("step,arousal,valence\n0,0\n"), TraceParseError);
  CHECK_THROWS_AS(parse("time,arousal,valence\n0,0,0\n"), TraceParseError);
  CHECK_THROWS_AS(parse(""), TraceParseError);
}

TEST_CASE("format and parse round trip byte for byte") {
  const auto t = synth_replay_trace(120, 0);
  const std::string text = format_trace(t);
  const auto back = parse(text);
  REQUIRE(back.frames.size() == t.frames.size());
  for (std::size_t i = 0; i < t.frames.size(); ++i) {
    CHECK(back.frames[i].av == t.frames[i].av);
    CHECK(back.frames[i].step == t.frames[i].step);
  }
  CHECK(format_trace(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "affnego_trace_roundtrip.csv";
  save_trace(t, path);
  CHECK(format_trace(load_trace(path)) == text);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_trace(path), TraceParseError);
}

TEST_CASE("random states are clipped normals") {
  CHECK(synth_random_states(0, 1).empty());
  const auto pts = synth_random_states(20000, 3);
  std::size_t clipped = 0;
  for (const auto& p : pts) {
    for (double c : {p.arousal(), p.valence()}) {
      CHECK(std::abs(c) <= 1.0);
      if (std::abs(c) == 1.0) ++clipped;
    }
  }
  // P(|z| > 1) for a standard normal
  const double expect = std::erfc(1.0 / std::sqrt(2.0));
  CHECK(expect == doctest::Approx(0.3173).epsilon(1e-3));
  CHECK(static_cast<double>(clipped) / 40000.0 == doctest::Approx(expect).epsilon(0.05));
  CHECK(synth_random_states(50, 9).front() == synth_random_states(50, 9).front());
}

TEST_CASE("decay trajectory") {
  const auto t = synth_decay_trajectory({0.5, 0.5}, 0.08, 90);
  REQUIRE(t.frames.size() == 90);
  CHECK(t.frames[0].av == ArousalValence{0.5, 0.5});
  CHECK(t.frames[10].av.arousal() == doctest::Approx(0.2247).epsilon(1e-4));
  CHECK(t.frames[10].av.valence() == doctest::Approx(0.5 * std::exp(-0.8)));
  CHECK_THROWS_AS(synth_decay_trajectory({0.5, 0.5}, 0.08, 0), DomainError);
}

TEST_CASE("conditioning stimuli cover the square") {
  const auto s = synth_conditioning_stimuli(2000, 5);
  REQUIRE(s.size() == 2000);
  double lo = 1.0, hi = -1.0;
  std::size_t above = 0;
  for (const auto& f : s) {
    lo = std::min(lo, f.av.arousal());
    hi = std::max(hi, f.av.arousal());
    if (f.av.arousal() > 0.3) ++above;
  }
  CHECK(lo < -0.95);
  CHECK(hi > 0.95);
  CHECK(static_cast<double>(above) / 2000.0 == doctest::Approx(0.35).epsilon(0.1));
}

TEST_CASE("replay trace is deterministic and mildly positive") {
  const auto a = synth_replay_trace(120, 0);
  CHECK(a.frames.size() == 120);
  CHECK(format_trace(a) == format_trace(synth_replay_trace(120, 0)));
  CHECK(format_trace(a) != format_trace(synth_replay_trace(120, 1)));
  double ma = 0.0, mv = 0.0;
  for (const auto& f : a.frames) {
    ma += f.av.arousal();
    mv += f.av.valence();
  }
  CHECK(ma / 120.0 > 0.0);
  CHECK(mv / 120.0 > 0.0);
}

TEST_CASE("respondent affect model") {
  const RespondentAffectModel m;
  const auto fair = m.base(Offer::from_human(50), 0);
  CHECK(fair.arousal() == doctest::Approx(0.2));
  CHECK(fair.valence() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.base(Offer::from_human(10), 0).valence() == doctest::Approx(-0.8));
  CHECK(m.base(Offer::from_human(10), 3).arousal() == doctest::Approx(0.5));
  CHECK(m.base(Offer::from_human(10), 8).arousal() == doctest::Approx(1.0));
  CHECK(m.base(Offer::from_human(10), 15).arousal() == 1.0);

  const auto frames = respondent_affect(Offer::from_human(30), 2, 11);
  REQUIRE(frames.size() == 4);
  for (const auto& f : frames) {
    CHECK(std::abs(f.arousal() - 0.4) < 0.3);
    CHECK(std::abs(f.valence() + 0.4) < 0.3);
  }
  CHECK(frames == respondent_affect(Offer::from_human(30), 2, 11));

  RespondentAffectModel quiet;
  quiet.noise = 0.0;
  for (const auto& f : respondent_affect(Offer::from_human(90), 20, 1, quiet)) {
    CHECK(f == ArousalValence{1.0, 0.8});
  }
}
