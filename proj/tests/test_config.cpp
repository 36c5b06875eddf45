#include <algorithm>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "affnego/config.hpp"
#include "affnego/errors.hpp"

using namespace affnego;

TEST_CASE("empty config yields the defaults") {
  const Config c = parse_config("");
  CHECK(c.seed == 0);
  CHECK_FALSE(c.use_perception);
  CHECK(c.perception.insertion_threshold == 0.5);
  CHECK(c.perception.habituation_threshold == 0.2);
  CHECK(c.perception.max_edge_age == 50);
  CHECK(c.memory.insertion_threshold == 0.8);
  CHECK(c.memory.max_edge_age == 5);
  CHECK(c.mood.insertion_threshold == 0.9);
  CHECK(c.patient_tau == 0.01);
  CHECK(c.impatient_tau == 0.08);
  CHECK(c.time_core_steps == 90);
  CHECK(c.game.max_rejections == 20);
  CHECK(c.respondent == "eq7");
  CHECK(c.train.actor_rate == 1e-4);
  CHECK(c.train.critic_rate == 1e-3);
  CHECK(c.train.gamma == 0.99);
  CHECK(c.mood_params().context_order == 10);
  CHECK(c.core_params().context_order == 5);
}

TEST_CASE("values override the defaults") {
  const Config c = parse_config(R"(
seed = 42
respondent = "accept"
train_optimizer = "adam"
patient_tau = 0.02
conditions = ["baseline", "excitatory"]
gwr_eps_b = 0.2
)");
  CHECK(c.seed == 42);
  CHECK(c.train.seed == 42);
  CHECK(c.respondent == "accept");
  CHECK(c.train.optimizer == OptimizerKind::Adam);
  CHECK(c.patient_tau == 0.02);
  CHECK(c.conditions == std::vector<std::string>{"baseline", "excitatory"});
  CHECK(c.perception_params().eps_b == 0.2);
  CHECK(c.mood_params().base.eps_b == 0.2);
  // an integer literal is accepted for a real-valued key
  CHECK(parse_config("action_scale = 5").game.action_scale == 5.0);
}

TEST_CASE("bad input is a config error") {
  CHECK_THROWS_AS(parse_config("no_such_key = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = \"zero\""), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = -1"), ConfigError);
  CHECK_THROWS_AS(parse_config("episodes = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("respondent = \"maybe\""), ConfigError);
  CHECK_THROWS_AS(parse_config("conditions = [\"stoic\"]"), ConfigError);
  CHECK_THROWS_AS(parse_config("train_gamma = 1.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("mood_insertion_threshold = 2.0"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = "), ConfigError);
  CHECK_THROWS_AS(parse_config("time_core_steps = 50"), ConfigError);
  CHECK_THROWS_AS(parse_config("conditions = [1, 2]"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/affnego.toml"), ConfigError);
  try {
    parse_config("bogus = true", "mine.toml");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mine.toml") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("every key round trips through its JSON dump") {
  const auto keys = config_keys();
  const Json j = to_json(Config{});
  CHECK(j.size() == keys.size());
  for (const auto& k : keys) CHECK(j.contains(k));
}

TEST_CASE("config hash") {
  const Config a = parse_config("seed = 1");
  CHECK(config_hash(a) == config_hash(parse_config("seed = 1")));
  CHECK(config_hash(a) != config_hash(parse_config("seed = 2")));
  CHECK(config_hash(a).size() == 16);
  // key order in the file does not matter
  CHECK(config_hash(parse_config("seed = 3\nepisodes = 10")) == config_hash(parse_config("episodes = 10\nseed = 3")));
}

TEST_CASE("load from file") {
  const auto path = std::filesystem::temp_directory_path() / "affnego_config_test.toml";
  {
    std::ofstream out(path);
    out << "# comment\nepisodes = 12\nlisten_ticks = 3\n";
  }
  const Config c = load_config(path);
  CHECK(c.episodes == 12);
  CHECK(c.listen_ticks == 3);
  std::filesystem::remove(path);
}

TEST_CASE("personality names") {
  const Config c;
  CHECK(c.parse_personality("patient-high").name() == "patient-high");
  CHECK(c.parse_personality("baseline").name() == "baseline");
  CHECK_THROWS_AS(c.parse_personality("grumpy"), ConfigError);
}
