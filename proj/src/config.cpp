#include "affnego/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "affnego/errors.hpp"

namespace affnego {
namespace {

struct Entry {
  std::string key;
  std::function<void(Config&, const toml::node&)> set;
  std::function<Json(const Config&)> get;
};

[[noreturn]] void type_error(const std::string& key, const char* want) {
  throw ConfigError("config key '" + key + "': expected " + want);
}

template <class T>
T read_value(const std::string& key, const toml::node& n) {
  if constexpr (std::is_same_v<T, bool>) {
    if (auto v = n.value_exact<bool>()) return *v;
    type_error(key, "a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = n.value_exact<std::string>()) return *v;
    type_error(key, "a string");
  } else if constexpr (std::is_same_v<T, double>) {
    if (n.is_floating_point() || n.is_integer()) return *n.value<double>();
    type_error(key, "a number");
  } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
    const auto* arr = n.as_array();
    if (!arr) type_error(key, "an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *arr) {
      auto v = e.value_exact<std::string>();
      if (!v) type_error(key, "an array of strings");
      out.push_back(*v);
    }
    return out;
  } else if constexpr (std::is_integral_v<T>) {
    auto v = n.value_exact<std::int64_t>();
    if (!v) type_error(key, "an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (*v < 0) type_error(key, "a non-negative integer");
    }
    return static_cast<T>(*v);
  } else {
    static_assert(sizeof(T) == 0, "unsupported config type");
  }
}

template <class Ref>
Entry field(std::string key, Ref ref) {
  using T = std::remove_reference_t<decltype(ref(std::declval<Config&>()))>;
  return {key, [key, ref](Config& c, const toml::node& n) { ref(c) = read_value<T>(key, n); },
          [ref](const Config& c) { return Json(ref(const_cast<Config&>(c))); }};
}

#define CFG(key, expr) field(key, [](Config& c) -> auto& { return c.expr; })

void add_gwr(std::vector<Entry>& out, const std::string& prefix, GwrParams Config::*member) {
  out.push_back(field(prefix + "_insertion_threshold",
                      [member](Config& c) -> auto& { return (c.*member).insertion_threshold; }));
  out.push_back(field(prefix + "_habituation_threshold",
                      [member](Config& c) -> auto& { return (c.*member).habituation_threshold; }));
  out.push_back(field(prefix + "_max_edge_age", [member](Config& c) -> auto& { return (c.*member).max_edge_age; }));
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back(CFG("seed", seed));

    e.push_back(CFG("use_perception", use_perception));
    add_gwr(e, "perception", &Config::perception);
    e.push_back(CFG("perception_samples", perception_samples));
    e.push_back(CFG("perception_epochs", perception_epochs));

    e.push_back(CFG("gwr_eps_b", gwr_eps_b));
    e.push_back(CFG("gwr_eps_n", gwr_eps_n));
    e.push_back(CFG("gwr_tau_b", gwr_tau_b));
    e.push_back(CFG("gwr_tau_n", gwr_tau_n));
    e.push_back(CFG("gwr_kappa", gwr_kappa));
    e.push_back(CFG("context_beta", context_beta));

    add_gwr(e, "memory", &Config::memory);
    e.push_back(CFG("memory_context_order", memory_context_order));
    add_gwr(e, "core", &Config::core);
    e.push_back(CFG("core_context_order", core_context_order));
    add_gwr(e, "mood", &Config::mood);
    e.push_back(CFG("mood_context_order", mood_context_order));
    e.push_back(CFG("memory_weight", memory_weight));
    e.push_back(CFG("perception_bmus", perception_bmus));
    e.push_back(CFG("social_bmus", social_bmus));
    e.push_back(CFG("time_bmus", time_bmus));

    e.push_back(CFG("patient_tau", patient_tau));
    e.push_back(CFG("impatient_tau", impatient_tau));
    e.push_back(CFG("time_core_steps", time_core_steps));
    e.push_back(CFG("core_start_arousal", core_start_arousal));
    e.push_back(CFG("core_start_valence", core_start_valence));
    e.push_back(CFG("core_epochs", core_epochs));
    e.push_back(CFG("excitatory_threshold", excitatory_threshold));
    e.push_back(CFG("inhibitory_threshold", inhibitory_threshold));
    e.push_back(CFG("conditioning_stimuli", conditioning_stimuli));
    e.push_back(CFG("conditioning_trace", conditioning_trace));

    e.push_back(CFG("max_rejections", game.max_rejections));
    e.push_back(CFG("first_offer_human_min", game.first_offer_human_min));
    e.push_back(CFG("first_offer_human_max", game.first_offer_human_max));
    e.push_back(CFG("action_scale", game.action_scale));
    e.push_back(CFG("reward_offer", game.reward.offer));
    e.push_back(CFG("reward_mood", game.reward.mood));
    e.push_back(CFG("reward_accept_scale", game.reward.accept_scale));
    e.push_back(CFG("reward_abort_penalty", game.reward.abort_penalty));
    e.push_back(CFG("reward_mood_shift_eps", game.reward.mood_shift_eps));
    e.push_back(CFG("accept_full", game.acceptance.full));
    e.push_back(CFG("accept_linear", game.acceptance.linear));
    e.push_back(CFG("accept_low", game.acceptance.low));
    e.push_back(CFG("accept_low_probability", game.acceptance.low_probability));

    e.push_back(CFG("respondent", respondent));
    e.push_back(CFG("respondent_arousal_base", respondent_affect.arousal_base));
    e.push_back(CFG("respondent_arousal_step", respondent_affect.arousal_step));
    e.push_back(CFG("respondent_noise", respondent_affect.noise));
    e.push_back(CFG("respondent_frames", respondent_affect.frames));

    e.push_back(CFG("train_gamma", train.gamma));
    e.push_back(CFG("train_rho", train.rho));
    e.push_back(CFG("train_batch", train.batch));
    e.push_back(CFG("train_actor_rate", train.actor_rate));
    e.push_back(CFG("train_critic_rate", train.critic_rate));
    e.push_back({"train_optimizer",
                 [](Config& c, const toml::node& n) {
                   c.train.optimizer = parse_optimizer(read_value<std::string>("train_optimizer", n));
                 },
                 [](const Config& c) { return Json(to_string(c.train.optimizer)); }});
    e.push_back({"train_noise",
                 [](Config& c, const toml::node& n) { c.train.noise = parse_noise(read_value<std::string>("train_noise", n)); },
                 [](const Config& c) { return Json(to_string(c.train.noise)); }});
    e.push_back(CFG("train_noise_start", train.noise_start));
    e.push_back(CFG("train_noise_end", train.noise_end));
    e.push_back(CFG("train_ou_theta", train.ou_theta));
    e.push_back(CFG("train_warmup", train.warmup));
    e.push_back(CFG("train_episodes", train.episodes));
    e.push_back(CFG("train_updates_per_step", train.updates_per_step));
    e.push_back(CFG("train_buffer_capacity", train.buffer_capacity));
    e.push_back(CFG("train_actor_hidden", train.actor_hidden));
    e.push_back(CFG("train_critic_hidden", train.critic_hidden));
    e.push_back(CFG("train_critic_joint", train.critic_joint));
    e.push_back(CFG("train_final_layer_bound", train.final_layer_bound));
    e.push_back(CFG("train_q_limit", train.q_limit));
    e.push_back(CFG("train_augmentation_pool", train.augmentation_pool));
    e.push_back(CFG("train_augmentation_fraction", train.augmentation_fraction));
    e.push_back(CFG("train_trace_fraction", train.trace_fraction));
    e.push_back(CFG("personality", personality));

    e.push_back(CFG("episodes", episodes));
    e.push_back(CFG("conditions", conditions));
    e.push_back(CFG("policy", policy));

    e.push_back(CFG("replay_ticks", replay_ticks));
    e.push_back(CFG("replay_trace", replay_trace));
    e.push_back(CFG("replay_conditions", replay_conditions));

    e.push_back(CFG("port", port));
    e.push_back(CFG("host", host));
    e.push_back(CFG("policies_dir", policies_dir));
    e.push_back(CFG("listen_ticks", listen_ticks));
    e.push_back(CFG("log_dir", log_dir));
    return e;
  }();
  return entries;
}

#undef CFG

GwrParams with_rates(GwrParams p, const Config& c) {
  p.eps_b = c.gwr_eps_b;
  p.eps_n = c.gwr_eps_n;
  p.tau_b = c.gwr_tau_b;
  p.tau_n = c.gwr_tau_n;
  p.kappa = c.gwr_kappa;
  return p;
}

}  // namespace

GwrParams Config::perception_params() const { return with_rates(perception, *this); }
GammaGwrParams Config::memory_params() const {
  return GammaGwrParams::with_order(with_rates(memory, *this), memory_context_order, context_beta);
}
GammaGwrParams Config::core_params() const {
  return GammaGwrParams::with_order(with_rates(core, *this), core_context_order, context_beta);
}
GammaGwrParams Config::mood_params() const {
  return GammaGwrParams::with_order(with_rates(mood, *this), mood_context_order, context_beta);
}

CoreBuildOptions Config::core_options() const {
  CoreBuildOptions o;
  o.network = core_params();
  o.start_arousal = core_start_arousal;
  o.start_valence = core_start_valence;
  o.epochs = core_epochs;
  o.excitatory_threshold = excitatory_threshold;
  o.inhibitory_threshold = inhibitory_threshold;
  return o;
}

PipelineConfig Config::pipeline_config() const {
  PipelineConfig p;
  p.perception_bmus = perception_bmus;
  p.social_bmus = social_bmus;
  p.time_bmus = time_bmus;
  p.memory = memory_params();
  p.mood.network = mood_params();
  p.mood.memory_weight = memory_weight;
  return p;
}

PersonalityConfig Config::parse_personality(const std::string& name) const {
  try {
    return PersonalityConfig::parse(name, patient_tau, impatient_tau);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

void Config::validate() const {
  try {
    perception_params().validate();
    memory_params().validate();
    core_params().validate();
    mood_params().validate();
    game.validate();
    train.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (perception_samples < 2) throw ConfigError("perception_samples must be >= 2");
  if (perception_epochs < 1 || core_epochs < 1) throw ConfigError("epoch counts must be >= 1");
  if (!(patient_tau >= 0.0 && impatient_tau >= 0.0)) throw ConfigError("decay constants must be >= 0");
  if (time_core_steps < 90) throw ConfigError("time_core_steps must be >= 90");
  if (conditioning_stimuli < 2) throw ConfigError("conditioning_stimuli must be >= 2");
  if (respondent != "eq7" && respondent != "accept" && respondent != "reject") {
    throw ConfigError("respondent must be one of eq7, accept, reject");
  }
  if (respondent_affect.noise < 0.0) throw ConfigError("respondent_noise must be >= 0");
  if (episodes == 0) throw ConfigError("episodes must be >= 1");
  if (conditions.empty()) throw ConfigError("conditions must not be empty");
  for (const auto& c : conditions) parse_personality(c);
  parse_personality(personality);
  if (replay_ticks == 0) throw ConfigError("replay_ticks must be >= 1");
  if (replay_conditions.empty()) throw ConfigError("replay_conditions must not be empty");
  for (const auto& c : replay_conditions) parse_personality(c);
  if (port < 0 || port > 65535) throw ConfigError("port outside [0, 65535]");
  if (listen_ticks == 0) throw ConfigError("listen_ticks must be >= 1");
}

Config parse_config(const std::string& text, const std::string& source) {
  toml::table table;
  try {
    table = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
  Config c;
  const auto& reg = registry();
  for (const auto& [k, node] : table) {
    const std::string key(k.str());
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const Entry& e) { return e.key == key; });
    if (it == reg.end()) throw ConfigError(source + ": unknown key '" + key + "'");
    it->set(c, node);
  }
  c.train.seed = c.seed;
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

Json to_json(const Config& c) {
  Json j = Json::object();
  for (const auto& e : registry()) j[e.key] = e.get(c);
  return j;
}

std::string config_hash(const Config& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.key);
  return out;
}

}  // namespace affnego
