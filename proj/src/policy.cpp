#include "affnego/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "affnego/errors.hpp"

namespace affnego {

AgentState AgentState::from(ArousalValence mood, const Offer& offer) {
  return {mood.arousal(), mood.valence(), offer.robot_fraction(), offer.human_fraction()};
}

Experience to_experience(const Transition& t) {
  return {AgentState::from(t.mood, t.offer).vec(), t.action, t.reward, AgentState::from(t.next_mood, t.next_offer).vec(),
          t.done};
}

// ---- replay buffer

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay buffer: capacity must be positive");
}

void ReplayBuffer::push(const Experience& e) {
  if (data_.size() < capacity_) {
    data_.push_back(e);
  } else {
    data_[next_] = e;
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
  const std::size_t n = data_.size();
  if (batch > n) throw StateError("replay buffer: batch larger than buffer");
  std::vector<std::size_t> out;
  out.reserve(batch);
  for (std::size_t j = n - batch; j < n; ++j) {
    const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    out.push_back(std::find(out.begin(), out.end(), t) == out.end() ? t : j);
  }
  return out;
}

// ---- config

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("train: gamma must lie in (0, 1)");
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("train: rho must lie in (0, 1]");
  if (batch == 0) throw ConfigError("train: batch must be positive");
  if (!(actor_rate > 0.0) || !(critic_rate > 0.0)) throw ConfigError("train: learning rates must be positive");
  if (noise_start < 0.0 || noise_end < 0.0) throw ConfigError("train: noise must be >= 0");
  if (episodes == 0) throw ConfigError("train: episodes must be positive");
  if (buffer_capacity < batch) throw ConfigError("train: buffer capacity smaller than batch");
  if (actor_hidden == 0 || critic_hidden == 0 || critic_joint == 0) throw ConfigError("train: zero layer width");
  if (!(q_limit > 0.0)) throw ConfigError("train: q_limit must be positive");
  if (augmentation_fraction < 0.0 || trace_fraction < 0.0 || augmentation_fraction + trace_fraction > 1.0) {
    throw ConfigError("train: augmentation and trace fractions must be >= 0 and sum to at most 1");
  }
  if (augmentation_fraction > 0.0 && augmentation_pool == 0) throw ConfigError("train: empty augmentation pool");
}

double TrainConfig::noise_sigma(std::size_t episode) const {
  if (episodes <= 1) return noise_end;
  const double t = std::min(1.0, static_cast<double>(episode) / static_cast<double>(episodes - 1));
  return noise_start + (noise_end - noise_start) * t;
}

std::string to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::Momentum: return "momentum";
    case OptimizerKind::Adam: return "adam";
  }
  return "?";
}

std::string to_string(NoiseKind k) { return k == NoiseKind::Gaussian ? "gaussian" : "ou"; }

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "sgd") return OptimizerKind::Sgd;
  if (s == "momentum") return OptimizerKind::Momentum;
  if (s == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + s + "' (sgd, momentum, adam)");
}

NoiseKind parse_noise(const std::string& s) {
  if (s == "gaussian") return NoiseKind::Gaussian;
  if (s == "ou") return NoiseKind::OrnsteinUhlenbeck;
  throw ConfigError("unknown noise '" + s + "' (gaussian, ou)");
}

Json to_json(const TrainConfig& c) {
  return {{"gamma", c.gamma},
          {"rho", c.rho},
          {"batch", c.batch},
          {"actor_rate", c.actor_rate},
          {"critic_rate", c.critic_rate},
          {"optimizer", to_string(c.optimizer)},
          {"noise", to_string(c.noise)},
          {"noise_start", c.noise_start},
          {"noise_end", c.noise_end},
          {"ou_theta", c.ou_theta},
          {"warmup", c.warmup},
          {"episodes", c.episodes},
          {"updates_per_step", c.updates_per_step},
          {"buffer_capacity", c.buffer_capacity},
          {"actor_hidden", c.actor_hidden},
          {"critic_hidden", c.critic_hidden},
          {"critic_joint", c.critic_joint},
          {"final_layer_bound", c.final_layer_bound},
          {"q_limit", c.q_limit},
          {"augmentation_pool", c.augmentation_pool},
          {"augmentation_fraction", c.augmentation_fraction},
          {"trace_fraction", c.trace_fraction},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  c.gamma = j.at("gamma").get<double>();
  c.rho = j.at("rho").get<double>();
  c.batch = j.at("batch").get<std::size_t>();
  c.actor_rate = j.at("actor_rate").get<double>();
  c.critic_rate = j.at("critic_rate").get<double>();
  c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  c.noise = parse_noise(j.at("noise").get<std::string>());
  c.noise_start = j.at("noise_start").get<double>();
  c.noise_end = j.at("noise_end").get<double>();
  c.ou_theta = j.at("ou_theta").get<double>();
  c.warmup = j.at("warmup").get<std::size_t>();
  c.episodes = j.at("episodes").get<std::size_t>();
  c.updates_per_step = j.at("updates_per_step").get<std::size_t>();
  c.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
  c.actor_hidden = j.at("actor_hidden").get<std::size_t>();
  c.critic_hidden = j.at("critic_hidden").get<std::size_t>();
  c.critic_joint = j.at("critic_joint").get<std::size_t>();
  c.final_layer_bound = j.at("final_layer_bound").get<double>();
  c.q_limit = j.at("q_limit").get<double>();
  c.augmentation_pool = j.at("augmentation_pool").get<std::size_t>();
  c.augmentation_fraction = j.at("augmentation_fraction").get<double>();
  c.trace_fraction = j.at("trace_fraction").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

// ---- policy / agent

double PolicyModel::propose(ArousalValence mood, const Offer& rejected, Rng&) {
  return act(AgentState::from(mood, rejected));
}

DdpgAgent::DdpgAgent(const TrainConfig& cfg)
    : cfg_(cfg),
      actor_(cfg.actor_hidden),
      target_actor_(cfg.actor_hidden),
      critic_(cfg.critic_hidden, cfg.critic_joint),
      target_critic_(cfg.critic_hidden, cfg.critic_joint),
      actor_opt_(cfg.optimizer, cfg.actor_rate, actor_.param_count()),
      critic_opt_(cfg.optimizer, cfg.critic_rate, critic_.param_count()) {
  cfg_.validate();
  Rng rng(derive_seed(cfg_.seed, 0xA11CE));
  actor_.init(rng, cfg_.final_layer_bound);
  critic_.init(rng, cfg_.final_layer_bound);
  sync_targets();
}

void DdpgAgent::sync_targets() {
  std::copy(actor_.params().begin(), actor_.params().end(), target_actor_.params().begin());
  std::copy(critic_.params().begin(), critic_.params().end(), target_critic_.params().begin());
}

double DdpgAgent::act(const AgentState& s, double sigma, Rng& rng) const {
  double a = actor_.forward(s.vec());
  if (sigma > 0.0) a += std::normal_distribution<double>(0.0, sigma)(rng);
  return std::clamp(a, -1.0, 1.0);
}

void DdpgAgent::set_exploration(double sigma) {
  if (sigma < 0.0) throw DomainError("exploration sigma must be >= 0");
  sigma_ = sigma;
}

double DdpgAgent::propose(ArousalValence mood, const Offer& rejected, Rng& rng) {
  const AgentState s = AgentState::from(mood, rejected);
  if (cfg_.noise == NoiseKind::Gaussian || sigma_ == 0.0) return act(s, sigma_, rng);
  ou_state_ += -cfg_.ou_theta * ou_state_ + sigma_ * std::normal_distribution<double>(0.0, 1.0)(rng);
  return std::clamp(act(s) + ou_state_, -1.0, 1.0);
}

TrainStats DdpgAgent::train_batch(const ReplayBuffer& buffer, Rng& rng) {
  if (buffer.size() < cfg_.batch) throw StateError("train_batch: buffer holds fewer transitions than a batch");
  const auto idx = buffer.sample_indices(cfg_.batch, rng);
  const double inv_b = 1.0 / static_cast<double>(idx.size());
  TrainStats stats;

  auto guard = [&](double q) {
    if (!std::isfinite(q) || std::abs(q) > cfg_.q_limit) {
      throw DivergenceError("critic diverged: |Q| = " + std::to_string(std::abs(q)));
    }
  };

  // Critic: minimize mean (Q(s,a) - y)^2 with y from the target networks.
  std::vector<double> critic_grad(critic_.param_count(), 0.0);
  Critic::Cache cc;
  for (const std::size_t i : idx) {
    const Experience& e = buffer.at(i);
    double y = e.reward;
    if (!e.done) {
      const double next_a = target_actor_.forward(e.next_state);
      const double next_q = target_critic_.forward(e.next_state, next_a);
      guard(next_q);
      y += cfg_.gamma * next_q;
    }
    const double q = critic_.forward(e.state, e.action, cc);
    guard(q);
    const double err = q - y;
    stats.critic_loss += err * err * inv_b;
    critic_.backward(e.state, e.action, cc, 2.0 * err * inv_b, critic_grad);
  }
  critic_opt_.descend(critic_.params(), critic_grad);

  // Actor: ascend mean Q(s, mu(s)).
  std::vector<double> actor_grad(actor_.param_count(), 0.0);
  Actor::Cache ac;
  for (const std::size_t i : idx) {
    const Experience& e = buffer.at(i);
    const double a = actor_.forward(e.state, ac);
    const double q = critic_.forward(e.state, a, cc);
    stats.actor_objective += q * inv_b;
    actor_.backward(e.state, ac, -critic_.action_gradient(cc) * inv_b, actor_grad);
  }
  actor_opt_.descend(actor_.params(), actor_grad);

  soft_update(target_actor_.params(), actor_.params(), cfg_.rho);
  soft_update(target_critic_.params(), critic_.params(), cfg_.rho);
  return stats;
}

PolicyModel DdpgAgent::policy() const { return PolicyModel(actor_, {{"train_config", to_json(cfg_)}}); }

// ---- snapshots

namespace {

constexpr int kPolicyVersion = 1;

Json layer_json(const std::string& name, const DenseView& v, std::span<const double> p) {
  const auto w = p.subspan(v.offset, v.weight_count());
  const auto b = p.subspan(v.bias_offset(), v.rows);
  return {{"name", name},
          {"rows", v.rows},
          {"cols", v.cols},
          {"weights", std::vector<double>(w.begin(), w.end())},
          {"bias", std::vector<double>(b.begin(), b.end())}};
}

void read_layer(const Json& j, const DenseView& v, std::span<double> p) {
  if (j.at("rows").get<std::size_t>() != v.rows || j.at("cols").get<std::size_t>() != v.cols) {
    throw DomainError("policy snapshot: layer '" + j.value("name", std::string("?")) + "' has the wrong shape");
  }
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto b = j.at("bias").get<std::vector<double>>();
  if (w.size() != v.weight_count() || b.size() != v.rows) throw DomainError("policy snapshot: truncated layer");
  std::copy(w.begin(), w.end(), p.begin() + static_cast<std::ptrdiff_t>(v.offset));
  std::copy(b.begin(), b.end(), p.begin() + static_cast<std::ptrdiff_t>(v.bias_offset()));
}

Json actor_json(const Actor& a) {
  return Json::array({layer_json("hidden", a.layer(0), a.params()), layer_json("output", a.layer(1), a.params())});
}

Json critic_json(const Critic& c) {
  static const char* names[] = {"state", "action", "joint", "output"};
  Json out = Json::array();
  for (std::size_t i = 0; i < 4; ++i) out.push_back(layer_json(names[i], c.layer(i), c.params()));
  return out;
}

Json architecture(std::size_t actor_hidden, std::size_t critic_hidden, std::size_t critic_joint) {
  return {{"state_dim", kStateDim},
          {"actor", {{"hidden", actor_hidden}, {"hidden_activation", "relu"}, {"output_activation", "tanh"}}},
          {"critic", {{"state_hidden", critic_hidden}, {"action_hidden", critic_hidden}, {"joint", critic_joint}}}};
}

}  // namespace

Json policy_to_json(const DdpgAgent& agent) {
  const auto& c = agent.config();
  return {{"format", "policy"},
          {"version", kPolicyVersion},
          {"architecture", architecture(c.actor_hidden, c.critic_hidden, c.critic_joint)},
          {"actor", actor_json(agent.actor())},
          {"critic", critic_json(agent.critic())},
          {"train_config", to_json(c)},
          {"seed", c.seed}};
}

Json policy_to_json(const PolicyModel& model) {
  Json j = {{"format", "policy"},
            {"version", kPolicyVersion},
            {"architecture", architecture(model.actor().hidden(), 0, 0)},
            {"actor", actor_json(model.actor())}};
  for (const auto& [k, v] : model.meta().items()) j[k] = v;
  return j;
}

PolicyModel policy_from_json(const Json& j) {
  try {
    if (j.at("format") != "policy") throw DomainError("policy snapshot: wrong format tag");
    if (j.at("version").get<int>() != kPolicyVersion) throw DomainError("policy snapshot: unsupported version");
    if (j.at("architecture").at("state_dim").get<std::size_t>() != kStateDim) {
      throw DomainError("policy snapshot: state dimension must be 4");
    }
    Actor actor(j.at("architecture").at("actor").at("hidden").get<std::size_t>());
    const Json& layers = j.at("actor");
    if (layers.size() != 2) throw DomainError("policy snapshot: actor must have two layers");
    read_layer(layers[0], actor.layer(0), actor.params());
    read_layer(layers[1], actor.layer(1), actor.params());
    Json meta = Json::object();
    if (j.contains("train_config")) meta["train_config"] = j["train_config"];
    if (j.contains("seed")) meta["seed"] = j["seed"];
    return PolicyModel(std::move(actor), std::move(meta));
  } catch (const Json::exception& e) {
    throw DomainError(std::string("policy snapshot: ") + e.what());
  }
}

PolicyModel load_policy(const std::filesystem::path& path) { return policy_from_json(read_json_file(path)); }

// ---- curves

std::string curves_csv(const std::vector<EpisodeCurve>& curves) {
  std::ostringstream out;
  out.precision(17);
  out << "episode,return,interactions,accepted,final_human_fraction,critic_loss,respondent\n";
  for (const auto& c : curves) {
    out << c.episode << ',' << c.total_return << ',' << c.interactions << ',' << (c.accepted ? 1 : 0) << ','
        << c.final_human_fraction << ',' << c.critic_loss << ',' << c.respondent << '\n';
  }
  return out.str();
}

CurveSummary summarize_tail(const std::vector<EpisodeCurve>& curves, std::size_t window) {
  CurveSummary s;
  const std::size_t n = std::min(window, curves.size());
  s.window = n;
  if (n == 0) return s;
  std::size_t accepted = 0;
  double share = 0.0, inter = 0.0;
  for (std::size_t i = curves.size() - n; i < curves.size(); ++i) {
    inter += static_cast<double>(curves[i].interactions);
    if (curves[i].accepted) {
      ++accepted;
      share += curves[i].final_human_fraction;
    }
  }
  s.mean_interactions = inter / static_cast<double>(n);
  s.success_rate = static_cast<double>(accepted) / static_cast<double>(n);
  s.mean_accepted_share = accepted ? share / static_cast<double>(accepted) : 0.0;
  return s;
}

}  // namespace affnego
