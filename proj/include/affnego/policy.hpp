#pragma once

// Deterministic policy gradient learner: actor, critic, slowly tracking
// target copies, a replay buffer and the pre-training loop.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "affnego/affective_core.hpp"
#include "affnego/gwr.hpp"
#include "affnego/mlp.hpp"
#include "affnego/mood.hpp"
#include "affnego/snapshot.hpp"
#include "affnego/stimuli.hpp"
#include "affnego/ultimatum.hpp"

namespace affnego {

/// Mood plus the normalized split of the offer on the table.
struct AgentState {
  double mood_a = 0.0;
  double mood_v = 0.0;
  double offer_r = 1.0;
  double offer_h = 0.0;

  static AgentState from(ArousalValence mood, const Offer& offer);
  StateVec vec() const { return {mood_a, mood_v, offer_r, offer_h}; }
};

struct Experience {
  StateVec state{};
  double action = 0.0;
  double reward = 0.0;
  StateVec next_state{};
  bool done = false;
};

Experience to_experience(const Transition& t);

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 50'000);

  void push(const Experience& e);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& at(std::size_t i) const { return data_.at(i); }
  // Distinct indices, uniformly chosen (Floyd's algorithm).
  std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Experience> data_;
};

enum class NoiseKind { Gaussian, OrnsteinUhlenbeck };

struct TrainConfig {
  double gamma = 0.99;
  double rho = 0.005;
  std::size_t batch = 64;
  double actor_rate = 1e-4;
  double critic_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Sgd;
  NoiseKind noise = NoiseKind::Gaussian;
  double noise_start = 0.3;
  double noise_end = 0.05;
  double ou_theta = 0.15;
  std::size_t warmup = 500;  // transitions collected before the first update
  std::size_t episodes = 2000;
  std::size_t updates_per_step = 1;
  std::size_t buffer_capacity = 50'000;
  std::size_t actor_hidden = 50;
  std::size_t critic_hidden = 50;
  std::size_t critic_joint = 10;
  double final_layer_bound = 3e-3;
  double q_limit = 1e4;  // divergence guard
  // Augmentation: clipped-normal decay trajectories used as respondent affect.
  std::size_t augmentation_pool = 500;
  double augmentation_fraction = 0.25;
  double trace_fraction = 0.25;  // episodes replaying stimulus traces (when given)
  std::uint64_t seed = 0;

  void validate() const;
  // Linear decay from noise_start to noise_end over the run.
  double noise_sigma(std::size_t episode) const;
};

Json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const Json& j);
std::string to_string(OptimizerKind k);
std::string to_string(NoiseKind k);
OptimizerKind parse_optimizer(const std::string& s);
NoiseKind parse_noise(const std::string& s);

struct TrainStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean Q(s, mu(s)) before the actor step
};

/// Inference-only policy: the actor of a trained agent.
class PolicyModel : public Proposer {
 public:
  explicit PolicyModel(Actor actor, Json meta = Json::object()) : actor_(std::move(actor)), meta_(std::move(meta)) {}

  double act(const AgentState& s) const { return actor_.forward(s.vec()); }
  double propose(ArousalValence mood, const Offer& rejected, Rng& rng) override;

  const Actor& actor() const { return actor_; }
  const Json& meta() const { return meta_; }

 private:
  Actor actor_;
  Json meta_;
};

class DdpgAgent : public Proposer {
 public:
  explicit DdpgAgent(const TrainConfig& cfg);

  // Deterministic action plus optional Gaussian noise, clamped to [-1, 1].
  double act(const AgentState& s, double sigma, Rng& rng) const;
  double act(const AgentState& s) const { return actor_.forward(s.vec()); }
  double critic_q(const AgentState& s, double a) const { return critic_.forward(s.vec(), a); }

  // Exploration used by propose(); OU state is reset per episode.
  void set_exploration(double sigma);
  void reset_noise() { ou_state_ = 0.0; }
  double propose(ArousalValence mood, const Offer& rejected, Rng& rng) override;

  TrainStats train_batch(const ReplayBuffer& buffer, Rng& rng);

  Actor& actor() { return actor_; }
  Critic& critic() { return critic_; }
  const Actor& actor() const { return actor_; }
  const Critic& critic() const { return critic_; }
  const Actor& target_actor() const { return target_actor_; }
  const Critic& target_critic() const { return target_critic_; }
  const TrainConfig& config() const { return cfg_; }
  // Copies the online networks into the targets.
  void sync_targets();

  PolicyModel policy() const;

 private:
  TrainConfig cfg_;
  Actor actor_, target_actor_;
  Critic critic_, target_critic_;
  Optimizer actor_opt_, critic_opt_;
  double sigma_ = 0.0;
  double ou_state_ = 0.0;
};

// Snapshots: {format, version, architecture, actor, critic?, train_config, seed}.
Json policy_to_json(const DdpgAgent& agent);
Json policy_to_json(const PolicyModel& model);
PolicyModel policy_from_json(const Json& j);
PolicyModel load_policy(const std::filesystem::path& path);

struct EpisodeCurve {
  std::size_t episode = 0;
  double total_return = 0.0;
  std::size_t interactions = 0;
  bool accepted = false;
  double final_human_fraction = 0.0;
  double critic_loss = 0.0;
  std::string respondent;  // "eq7", "decay" or "trace"
};

std::string curves_csv(const std::vector<EpisodeCurve>& curves);

struct CurveSummary {
  double mean_accepted_share = 0.0;  // over accepted episodes in the window
  double mean_interactions = 0.0;
  double success_rate = 0.0;
  std::size_t window = 0;
};

CurveSummary summarize_tail(const std::vector<EpisodeCurve>& curves, std::size_t window = 100);

/// Everything a pre-training run needs besides the learner settings.
struct PretrainEnv {
  std::shared_ptr<const GwrNetwork> perception;  // may be null
  Decoder decoder = Decoder::identity();
  std::shared_ptr<const TimePerceptionCore> time_core;
  std::shared_ptr<const SocialConditioningCore> social_core;
  PipelineConfig pipeline;
  GameConfig game;
  RespondentAffectModel respondent_affect;
  std::vector<AffectTrace> traces;  // optional replay sources
};

struct DecaySample {
  ArousalValence start;
  double tau = 0.0;
};

/// Clipped-normal starts with tau drawn between the patient and impatient constants.
std::vector<DecaySample> augmentation_pool(std::size_t n, std::uint64_t seed);

struct PretrainResult {
  std::unique_ptr<DdpgAgent> agent;
  std::vector<EpisodeCurve> curves;
};

using PretrainProgress = std::function<void(const EpisodeCurve&)>;

PretrainResult pretrain(const TrainConfig& cfg, const PretrainEnv& env, const PretrainProgress& progress = {});

}  // namespace affnego
