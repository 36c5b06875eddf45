#include <algorithm>

#include "affnego/errors.hpp"
#include "affnego/policy.hpp"

namespace affnego {
namespace {

enum Stream : std::uint64_t { kPool = 11, kSchedule = 12, kTrain = 13, kEpisode = 14 };

}  // namespace

std::vector<DecaySample> augmentation_pool(std::size_t n, std::uint64_t seed) {
  const auto starts = synth_random_states(n, seed);
  Rng rng(derive_seed(seed, 1));
  std::uniform_real_distribution<double> tau(kPatientTau, kImpatientTau);
  std::vector<DecaySample> out;
  out.reserve(n);
  for (const auto& s : starts) out.push_back({s, tau(rng)});
  return out;
}

PretrainResult pretrain(const TrainConfig& cfg, const PretrainEnv& env, const PretrainProgress& progress) {
  cfg.validate();
  env.game.validate();

  PretrainResult result;
  result.agent = std::make_unique<DdpgAgent>(cfg);
  DdpgAgent& agent = *result.agent;
  ReplayBuffer buffer(cfg.buffer_capacity);
  const auto pool = augmentation_pool(cfg.augmentation_pool, derive_seed(cfg.seed, kPool));
  Rng schedule(derive_seed(cfg.seed, kSchedule));
  Rng train_rng(derive_seed(cfg.seed, kTrain));
  const std::size_t start_after = std::max(cfg.warmup, cfg.batch);
  const double trace_fraction = env.traces.empty() ? 0.0 : cfg.trace_fraction;

  for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
    // Always draw the same number of values so the schedule does not depend on the branch taken.
    const double u = uniform01(schedule);
    const double pick = uniform01(schedule);
    const double offset = uniform01(schedule);

    std::unique_ptr<Respondent> respondent;
    std::string kind;
    if (u < cfg.augmentation_fraction) {
      const auto& s = pool[std::min(pool.size() - 1, static_cast<std::size_t>(pick * pool.size()))];
      respondent = std::make_unique<DecayRespondent>(s.start, s.tau, env.respondent_affect.frames, env.game.acceptance);
      kind = "decay";
    } else if (u < cfg.augmentation_fraction + trace_fraction) {
      const auto& t = env.traces[std::min(env.traces.size() - 1, static_cast<std::size_t>(pick * env.traces.size()))];
      std::vector<ArousalValence> points;
      for (const auto& f : t.frames) points.push_back(f.av);
      if (points.empty()) throw DomainError("pretrain: empty stimulus trace");
      const auto start = std::min(points.size() - 1, static_cast<std::size_t>(offset * points.size()));
      respondent = std::make_unique<TraceRespondent>(std::move(points), env.respondent_affect.frames, start,
                                                     env.game.acceptance);
      kind = "trace";
    } else {
      respondent = std::make_unique<StochasticRespondent>(env.game.acceptance, env.respondent_affect);
      kind = "eq7";
    }

    AffectivePipeline pipeline(env.perception, env.decoder, env.time_core, env.social_core, env.pipeline);
    agent.set_exploration(cfg.noise_sigma(ep));
    agent.reset_noise();

    double loss = 0.0;
    std::size_t updates = 0;
    auto observer = [&](const Transition& t) {
      buffer.push(to_experience(t));
      if (buffer.size() < start_after) return;
      for (std::size_t k = 0; k < cfg.updates_per_step; ++k) {
        loss += agent.train_batch(buffer, train_rng).critic_loss;
        ++updates;
      }
    };
    const EpisodeResult r = run_episode(agent, *respondent, pipeline, env.game, derive_seed(cfg.seed, kEpisode, ep),
                                        observer);

    EpisodeCurve c;
    c.episode = ep;
    c.total_return = r.total_reward;
    c.interactions = r.interactions;
    c.accepted = r.status == EpisodeStatus::Accepted;
    c.final_human_fraction = r.final_offer.human_fraction();
    c.critic_loss = updates ? loss / static_cast<double>(updates) : 0.0;
    c.respondent = kind;
    result.curves.push_back(c);
    if (progress) progress(c);
  }
  return result;
}

}  // namespace affnego
