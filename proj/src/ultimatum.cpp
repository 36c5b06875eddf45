#include "affnego/ultimatum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "affnego/errors.hpp"

namespace affnego {
namespace {

Decision draw(double p, Rng& rng) { return uniform01(rng) < p ? Decision::Accept : Decision::Reject; }

int sign(double x) { return (x > 0.0) - (x < 0.0); }

// Independent random streams within one episode.
enum Stream : std::uint64_t { kFirstOffer = 1, kDecisions = 2, kAffect = 3, kAgent = 4 };

}  // namespace

double AcceptanceModel::probability(double f) const {
  if (!(f >= 0.0 && f <= 1.0)) throw DomainError("acceptance: human fraction outside [0, 1]");
  if (f >= full) return 1.0;
  if (f >= linear) return f;
  if (f >= low) return low_probability;
  return 0.0;
}

double acceptance_probability(double human_fraction, const AcceptanceModel& model) {
  return model.probability(human_fraction);
}

void GameConfig::validate() const {
  if (max_rejections < 1) throw ConfigError("game: max_rejections must be >= 1");
  if (!(action_scale > 0.0 && action_scale <= 50.0)) throw ConfigError("game: action_scale must lie in (0, 50]");
  if (!(first_offer_human_min >= 0.0 && first_offer_human_min <= first_offer_human_max &&
        first_offer_human_max <= Offer::kTotal)) {
    throw ConfigError("game: need 0 <= first_offer_human_min <= first_offer_human_max <= 100");
  }
  const auto& a = acceptance;
  if (!(0.0 <= a.low && a.low <= a.linear && a.linear <= a.full && a.full <= 1.0)) {
    throw ConfigError("game: acceptance breakpoints must satisfy 0 <= low <= linear <= full <= 1");
  }
  if (!(a.low_probability >= 0.0 && a.low_probability <= 1.0)) {
    throw ConfigError("game: acceptance low_probability must lie in [0, 1]");
  }
  if (!(reward.mood_shift_eps > 0.0)) throw ConfigError("game: mood_shift_eps must be positive");
}

std::string to_string(Decision d) { return d == Decision::Accept ? "accept" : "reject"; }

std::string to_string(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::Active: return "active";
    case EpisodeStatus::Accepted: return "accepted";
    case EpisodeStatus::Aborted: return "aborted";
  }
  return "?";
}

NegotiationState::NegotiationState(Offer first, const GameConfig& config)
    : offer_(first), max_rejections_(config.max_rejections), action_scale_(config.action_scale) {
  config.validate();
}

void NegotiationState::record(Decision d, const MoodSnapshot& mood) {
  if (status_ != EpisodeStatus::Active) throw StateError("negotiation: episode already terminal");
  history_.push_back({offer_, d, mood});
  if (d == Decision::Accept) {
    status_ = EpisodeStatus::Accepted;
    return;
  }
  ++round_;
  if (round_ >= max_rejections_) status_ = EpisodeStatus::Aborted;
}

void NegotiationState::apply_update(double delta) {
  if (status_ != EpisodeStatus::Active) throw StateError("negotiation: episode already terminal");
  offer_ = affnego::apply_update(offer_, delta, action_scale_);
}

Offer apply_update(const Offer& offer, double delta, double action_scale) {
  if (!std::isfinite(delta)) throw DomainError("apply_update: non-finite delta");
  return Offer::from_human(std::clamp(offer.human_points() + delta * action_scale, 0.0, Offer::kTotal));
}

Decision respond(const NegotiationState& state, Rng& rng, const AcceptanceModel& model) {
  if (state.status() != EpisodeStatus::Active) throw StateError("respond: episode already terminal");
  return draw(model.probability(state.offer().human_fraction()), rng);
}

double step_reward(const Offer& prev_offer, const Offer& new_offer, ArousalValence prev_mood, ArousalValence new_mood,
                   Outcome outcome, const RewardWeights& w) {
  double r = 0.0;
  if (new_offer.human_points() > prev_offer.human_points() && new_offer.robot_points() > 50.0) r += w.offer;

  const double shift = 1.0 + w.mood_shift_eps;
  const std::array<double, 2> p{prev_mood.arousal() + shift, prev_mood.valence() + shift};
  const std::array<double, 2> q{new_mood.arousal() + shift, new_mood.valence() + shift};
  const int s = sign(new_mood.valence() - prev_mood.valence());
  if (s != 0) r += w.mood * s * cosine_distance(p, q);

  if (outcome == Outcome::Accepted) r += w.accept_scale * new_offer.robot_fraction();
  if (outcome == Outcome::Aborted) r += w.abort_penalty;
  return r;
}

// ---- respondents

Decision StochasticRespondent::decide(const Offer& offer, Rng& rng) {
  return draw(acceptance_.probability(offer.human_fraction()), rng);
}

std::vector<ArousalValence> StochasticRespondent::express(const Offer& offer, std::size_t rejections, Rng& rng) {
  return affect_.express(offer, rejections, rng);
}

ScriptedRespondent::ScriptedRespondent(std::vector<Decision> script, RespondentAffectModel affect)
    : script_(std::move(script)), affect_(affect) {
  if (script_.empty()) throw DomainError("scripted respondent: empty script");
}

Decision ScriptedRespondent::decide(const Offer&, Rng&) {
  const Decision d = script_[next_ % script_.size()];
  ++next_;
  return d;
}

std::vector<ArousalValence> ScriptedRespondent::express(const Offer& offer, std::size_t rejections, Rng& rng) {
  return affect_.express(offer, rejections, rng);
}

DecayRespondent::DecayRespondent(ArousalValence start, double tau, std::size_t frames, AcceptanceModel acceptance)
    : start_(start), tau_(tau), frames_(frames), acceptance_(acceptance) {
  if (tau_ < 0.0) throw DomainError("decay respondent: tau must be >= 0");
}

Decision DecayRespondent::decide(const Offer& offer, Rng& rng) {
  return draw(acceptance_.probability(offer.human_fraction()), rng);
}

std::vector<ArousalValence> DecayRespondent::express(const Offer&, std::size_t rejections, Rng&) {
  return std::vector<ArousalValence>(frames_, start_ * std::exp(-tau_ * static_cast<double>(rejections)));
}

TraceRespondent::TraceRespondent(std::vector<ArousalValence> trace, std::size_t frames, std::size_t offset,
                                 AcceptanceModel acceptance)
    : trace_(std::move(trace)), frames_(frames), cursor_(offset), acceptance_(acceptance) {
  if (trace_.empty()) throw DomainError("trace respondent: empty trace");
}

Decision TraceRespondent::decide(const Offer& offer, Rng& rng) {
  return draw(acceptance_.probability(offer.human_fraction()), rng);
}

std::vector<ArousalValence> TraceRespondent::express(const Offer&, std::size_t, Rng&) {
  std::vector<ArousalValence> out;
  out.reserve(frames_);
  for (std::size_t i = 0; i < frames_; ++i) out.push_back(trace_[cursor_++ % trace_.size()]);
  return out;
}

// ---- episodes

Json to_json(const EpisodeResult& r, std::size_t index) {
  Json offers = Json::array();
  Json decisions = Json::array();
  Json moods = Json::array();
  for (const auto& h : r.history) {
    offers.push_back(h.offer.human_points());
    decisions.push_back(to_string(h.decision));
    moods.push_back({h.mood.mean.arousal(), h.mood.mean.valence()});
  }
  return {{"episode", index},
          {"status", to_string(r.status)},
          {"rounds", r.rounds},
          {"interactions", r.interactions},
          {"first_offer", r.first_offer.human_points()},
          {"final_offer", r.final_offer.human_points()},
          {"max_human_offer", r.max_human_offer},
          {"return", r.total_reward},
          {"offers", offers},
          {"decisions", decisions},
          {"moods", moods},
          {"actions", r.actions}};
}

EpisodeResult run_episode(Proposer& agent, Respondent& respondent, AffectivePipeline& pipeline,
                          const GameConfig& config, std::uint64_t seed, const TransitionObserver& observer) {
  config.validate();
  Rng offer_rng(derive_seed(seed, kFirstOffer));
  Rng decision_rng(derive_seed(seed, kDecisions));
  Rng affect_rng(derive_seed(seed, kAffect));
  Rng agent_rng(derive_seed(seed, kAgent));

  const double h0 =
      std::uniform_real_distribution<double>(config.first_offer_human_min, config.first_offer_human_max)(offer_rng);
  NegotiationState state(Offer::from_human(h0), config);

  EpisodeResult result;
  result.first_offer = state.offer();
  result.max_human_offer = h0;

  // The transition started by the last action, closed once its outcome is known.
  std::optional<Transition> pending;
  std::size_t frame_step = 0;

  try {
    while (state.status() == EpisodeStatus::Active) {
      const Offer presented = state.offer();
      ++result.interactions;
      const Decision d = respondent.decide(presented, decision_rng);

      if (d == Decision::Accept) {
        state.record(d, pipeline.mood().snapshot());
        if (pending) {
          pending->reward = step_reward(pending->offer, presented, pending->mood, pending->mood, Outcome::Accepted,
                                        config.reward);
          pending->next_mood = pending->mood;
          pending->next_offer = presented;
          pending->done = true;
          result.total_reward += pending->reward;
          if (observer) observer(*pending);
        }
        break;
      }

      for (const auto& av : respondent.express(presented, state.round() + 1, affect_rng)) {
        pipeline.perceive(AffectFrame::from_affect(frame_step++, av));
      }
      const MoodSnapshot mood = pipeline.mood().snapshot();
      state.record(d, mood);
      const bool aborted = state.status() == EpisodeStatus::Aborted;

      if (pending) {
        pending->reward = step_reward(pending->offer, presented, pending->mood, mood.mean,
                                      aborted ? Outcome::Aborted : Outcome::Rejected, config.reward);
        pending->next_mood = mood.mean;
        pending->next_offer = presented;
        pending->done = aborted;
        result.total_reward += pending->reward;
        if (observer) observer(*pending);
        pending.reset();
      } else if (aborted) {
        result.total_reward += config.reward.abort_penalty;
      }
      if (aborted) break;

      const double action = std::clamp(agent.propose(mood.mean, presented, agent_rng), -1.0, 1.0);
      result.actions.push_back(action);
      Transition t;
      t.mood = mood.mean;
      t.offer = presented;
      t.action = action;
      pending = t;
      state.apply_update(action);
      result.max_human_offer = std::max(result.max_human_offer, state.offer().human_points());
    }
  } catch (const Error& e) {
    throw StateError("episode (seed " + std::to_string(seed) + ", round " + std::to_string(state.round()) +
                     "): " + e.what());
  }

  result.status = state.status();
  result.rounds = state.round();
  result.final_offer = state.offer();
  result.history = state.history();
  return result;
}

}  // namespace affnego
