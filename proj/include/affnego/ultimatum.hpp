#pragma once

// Ultimatum Game with renegotiation: the agent proposes a split, the
// respondent accepts or rejects, and after each rejection the agent revises
// its offer from its mood. Aborts after max_rejections consecutive rejections.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "affnego/affect.hpp"
#include "affnego/mood.hpp"
#include "affnego/random.hpp"
#include "affnego/stimuli.hpp"

namespace affnego {

/// Piecewise acceptance probability over the human's fraction of the points.
struct AcceptanceModel {
  double full = 0.7;     // fraction >= full: always accept
  double linear = 0.5;   // [linear, full): p = fraction
  double low = 0.4;      // [low, linear): p = low_probability
  double low_probability = 0.1;

  double probability(double human_fraction) const;
};

double acceptance_probability(double human_fraction, const AcceptanceModel& model = {});

struct RewardWeights {
  double offer = 0.2;
  double mood = 1.0;
  double accept_scale = 1.0;
  double abort_penalty = -1.0;
  double mood_shift_eps = 1e-6;
};

struct GameConfig {
  std::size_t max_rejections = 20;
  double first_offer_human_min = 5.0;
  double first_offer_human_max = 20.0;
  double action_scale = 10.0;  // points moved by a unit action
  RewardWeights reward;
  AcceptanceModel acceptance;

  void validate() const;
};

enum class Decision { Accept, Reject };
enum class EpisodeStatus { Active, Accepted, Aborted };
enum class Outcome { Rejected, Accepted, Aborted };

std::string to_string(Decision d);
std::string to_string(EpisodeStatus s);

struct HistoryEntry {
  Offer offer;
  Decision decision;
  MoodSnapshot mood;  // after the respondent's reaction to this offer
};

class NegotiationState {
 public:
  NegotiationState(Offer first, const GameConfig& config);

  const Offer& offer() const { return offer_; }
  std::size_t round() const { return round_; }  // rejections so far
  EpisodeStatus status() const { return status_; }
  const std::vector<HistoryEntry>& history() const { return history_; }

  // Records the respondent's decision on the current offer.
  void record(Decision d, const MoodSnapshot& mood);
  // Moves the human share by delta * action_scale, clamped to [0, 100].
  void apply_update(double delta);

 private:
  Offer offer_;
  std::size_t round_ = 0;
  std::size_t max_rejections_;
  double action_scale_;
  EpisodeStatus status_ = EpisodeStatus::Active;
  std::vector<HistoryEntry> history_;
};

Offer apply_update(const Offer& offer, double delta, double action_scale);

/// Bernoulli draw with acceptance_probability(human share).
Decision respond(const NegotiationState& state, Rng& rng, const AcceptanceModel& model = {});

/// Offer term (human share rose while the robot keeps > 50) plus the signed
/// cosine-distance mood term plus terminal reward/penalty.
double step_reward(const Offer& prev_offer, const Offer& new_offer, ArousalValence prev_mood,
                   ArousalValence new_mood, Outcome outcome, const RewardWeights& w = {});

class Respondent {
 public:
  virtual ~Respondent() = default;
  virtual Decision decide(const Offer& offer, Rng& rng) = 0;
  // Affect frames perceived while the respondent explains a rejection.
  virtual std::vector<ArousalValence> express(const Offer& offer, std::size_t consecutive_rejections, Rng& rng) = 0;
};

/// Eq.-7 decisions with the parametric affect model.
class StochasticRespondent : public Respondent {
 public:
  explicit StochasticRespondent(AcceptanceModel acceptance = {}, RespondentAffectModel affect = {})
      : acceptance_(acceptance), affect_(affect) {}
  Decision decide(const Offer& offer, Rng& rng) override;
  std::vector<ArousalValence> express(const Offer& offer, std::size_t rejections, Rng& rng) override;

 private:
  AcceptanceModel acceptance_;
  RespondentAffectModel affect_;
};

/// Fixed decisions (cycled) with the parametric affect model.
class ScriptedRespondent : public Respondent {
 public:
  explicit ScriptedRespondent(std::vector<Decision> script, RespondentAffectModel affect = {});
  static ScriptedRespondent always(Decision d) { return ScriptedRespondent({d}); }
  Decision decide(const Offer& offer, Rng& rng) override;
  std::vector<ArousalValence> express(const Offer& offer, std::size_t rejections, Rng& rng) override;

 private:
  std::vector<Decision> script_;
  std::size_t next_ = 0;
  RespondentAffectModel affect_;
};

/// Eq.-7 decisions; affect follows start * exp(-tau k) over consecutive rejections.
class DecayRespondent : public Respondent {
 public:
  DecayRespondent(ArousalValence start, double tau, std::size_t frames, AcceptanceModel acceptance = {});
  Decision decide(const Offer& offer, Rng& rng) override;
  std::vector<ArousalValence> express(const Offer& offer, std::size_t rejections, Rng& rng) override;

 private:
  ArousalValence start_;
  double tau_;
  std::size_t frames_;
  AcceptanceModel acceptance_;
};

/// Eq.-7 decisions; affect replayed from a trace, `frames` per burst, cycling.
class TraceRespondent : public Respondent {
 public:
  TraceRespondent(std::vector<ArousalValence> trace, std::size_t frames, std::size_t offset = 0,
                  AcceptanceModel acceptance = {});
  Decision decide(const Offer& offer, Rng& rng) override;
  std::vector<ArousalValence> express(const Offer& offer, std::size_t rejections, Rng& rng) override;

 private:
  std::vector<ArousalValence> trace_;
  std::size_t frames_;
  std::size_t cursor_;
  AcceptanceModel acceptance_;
};

class Proposer {
 public:
  virtual ~Proposer() = default;
  // Action in [-1, 1] given the current mood and the rejected offer.
  virtual double propose(ArousalValence mood, const Offer& rejected, Rng& rng) = 0;
};

struct Transition {
  ArousalValence mood;
  Offer offer;
  double action = 0.0;
  double reward = 0.0;
  ArousalValence next_mood;
  Offer next_offer;
  bool done = false;
};

using TransitionObserver = std::function<void(const Transition&)>;

struct EpisodeResult {
  EpisodeStatus status = EpisodeStatus::Active;
  std::size_t rounds = 0;        // rejections
  std::size_t interactions = 0;  // offers presented (offer + decision)
  Offer first_offer;
  Offer final_offer;
  double max_human_offer = 0.0;
  double total_reward = 0.0;
  std::vector<HistoryEntry> history;
  std::vector<double> actions;
};

Json to_json(const EpisodeResult& r, std::size_t index);

/// Runs one negotiation. Random streams (first offer, decisions, affect
/// noise, proposer noise) are derived from `seed` so that two runs with the
/// same seed see the same respondent randomness.
EpisodeResult run_episode(Proposer& agent, Respondent& respondent, AffectivePipeline& pipeline,
                          const GameConfig& config, std::uint64_t seed, const TransitionObserver& observer = {});

}  // namespace affnego
