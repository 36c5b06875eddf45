#pragma once

// Experiment orchestration: personality construction, paired simulations
// across conditions, the mood replay study and report analysis.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "affnego/affective_core.hpp"
#include "affnego/config.hpp"
#include "affnego/policy.hpp"
#include "affnego/snapshot.hpp"
#include "affnego/stats.hpp"
#include "affnego/stimuli.hpp"

namespace affnego {

struct Personality {
  PersonalityConfig config;
  std::shared_ptr<const TimePerceptionCore> time;
  std::shared_ptr<const SocialConditioningCore> social;
};

// Seed streams shared by every subcommand so cores and networks built by one
// command match those rebuilt by another.
namespace streams {
inline constexpr std::uint64_t kPerception = 101;
inline constexpr std::uint64_t kConditioning = 102;
inline constexpr std::uint64_t kEpisodes = 103;
inline constexpr std::uint64_t kReplay = 104;
inline constexpr std::uint64_t kSessions = 105;
}  // namespace streams

/// Perception prototypes trained on clipped-normal affect states; null when disabled.
std::shared_ptr<const GwrNetwork> build_perception(const Config& cfg);

/// Conditioning stimuli: the configured trace, or synthetic uniform samples.
std::vector<AffectFrame> conditioning_frames(const Config& cfg);

Personality build_personality(const PersonalityConfig& p, const Config& cfg);

std::unique_ptr<Respondent> make_respondent(const Config& cfg);

struct ConditionMetrics {
  std::string name;
  double success_rate = 0.0;
  double mean_interactions = 0.0;
  double stderr_interactions = 0.0;
  double mean_first_offer = 0.0;
  std::optional<double> mean_accepted_offer;
  std::optional<double> mean_final_offer_if_rejected;
  double fraction_offered_geq_50 = 0.0;
  // raw per-episode arrays, indexed by episode
  std::vector<double> interactions;
  std::vector<int> accepted;
  std::vector<double> first_offer;
  std::vector<double> final_offer;
  std::vector<double> max_offer;
  std::vector<double> returns;
};

ConditionMetrics summarize(const std::string& name, const std::vector<EpisodeResult>& episodes);

struct PairComparison {
  std::string a, b;
  std::optional<double> hedges_g_interactions;
  double mann_whitney_u = 0.0;
  double mann_whitney_p = 1.0;
};

struct ExperimentReport {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t episodes = 0;
  std::vector<ConditionMetrics> conditions;
  std::vector<PairComparison> comparisons;
};

Json to_json(const ExperimentReport& r);

/// Runs cfg.episodes paired episodes (identical seeds) per condition.
ExperimentReport run_experiment(const Config& cfg, const PolicyModel& policy,
                                std::vector<std::vector<EpisodeResult>>* episodes_out = nullptr);

struct ReplayCondition {
  std::string name;
  std::vector<double> arousal;  // per-tick mood mean
  std::vector<double> valence;
};

struct ReplayComparison {
  std::string condition;
  std::string reference;
  std::string dimension;  // "arousal" | "valence"
  double u = 0.0;
  double p_two_sided = 1.0;
  double p_greater = 1.0;
  double p_less = 1.0;
  double median_shift = 0.0;  // median(condition) - median(reference)
};

struct ReplayStudy {
  std::size_t ticks = 0;
  std::vector<ReplayCondition> conditions;
  std::vector<ReplayComparison> comparisons;

  const ReplayComparison& find(const std::string& condition, const std::string& dimension) const;
};

Json to_json(const ReplayStudy& s);

/// Replays the same trace through a fresh pipeline per condition. The first
/// condition without cores is the reference (else the first condition).
ReplayStudy replay_mood_study(const AffectTrace& trace, const std::vector<PersonalityConfig>& conditions,
                              const Config& cfg);

/// The replay trace configured for the study: the given CSV or the synthetic replay.
AffectTrace replay_trace(const Config& cfg);

/// Summary tables from a simulate or replay-mood report: box-plot quantiles
/// and pairwise tests.
Json analyze_report(const Json& report);
std::string quantiles_csv(const Json& analysis);

}  // namespace affnego
