#pragma once

// Affect input sources: CSV trace files, synthetic generators and the
// parametric respondent affect model that stands in for a perceived human.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "affnego/affect.hpp"
#include "affnego/errors.hpp"
#include "affnego/random.hpp"

namespace affnego {

struct TraceParseError : DomainError {
  using DomainError::DomainError;
};
struct TraceRangeError : DomainError {
  using DomainError::DomainError;
};
struct TraceOrderError : DomainError {
  using DomainError::DomainError;
};

struct AffectTrace {
  std::size_t dim = 2;
  std::vector<AffectFrame> frames;
  std::string source_id;
  int tick_ms = 500;
};

// CSV with header `step,arousal,valence[,f0..fD-1]`.
AffectTrace parse_trace(std::istream& in, const std::string& source_id = "stream");
AffectTrace load_trace(const std::filesystem::path& path);
std::string format_trace(const AffectTrace& trace);
void save_trace(const AffectTrace& trace, const std::filesystem::path& path);

AffectTrace trace_from_affect(const std::vector<ArousalValence>& points, const std::string& source_id);

/// Standard-normal coordinates clipped to [-1, 1].
std::vector<ArousalValence> synth_random_states(std::size_t n, std::uint64_t seed);

/// Frame t carries start * exp(-tau t).
AffectTrace synth_decay_trajectory(ArousalValence start, double tau, std::size_t steps);

/// Uniform samples over the affect square, used as conditioning stimuli.
std::vector<AffectFrame> synth_conditioning_stimuli(std::size_t n, std::uint64_t seed);

/// Fixed mood-study replay: a sequence of short affect episodes of a mildly
/// positive conversation (segment centres near the diagonal around 0.35), with per-tick jitter.
AffectTrace synth_replay_trace(std::size_t ticks, std::uint64_t seed);

struct RespondentAffectModel {
  double arousal_base = 0.2;
  double arousal_step = 0.1;  // per consecutive rejection
  double noise = 0.05;
  std::size_t frames = 4;

  /// Noise-free affect: valence 2h - 1, arousal min(1, base + step * rejections).
  ArousalValence base(const Offer& offer, std::size_t consecutive_rejections) const;
  std::vector<ArousalValence> express(const Offer& offer, std::size_t consecutive_rejections, Rng& rng) const;
};

std::vector<ArousalValence> respondent_affect(const Offer& offer, std::size_t consecutive_rejections,
                                              std::uint64_t noise_seed, const RespondentAffectModel& model = {});

}  // namespace affnego
