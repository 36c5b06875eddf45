#pragma once

// Personality biases: time-perception cores trained on decaying affect
// trajectories and social-conditioning cores trained on arousal-filtered
// stimuli. Cores are frozen after building; queries never mutate them.

#include <cstddef>
#include <span>
#include <vector>

#include "affnego/affect.hpp"
#include "affnego/gamma_gwr.hpp"
#include "affnego/snapshot.hpp"

namespace affnego {

/// exp(-tau * t)
double decay(double t, double tau);

struct CoreBuildOptions {
  GammaGwrParams network = GammaGwrParams::with_order(GwrParams::core(), 5);
  double start_arousal = 0.5;
  double start_valence = 0.5;
  int epochs = 1;
  double excitatory_threshold = 0.3;  // keep arousal > threshold
  double inhibitory_threshold = 0.05;  // keep arousal < threshold
};

class TimePerceptionCore {
 public:
  TimePerceptionCore(double tau, GammaGwrNetwork net);
  double tau() const { return tau_; }
  const GammaGwrNetwork& network() const { return net_; }
  std::vector<ArousalValence> query(ArousalValence current, std::size_t n) const;

 private:
  double tau_;
  GammaGwrNetwork net_;
};

class SocialConditioningCore {
 public:
  SocialConditioningCore(Conditioning mode, GammaGwrNetwork net);
  Conditioning mode() const { return mode_; }
  const GammaGwrNetwork& network() const { return net_; }
  std::vector<ArousalValence> query(ArousalValence current, std::size_t n) const;

 private:
  Conditioning mode_;
  GammaGwrNetwork net_;
};

/// Feeds (start * exp(-tau t)) for t = 0..steps-1 into a fresh 2-D Gamma-GWR.
TimePerceptionCore build_time_core(double tau, std::size_t steps = 90, const CoreBuildOptions& opts = {});

/// Excitatory keeps arousal > excitatory_threshold, Inhibitory keeps arousal <
/// inhibitory_threshold; order preserved. Throws DomainError on an empty result.
std::vector<AffectFrame> filter_frames(std::span<const AffectFrame> frames, Conditioning mode,
                                       const CoreBuildOptions& opts = {});

SocialConditioningCore build_social_core(std::span<const AffectFrame> frames, Conditioning mode,
                                         const CoreBuildOptions& opts = {});

Json to_json(const TimePerceptionCore& core);
Json to_json(const SocialConditioningCore& core);
TimePerceptionCore time_core_from_json(const Json& j);
SocialConditioningCore social_core_from_json(const Json& j);

}  // namespace affnego
