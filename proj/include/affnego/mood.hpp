#pragma once

// Mood formation. The MoodEngine owns the 2-D mood Gamma-GWR and fuses
// whatever affect sources are available on a tick; the AffectivePipeline
// wires a perception network, a per-user affective memory and optional
// personality cores in front of it.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affnego/affect.hpp"
#include "affnego/affective_core.hpp"
#include "affnego/gamma_gwr.hpp"
#include "affnego/gwr.hpp"
#include "affnego/snapshot.hpp"

namespace affnego {

struct MoodTickInput {
  std::optional<std::vector<ArousalValence>> perception;
  std::optional<ArousalValence> memory_mean;
  std::optional<std::vector<ArousalValence>> social;
  std::optional<std::vector<ArousalValence>> time;

  bool empty() const { return !perception && !memory_mean && !social && !time; }
  std::vector<std::string> sources() const;
};

struct MoodSnapshot {
  ArousalValence mean;
  std::size_t neuron_count = 0;
  std::size_t step = 0;
  bool neutral = true;  // no neuron yet; mean is the configured default
  std::vector<std::string> sources;
};

struct MoodConfig {
  GammaGwrParams network = GammaGwrParams::with_order(GwrParams::mood(), 10);
  ArousalValence neutral{0.0, 0.0};
  std::size_t memory_weight = 1;  // training points contributed by the memory mean per tick
};

class MoodEngine {
 public:
  explicit MoodEngine(MoodConfig config = {});

  // Feeds present sources in the order perception -> memory -> social -> time.
  MoodSnapshot tick(const MoodTickInput& input);

  ArousalValence current_mood() const;
  bool has_mood() const { return net_.size() > 0; }
  std::size_t step() const { return step_; }
  const GammaGwrNetwork& network() const { return net_; }
  const MoodConfig& config() const { return config_; }
  MoodSnapshot snapshot() const;

 private:
  void feed(ArousalValence p);

  MoodConfig config_;
  GammaGwrNetwork net_;
  std::size_t step_ = 0;
  std::vector<std::string> last_sources_;
};

/// {step, sources_present, mean_a, mean_v, neuron_count}
Json tick_log_record(const MoodSnapshot& s);

struct PipelineConfig {
  std::size_t perception_bmus = 2;
  std::size_t social_bmus = 5;
  std::size_t time_bmus = 2;
  GammaGwrParams memory = GammaGwrParams::with_order(GwrParams::affective_memory(), 10);
  MoodConfig mood;
};

class AffectivePipeline {
 public:
  // `perception` may be null, in which case a frame's own affect is the
  // perception input. Cores are optional and shared read-only.
  AffectivePipeline(std::shared_ptr<const GwrNetwork> perception, Decoder decoder,
                    std::shared_ptr<const TimePerceptionCore> time_core,
                    std::shared_ptr<const SocialConditioningCore> social_core, PipelineConfig config = {});

  // One perception tick: perception BMUs, memory update, core queries.
  MoodSnapshot perceive(const AffectFrame& frame);
  // A tick without perception input (memory mean and cores only). Returns the
  // unchanged snapshot when no source is available.
  MoodSnapshot idle_tick();

  ArousalValence current_mood() const { return mood_.current_mood(); }
  const MoodEngine& mood() const { return mood_; }
  const GammaGwrNetwork& memory() const { return memory_; }
  bool has_cores() const { return time_core_ || social_core_; }

 private:
  MoodTickInput core_inputs(MoodTickInput in) const;

  std::shared_ptr<const GwrNetwork> perception_;
  Decoder decoder_;
  std::shared_ptr<const TimePerceptionCore> time_core_;
  std::shared_ptr<const SocialConditioningCore> social_core_;
  PipelineConfig config_;
  GammaGwrNetwork memory_;
  MoodEngine mood_;
};

}  // namespace affnego
