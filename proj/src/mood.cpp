#include "affnego/mood.hpp"

#include <algorithm>

#include "affnego/errors.hpp"

namespace affnego {

std::vector<std::string> MoodTickInput::sources() const {
  std::vector<std::string> out;
  if (perception) out.emplace_back("perception");
  if (memory_mean) out.emplace_back("memory");
  if (social) out.emplace_back("social");
  if (time) out.emplace_back("time");
  return out;
}

MoodEngine::MoodEngine(MoodConfig config) : config_(std::move(config)), net_(2, config_.network) {}

void MoodEngine::feed(ArousalValence p) {
  const std::vector<double> x{p.arousal(), p.valence()};
  net_.learn(x);
}

MoodSnapshot MoodEngine::tick(const MoodTickInput& input) {
  if (input.empty()) throw DomainError("mood tick: no source present");
  if (input.perception) {
    for (const auto& p : *input.perception) feed(p);
  }
  if (input.memory_mean) {
    for (std::size_t i = 0; i < config_.memory_weight; ++i) feed(*input.memory_mean);
  }
  if (input.social) {
    for (const auto& p : *input.social) feed(p);
  }
  if (input.time) {
    for (const auto& p : *input.time) feed(p);
  }
  ++step_;
  last_sources_ = input.sources();
  return snapshot();
}

ArousalValence MoodEngine::current_mood() const {
  if (net_.size() == 0) return config_.neutral;
  return net_.mean_decoded(Decoder::identity());
}

MoodSnapshot MoodEngine::snapshot() const {
  return MoodSnapshot{current_mood(), net_.size(), step_, net_.size() == 0, last_sources_};
}

Json tick_log_record(const MoodSnapshot& s) {
  return {{"step", s.step},
          {"sources_present", s.sources},
          {"mean_a", s.mean.arousal()},
          {"mean_v", s.mean.valence()},
          {"neuron_count", s.neuron_count}};
}

AffectivePipeline::AffectivePipeline(std::shared_ptr<const GwrNetwork> perception, Decoder decoder,
                                     std::shared_ptr<const TimePerceptionCore> time_core,
                                     std::shared_ptr<const SocialConditioningCore> social_core,
                                     PipelineConfig config)
    : perception_(std::move(perception)),
      decoder_(std::move(decoder)),
      time_core_(std::move(time_core)),
      social_core_(std::move(social_core)),
      config_(std::move(config)),
      memory_(decoder_.dim(), config_.memory),
      mood_(config_.mood) {
  if (perception_ && perception_->dim() != decoder_.dim()) {
    throw DimensionError("pipeline: perception and decoder dimensions differ");
  }
  if (perception_ && perception_->size() < config_.perception_bmus) {
    throw DomainError("pipeline: perception network smaller than the winner count");
  }
}

MoodTickInput AffectivePipeline::core_inputs(MoodTickInput in) const {
  const ArousalValence current = mood_.current_mood();
  if (social_core_ && config_.social_bmus > 0) in.social = social_core_->query(current, config_.social_bmus);
  if (time_core_ && config_.time_bmus > 0) in.time = time_core_->query(current, config_.time_bmus);
  return in;
}

MoodSnapshot AffectivePipeline::perceive(const AffectFrame& frame) {
  if (frame.features.size() != decoder_.dim()) throw DimensionError("pipeline: frame dimension mismatch");
  MoodTickInput in;
  if (perception_) {
    std::vector<ArousalValence> points;
    for (const auto& hit : perception_->find_bmus(frame.features, config_.perception_bmus)) {
      points.push_back(perception_->decode(hit.index, decoder_));
    }
    in.perception = std::move(points);
  } else {
    in.perception = std::vector<ArousalValence>{frame.av};
  }
  memory_.learn(frame.features);
  in.memory_mean = memory_.mean_decoded(decoder_);
  return mood_.tick(core_inputs(std::move(in)));
}

MoodSnapshot AffectivePipeline::idle_tick() {
  MoodTickInput in;
  if (memory_.size() > 0) in.memory_mean = memory_.mean_decoded(decoder_);
  in = core_inputs(std::move(in));
  if (in.empty()) return mood_.snapshot();
  return mood_.tick(in);
}

}  // namespace affnego
