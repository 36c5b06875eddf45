#include "affnego/affective_core.hpp"

#include <cmath>

#include "affnego/errors.hpp"

namespace affnego {
namespace {

std::vector<ArousalValence> query_net(const GammaGwrNetwork& net, ArousalValence current, std::size_t n) {
  if (net.size() == 0) throw StateError("affective core: untrained core");
  const std::vector<double> x{current.arousal(), current.valence()};
  return net.bmus_decoded(x, n, Decoder::identity()).points;
}

GammaGwrNetwork train_on(const std::vector<std::vector<double>>& inputs, const CoreBuildOptions& opts) {
  GammaGwrNetwork net(2, opts.network);
  net.seed(inputs);
  for (int e = 0; e < opts.epochs; ++e) {
    for (const auto& x : inputs) net.train_step(x);
  }
  return net;
}

}  // namespace

double decay(double t, double tau) { return std::exp(-tau * t); }

TimePerceptionCore::TimePerceptionCore(double tau, GammaGwrNetwork net) : tau_(tau), net_(std::move(net)) {
  if (!(tau > 0.0)) throw DomainError("time core: tau must be positive");
  if (net_.dim() != 2) throw DimensionError("time core: network must be 2-D");
}

std::vector<ArousalValence> TimePerceptionCore::query(ArousalValence current, std::size_t n) const {
  return query_net(net_, current, n);
}

SocialConditioningCore::SocialConditioningCore(Conditioning mode, GammaGwrNetwork net)
    : mode_(mode), net_(std::move(net)) {
  if (mode == Conditioning::None) throw DomainError("social core: mode must be excitatory or inhibitory");
  if (net_.dim() != 2) throw DimensionError("social core: network must be 2-D");
}

std::vector<ArousalValence> SocialConditioningCore::query(ArousalValence current, std::size_t n) const {
  return query_net(net_, current, n);
}

TimePerceptionCore build_time_core(double tau, std::size_t steps, const CoreBuildOptions& opts) {
  if (!(tau > 0.0)) throw DomainError("time core: tau must be positive");
  if (steps < 90) throw DomainError("time core: need at least 90 steps");
  std::vector<std::vector<double>> trajectory;
  trajectory.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const double y = decay(static_cast<double>(t), tau);
    trajectory.push_back({opts.start_arousal * y, opts.start_valence * y});
  }
  return TimePerceptionCore(tau, train_on(trajectory, opts));
}

std::vector<AffectFrame> filter_frames(std::span<const AffectFrame> frames, Conditioning mode,
                                       const CoreBuildOptions& opts) {
  if (mode == Conditioning::None) throw DomainError("filter_frames: mode must be excitatory or inhibitory");
  std::vector<AffectFrame> kept;
  for (const auto& f : frames) {
    const double a = f.av.arousal();
    const bool keep = mode == Conditioning::Excitatory ? a > opts.excitatory_threshold : a < opts.inhibitory_threshold;
    if (keep) kept.push_back(f);
  }
  if (kept.empty()) throw DomainError("filter_frames: insufficient conditioning stimuli");
  return kept;
}

SocialConditioningCore build_social_core(std::span<const AffectFrame> frames, Conditioning mode,
                                         const CoreBuildOptions& opts) {
  const auto kept = filter_frames(frames, mode, opts);
  if (kept.size() < 2) throw DomainError("social core: insufficient conditioning stimuli");
  std::vector<std::vector<double>> inputs;
  inputs.reserve(kept.size());
  for (const auto& f : kept) inputs.push_back({f.av.arousal(), f.av.valence()});
  return SocialConditioningCore(mode, train_on(inputs, opts));
}

Json to_json(const TimePerceptionCore& core) {
  return {{"format", "affective-core"}, {"version", kSnapshotVersion}, {"kind", "time"},
          {"tau", core.tau()}, {"network", to_json(core.network())}};
}

Json to_json(const SocialConditioningCore& core) {
  return {{"format", "affective-core"}, {"version", kSnapshotVersion}, {"kind", "social"},
          {"mode", to_string(core.mode())}, {"network", to_json(core.network())}};
}

TimePerceptionCore time_core_from_json(const Json& j) {
  if (j.value("format", "") != "affective-core" || j.value("kind", "") != "time") {
    throw DomainError("snapshot: not a time-perception core");
  }
  return TimePerceptionCore(j.at("tau").get<double>(), gamma_gwr_from_json(j.at("network")));
}

SocialConditioningCore social_core_from_json(const Json& j) {
  if (j.value("format", "") != "affective-core" || j.value("kind", "") != "social") {
    throw DomainError("snapshot: not a social-conditioning core");
  }
  const auto mode = j.at("mode").get<std::string>();
  Conditioning c = Conditioning::None;
  if (mode == "excitatory") c = Conditioning::Excitatory;
  else if (mode == "inhibitory") c = Conditioning::Inhibitory;
  return SocialConditioningCore(c, gamma_gwr_from_json(j.at("network")));
}

}  // namespace affnego
