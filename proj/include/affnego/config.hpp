#pragma once

// Flat TOML configuration. Every key has a default; unknown keys and
// mistyped values are rejected with ConfigError.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "affnego/affective_core.hpp"
#include "affnego/gamma_gwr.hpp"
#include "affnego/gwr.hpp"
#include "affnego/mood.hpp"
#include "affnego/policy.hpp"
#include "affnego/snapshot.hpp"
#include "affnego/stimuli.hpp"
#include "affnego/ultimatum.hpp"

namespace affnego {

struct Config {
  std::uint64_t seed = 0;

  // perception prototypes over the 2-D affect plane
  bool use_perception = false;  // off: a 2-D frame is its own perception input
  GwrParams perception = GwrParams::perception();
  std::size_t perception_samples = 1000;
  int perception_epochs = 1;

  // shared self-organizing learning rates and context constants
  double gwr_eps_b = 0.1;
  double gwr_eps_n = 0.01;
  double gwr_tau_b = 0.3;
  double gwr_tau_n = 0.1;
  double gwr_kappa = 1.05;
  double context_beta = 0.7;

  GwrParams memory = GwrParams::affective_memory();
  std::size_t memory_context_order = 10;
  GwrParams core = GwrParams::core();
  std::size_t core_context_order = 5;
  GwrParams mood = GwrParams::mood();
  std::size_t mood_context_order = 10;
  std::size_t memory_weight = 1;
  std::size_t perception_bmus = 2;
  std::size_t social_bmus = 5;
  std::size_t time_bmus = 2;

  // personality cores
  double patient_tau = kPatientTau;
  double impatient_tau = kImpatientTau;
  std::size_t time_core_steps = 90;
  double core_start_arousal = 0.5;
  double core_start_valence = 0.5;
  int core_epochs = 1;
  double excitatory_threshold = 0.3;
  double inhibitory_threshold = 0.05;
  std::size_t conditioning_stimuli = 500;
  std::string conditioning_trace;  // optional CSV; synthetic stimuli otherwise

  GameConfig game;
  std::string respondent = "eq7";  // eq7 | accept | reject
  RespondentAffectModel respondent_affect;

  TrainConfig train;
  std::string personality = "baseline";  // pretraining condition

  // simulate
  std::size_t episodes = 200;
  std::vector<std::string> conditions{"baseline", "patient-high", "impatient-low"};
  std::string policy;  // snapshot path

  // replay-mood
  std::size_t replay_ticks = 120;
  std::string replay_trace;  // optional CSV; synthetic replay otherwise
  std::vector<std::string> replay_conditions{"baseline", "excitatory", "inhibitory", "patient", "impatient"};

  // serve
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string policies_dir = "policies";
  std::size_t listen_ticks = 6;
  std::string log_dir = "sessions";

  // Derived network parameter sets (shared rates applied).
  GwrParams perception_params() const;
  GammaGwrParams memory_params() const;
  GammaGwrParams core_params() const;
  GammaGwrParams mood_params() const;
  CoreBuildOptions core_options() const;
  PipelineConfig pipeline_config() const;
  PersonalityConfig parse_personality(const std::string& name) const;

  void validate() const;
};

Config parse_config(const std::string& toml_text, const std::string& source = "config");
Config load_config(const std::filesystem::path& path);

// All keys with their effective values, sorted.
Json to_json(const Config& c);
// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const Config& c);

std::vector<std::string> config_keys();

}  // namespace affnego
