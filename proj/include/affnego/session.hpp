#pragma once

// Live negotiation sessions in which a human plays the respondent. The
// SessionManager holds the state machines; server.hpp puts HTTP and
// server-sent events in front of it.

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "affnego/config.hpp"
#include "affnego/experiment.hpp"
#include "affnego/policy.hpp"
#include "affnego/snapshot.hpp"

namespace affnego {

enum class Phase { AwaitingDecision, Listening, Computing, Terminal };
std::string to_string(Phase p);

/// Error carrying the HTTP status it maps to (404, 409, 422).
struct ServiceError : Error {
  ServiceError(int status, const std::string& msg) : Error(msg), status(status) {}
  int status;
};

struct Event {
  std::uint64_t seq = 0;
  double wall_time = 0.0;  // seconds since the Unix epoch
  std::string type;        // offer | mood_update | phase_change | terminal
  Json payload;
};

Json to_json(const Event& e);

class Session {
 public:
  Session(std::string id, PersonalityConfig personality, std::string policy_id,
          std::shared_ptr<const PolicyModel> policy, Personality cores, std::shared_ptr<const GwrNetwork> perception,
          const Config& cfg, std::uint64_t seed, std::optional<std::filesystem::path> log_path);

  const std::string& id() const { return id_; }

  // All public operations lock the session.
  Json view() const;
  Json decide(const std::string& action);
  // frames as {arousal, valence}; all are validated before any is applied.
  std::size_t affect(const std::vector<std::array<double, 2>>& frames);
  Json next();

  // Events with seq > after; blocks up to `wait` for new events when none are pending.
  std::vector<Event> events_after(std::uint64_t after, std::chrono::milliseconds wait) const;
  std::vector<Event> events() const;
  bool terminal() const;

 private:
  Json view_locked() const;
  void emit(const std::string& type, Json payload);
  void set_phase(Phase p, const std::string& reason);
  void close_window();
  Json mood_json() const;

  std::string id_;
  PersonalityConfig personality_;
  std::string policy_id_;
  PolicyModel policy_;
  Personality cores_;
  AffectivePipeline pipeline_;
  GameConfig game_;
  std::size_t listen_ticks_;
  NegotiationState state_;
  Rng agent_rng_;
  Phase phase_ = Phase::AwaitingDecision;
  std::size_t window_ticks_ = 0;
  std::size_t frame_step_ = 0;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<Event> events_;
  std::optional<std::ofstream> log_;
};

class SessionManager {
 public:
  SessionManager(Config cfg, std::map<std::string, std::shared_ptr<const PolicyModel>> policies);

  // Loads every *.json snapshot in `dir`; the id is the file stem.
  static std::map<std::string, std::shared_ptr<const PolicyModel>> load_policies(const std::filesystem::path& dir);

  Json create(const std::string& personality, const std::string& policy_id, std::uint64_t seed);
  std::shared_ptr<Session> get(const std::string& id) const;
  std::vector<std::string> policy_ids() const;
  const Config& config() const { return cfg_; }

 private:
  Personality personality_for(const PersonalityConfig& p);

  Config cfg_;
  std::map<std::string, std::shared_ptr<const PolicyModel>> policies_;
  std::shared_ptr<const GwrNetwork> perception_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, Personality> core_cache_;
  std::uint64_t counter_ = 0;
};

}  // namespace affnego
