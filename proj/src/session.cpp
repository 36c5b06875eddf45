#include "affnego/session.hpp"

#include <cstdio>
#include <random>

namespace affnego {
namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

Offer first_offer(const GameConfig& game, std::uint64_t seed) {
  // Same stream as run_episode, so a session and a simulated episode with one seed open identically.
  Rng rng(derive_seed(seed, 1));
  return Offer::from_human(
      std::uniform_real_distribution<double>(game.first_offer_human_min, game.first_offer_human_max)(rng));
}

Json offer_json(const Offer& o) { return {{"human", o.human_points()}, {"robot", o.robot_points()}}; }

}  // namespace

std::string to_string(Phase p) {
  switch (p) {
    case Phase::AwaitingDecision: return "awaiting_decision";
    case Phase::Listening: return "listening";
    case Phase::Computing: return "computing";
    case Phase::Terminal: return "terminal";
  }
  return "?";
}

Json to_json(const Event& e) {
  return {{"seq", e.seq}, {"wall_time", e.wall_time}, {"type", e.type}, {"payload", e.payload}};
}

Session::Session(std::string id, PersonalityConfig personality, std::string policy_id,
                 std::shared_ptr<const PolicyModel> policy, Personality cores,
                 std::shared_ptr<const GwrNetwork> perception, const Config& cfg, std::uint64_t seed,
                 std::optional<std::filesystem::path> log_path)
    : id_(std::move(id)),
      personality_(personality),
      policy_id_(std::move(policy_id)),
      policy_(*policy),
      cores_(std::move(cores)),
      pipeline_(std::move(perception), Decoder::identity(), cores_.time, cores_.social, cfg.pipeline_config()),
      game_(cfg.game),
      listen_ticks_(cfg.listen_ticks),
      state_(first_offer(cfg.game, seed), cfg.game),
      agent_rng_(derive_seed(seed, 4)) {
  if (log_path) {
    log_.emplace(*log_path, std::ios::out | std::ios::trunc);
    if (!*log_) throw Error("session: cannot open log " + log_path->string());
  }
  emit("offer", {{"round", 0}, {"offer", offer_json(state_.offer())}});
  emit("phase_change", {{"from", nullptr}, {"to", to_string(phase_)}, {"reason", "created"}});
}

void Session::emit(const std::string& type, Json payload) {
  Event e{events_.size() + 1, now_seconds(), type, std::move(payload)};
  if (log_) {
    *log_ << to_json(e).dump() << '\n';
    log_->flush();
  }
  events_.push_back(std::move(e));
  cv_.notify_all();
}

void Session::set_phase(Phase p, const std::string& reason) {
  const Phase from = phase_;
  phase_ = p;
  emit("phase_change", {{"from", to_string(from)}, {"to", to_string(p)}, {"reason", reason}});
}

Json Session::mood_json() const {
  const auto s = pipeline_.mood().snapshot();
  return {{"arousal", s.mean.arousal()},
          {"valence", s.mean.valence()},
          {"neuron_count", s.neuron_count},
          {"step", s.step},
          {"neutral", s.neutral}};
}

Json Session::view_locked() const {
  Json history = Json::array();
  for (const auto& h : state_.history()) {
    history.push_back({{"offer", offer_json(h.offer)},
                       {"decision", to_string(h.decision)},
                       {"mood", {{"arousal", h.mood.mean.arousal()}, {"valence", h.mood.mean.valence()}}}});
  }
  return {{"id", id_},
          {"personality", personality_.name()},
          {"policy_id", policy_id_},
          {"phase", to_string(phase_)},
          {"status", to_string(state_.status())},
          {"round", state_.round()},
          {"offer", offer_json(state_.offer())},
          {"mood", mood_json()},
          {"history", history},
          {"listen", {{"ticks", window_ticks_}, {"window", listen_ticks_}}},
          {"last_seq", events_.size()}};
}

Json Session::view() const {
  std::lock_guard lock(mu_);
  return view_locked();
}

Json Session::decide(const std::string& action) {
  std::lock_guard lock(mu_);
  if (action != "accept" && action != "reject") throw ServiceError(422, "action must be 'accept' or 'reject'");
  if (phase_ != Phase::AwaitingDecision) {
    throw ServiceError(409, "decision not allowed in phase " + to_string(phase_));
  }
  const MoodSnapshot mood = pipeline_.mood().snapshot();
  if (action == "accept") {
    state_.record(Decision::Accept, mood);
    set_phase(Phase::Terminal, "accept");
    emit("terminal", {{"status", to_string(state_.status())}, {"offer", offer_json(state_.offer())},
                      {"rounds", state_.round()}});
    return view_locked();
  }
  state_.record(Decision::Reject, mood);
  if (state_.status() == EpisodeStatus::Aborted) {
    set_phase(Phase::Terminal, "reject");
    emit("terminal", {{"status", to_string(state_.status())}, {"offer", offer_json(state_.offer())},
                      {"rounds", state_.round()}});
    return view_locked();
  }
  window_ticks_ = 0;
  set_phase(Phase::Listening, "reject");
  return view_locked();
}

std::size_t Session::affect(const std::vector<std::array<double, 2>>& frames) {
  std::lock_guard lock(mu_);
  if (phase_ != Phase::Listening) throw ServiceError(409, "affect not accepted in phase " + to_string(phase_));
  for (const auto& f : frames) {
    if (!in_affect_range(f[0], f[1])) throw ServiceError(422, "affect frame outside [-1, 1]");
  }
  std::size_t taken = 0;
  for (const auto& f : frames) {
    if (window_ticks_ >= listen_ticks_) break;
    pipeline_.perceive(AffectFrame::from_affect(frame_step_++, {f[0], f[1]}));
    ++window_ticks_;
    ++taken;
    Json m = mood_json();
    m["source"] = "perception";
    m["frame"] = {{"arousal", f[0]}, {"valence", f[1]}};
    emit("mood_update", std::move(m));
  }
  if (window_ticks_ >= listen_ticks_) close_window();
  return taken;
}

Json Session::next() {
  std::lock_guard lock(mu_);
  if (phase_ != Phase::Listening) throw ServiceError(409, "next not allowed in phase " + to_string(phase_));
  // The rest of the window passes without perception: memory and cores still tick.
  while (window_ticks_ < listen_ticks_) {
    const std::size_t before = pipeline_.mood().step();
    pipeline_.idle_tick();
    ++window_ticks_;
    if (pipeline_.mood().step() != before) {
      Json m = mood_json();
      m["source"] = "idle";
      emit("mood_update", std::move(m));
    }
  }
  close_window();
  return view_locked();
}

void Session::close_window() {
  set_phase(Phase::Computing, "window_closed");
  const Offer rejected = state_.offer();
  const ArousalValence mood = pipeline_.current_mood();
  const double action = policy_.propose(mood, rejected, agent_rng_);
  state_.apply_update(action);
  emit("offer", {{"round", state_.round()}, {"offer", offer_json(state_.offer())}, {"action", action},
                 {"mood", {{"arousal", mood.arousal()}, {"valence", mood.valence()}}}});
  set_phase(Phase::AwaitingDecision, "offer");
}

std::vector<Event> Session::events_after(std::uint64_t after, std::chrono::milliseconds wait) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, wait, [&] { return events_.size() > after; });
  if (events_.size() <= after) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
}

std::vector<Event> Session::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

bool Session::terminal() const {
  std::lock_guard lock(mu_);
  return phase_ == Phase::Terminal;
}

// ---- manager

SessionManager::SessionManager(Config cfg, std::map<std::string, std::shared_ptr<const PolicyModel>> policies)
    : cfg_(std::move(cfg)), policies_(std::move(policies)), perception_(build_perception(cfg_)) {}

std::map<std::string, std::shared_ptr<const PolicyModel>> SessionManager::load_policies(
    const std::filesystem::path& dir) {
  std::map<std::string, std::shared_ptr<const PolicyModel>> out;
  if (!std::filesystem::is_directory(dir)) throw ConfigError("policies directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    out[entry.path().stem().string()] = std::make_shared<const PolicyModel>(load_policy(entry.path()));
  }
  return out;
}

Personality SessionManager::personality_for(const PersonalityConfig& p) {
  const std::string key = p.name();
  auto it = core_cache_.find(key);
  if (it == core_cache_.end()) it = core_cache_.emplace(key, build_personality(p, cfg_)).first;
  return it->second;
}

Json SessionManager::create(const std::string& personality, const std::string& policy_id, std::uint64_t seed) {
  PersonalityConfig p;
  try {
    p = PersonalityConfig::parse(personality, cfg_.patient_tau, cfg_.impatient_tau);
  } catch (const Error& e) {
    throw ServiceError(422, std::string("invalid personality: ") + e.what());
  }
  std::lock_guard lock(mu_);
  const auto pol = policies_.find(policy_id);
  if (pol == policies_.end()) throw ServiceError(404, "unknown policy '" + policy_id + "'");

  // Ids only name sessions and log files; they never feed the game's randomness.
  const std::uint64_t entropy = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(derive_seed(entropy, streams::kSessions, counter_++)));
  std::string id(buf);
  std::optional<std::filesystem::path> log_path;
  if (!cfg_.log_dir.empty()) {
    std::filesystem::create_directories(cfg_.log_dir);
    log_path = std::filesystem::path(cfg_.log_dir) / (id + ".jsonl");
  }
  auto s = std::make_shared<Session>(id, p, policy_id, pol->second, personality_for(p), perception_, cfg_, seed,
                                     log_path);
  sessions_[id] = s;
  Json view = s->view();
  view["first_offer"] = view["offer"];
  return view;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
  return it->second;
}

std::vector<std::string> SessionManager::policy_ids() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : policies_) out.push_back(k);
  return out;
}

}  // namespace affnego
