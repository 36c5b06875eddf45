// Command-line front end: build personality cores, pre-train a policy,
// simulate paired experiments, run the mood replay study, analyze reports
// and serve live sessions.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "affnego/config.hpp"
#include "affnego/errors.hpp"
#include "affnego/experiment.hpp"
#include "affnego/kernels.hpp"
#include "affnego/policy.hpp"
#include "affnego/server.hpp"
#include "affnego/session.hpp"

namespace fs = std::filesystem;
using namespace affnego;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  Config load() const {
    Config cfg = config_path.empty() ? Config{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    cfg.train.seed = cfg.seed;
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "TOML configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "root seed for all randomness");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const Json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_json_file(path, j);
}

PolicyModel require_policy(const std::string& path) {
  if (path.empty()) throw ConfigError("no policy snapshot given (--policy or the 'policy' key)");
  if (!fs::exists(path)) throw ConfigError("policy snapshot not found: " + path);
  return load_policy(path);
}

SessionServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personality-driven negotiating agent: affective stack, policy training and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "affnego 0.1.0");

  // build-core
  Common core_common;
  std::string core_personality = "patient-high";
  std::string core_out = "personality.json";
  auto* core_cmd = app.add_subcommand("build-core", "build the time-perception and social-conditioning cores");
  add_common(core_cmd, core_common);
  core_cmd->add_option("--personality", core_personality, "e.g. patient-high, impatient-low, excitatory");
  core_cmd->add_option("--out", core_out, "output JSON");

  // pretrain
  Common pre_common;
  std::string pre_out = "pretrain";
  std::optional<std::size_t> pre_episodes;
  bool pre_quiet = false;
  auto* pre_cmd = app.add_subcommand("pretrain", "pre-train the actor-critic against the stochastic respondent");
  add_common(pre_cmd, pre_common);
  pre_cmd->add_option("--out", pre_out, "output directory (policy.json, curves.csv, summary.json)");
  pre_cmd->add_option("--episodes", pre_episodes, "override train_episodes");
  pre_cmd->add_flag("--quiet", pre_quiet, "no progress output");

  // simulate
  Common sim_common;
  std::string sim_policy;
  std::string sim_out = "report.json";
  std::optional<std::size_t> sim_episodes;
  bool sim_jsonl = false;
  auto* sim_cmd = app.add_subcommand("simulate", "run paired episodes for each configured condition");
  add_common(sim_cmd, sim_common);
  sim_cmd->add_option("--policy", sim_policy, "policy snapshot (overrides the 'policy' key)");
  sim_cmd->add_option("--out", sim_out, "report JSON");
  sim_cmd->add_option("--episodes", sim_episodes, "override 'episodes'");
  sim_cmd->add_flag("--episodes-jsonl", sim_jsonl, "also write per-episode records next to the report");

  // replay-mood
  Common rep_common;
  std::string rep_out = "replay.json";
  std::string rep_trace;
  auto* rep_cmd = app.add_subcommand("replay-mood", "mood study: one replay, several affective cores");
  add_common(rep_cmd, rep_common);
  rep_cmd->add_option("--out", rep_out, "report JSON");
  rep_cmd->add_option("--trace", rep_trace, "replay CSV (overrides 'replay_trace')");

  // analyze
  Common an_common;
  std::string an_input;
  std::string an_out = "analysis.json";
  std::string an_csv;
  auto* an_cmd = app.add_subcommand("analyze", "quantiles and pairwise tests for a simulate or replay-mood report");
  add_common(an_cmd, an_common);
  an_cmd->add_option("--input", an_input, "report JSON")->required();
  an_cmd->add_option("--out", an_out, "analysis JSON");
  an_cmd->add_option("--csv", an_csv, "box-plot quantiles CSV");

  // serve
  Common srv_common;
  std::optional<int> srv_port;
  std::string srv_policies;
  std::string srv_host;
  auto* srv_cmd = app.add_subcommand("serve", "HTTP + event-stream service for live sessions");
  add_common(srv_cmd, srv_common);
  srv_cmd->add_option("--port", srv_port, "listen port (overrides 'port'; 0 picks a free port)");
  srv_cmd->add_option("--policies", srv_policies, "directory of policy snapshots (overrides 'policies_dir')");
  srv_cmd->add_option("--host", srv_host, "bind address (overrides 'host')");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*core_cmd) {
      const Config cfg = core_common.load();
      const auto p = cfg.parse_personality(core_personality);
      const Personality persona = build_personality(p, cfg);
      Json j = {{"format", "personality"}, {"version", 1}, {"name", p.name()}, {"seed", cfg.seed},
                {"config_hash", config_hash(cfg)}};
      j["time"] = persona.time ? to_json(*persona.time) : Json(nullptr);
      j["social"] = persona.social ? to_json(*persona.social) : Json(nullptr);
      write_json(core_out, j);
      std::cout << "wrote " << core_out << " (" << p.name() << ")\n";
      return kOk;
    }

    if (*pre_cmd) {
      Config cfg = pre_common.load();
      if (pre_episodes) {
        cfg.train.episodes = *pre_episodes;
        cfg.validate();
      }
      const Personality persona = build_personality(cfg.parse_personality(cfg.personality), cfg);
      PretrainEnv env;
      env.perception = build_perception(cfg);
      env.time_core = persona.time;
      env.social_core = persona.social;
      env.pipeline = cfg.pipeline_config();
      env.game = cfg.game;
      env.respondent_affect = cfg.respondent_affect;
      env.traces.push_back(replay_trace(cfg));
      std::cerr << "pretrain: " << cfg.train.episodes << " episodes, kernels " << simd::isa_name(simd::active().isa)
                << '\n';
      PretrainProgress progress;
      if (!pre_quiet) {
        progress = [](const EpisodeCurve& c) {
          if ((c.episode + 1) % 100 == 0) {
            std::cerr << "  episode " << c.episode + 1 << " return " << c.total_return << " interactions "
                      << c.interactions << '\n';
          }
        };
      }
      const auto result = pretrain(cfg.train, env, progress);
      const fs::path dir(pre_out);
      fs::create_directories(dir);
      write_json(dir / "policy.json", policy_to_json(*result.agent));
      write_text(dir / "curves.csv", curves_csv(result.curves));
      const auto tail = summarize_tail(result.curves, 100);
      const Json summary = {{"episodes", result.curves.size()},
                            {"tail_window", tail.window},
                            {"tail_mean_accepted_share", tail.mean_accepted_share},
                            {"tail_mean_interactions", tail.mean_interactions},
                            {"tail_success_rate", tail.success_rate},
                            {"seed", cfg.seed},
                            {"config_hash", config_hash(cfg)}};
      write_json(dir / "summary.json", summary);
      std::cout << summary.dump(2) << '\n';
      return kOk;
    }

    if (*sim_cmd) {
      Config cfg = sim_common.load();
      if (sim_episodes) cfg.episodes = *sim_episodes;
      cfg.validate();
      const PolicyModel policy = require_policy(sim_policy.empty() ? cfg.policy : sim_policy);
      std::vector<std::vector<EpisodeResult>> episodes;
      const auto report = run_experiment(cfg, policy, sim_jsonl ? &episodes : nullptr);
      write_json(sim_out, to_json(report));
      if (sim_jsonl) {
        std::string lines;
        for (std::size_t c = 0; c < episodes.size(); ++c) {
          for (std::size_t i = 0; i < episodes[c].size(); ++i) {
            Json j = to_json(episodes[c][i], i);
            j["condition"] = report.conditions[c].name;
            lines += j.dump() + '\n';
          }
        }
        write_text(fs::path(sim_out).replace_extension(".episodes.jsonl"), lines);
      }
      for (const auto& c : report.conditions) {
        std::printf("%-16s success %.3f  interactions %.2f +- %.2f  offered>=50 %.3f\n", c.name.c_str(),
                    c.success_rate, c.mean_interactions, c.stderr_interactions, c.fraction_offered_geq_50);
      }
      return kOk;
    }

    if (*rep_cmd) {
      Config cfg = rep_common.load();
      if (!rep_trace.empty()) cfg.replay_trace = rep_trace;
      std::vector<PersonalityConfig> conds;
      for (const auto& n : cfg.replay_conditions) conds.push_back(cfg.parse_personality(n));
      const auto study = replay_mood_study(replay_trace(cfg), conds, cfg);
      write_json(rep_out, to_json(study));
      for (const auto& c : study.comparisons) {
        std::printf("%-12s %-8s U=%8.1f  p(two-sided)=%.3g  p(greater)=%.3g  p(less)=%.3g  shift=%+.3f\n",
                    c.condition.c_str(), c.dimension.c_str(), c.u, c.p_two_sided, c.p_greater, c.p_less,
                    c.median_shift);
      }
      return kOk;
    }

    if (*an_cmd) {
      an_common.load();
      if (!fs::exists(an_input)) throw ConfigError("input report not found: " + an_input);
      const Json analysis = analyze_report(read_json_file(an_input));
      write_json(an_out, analysis);
      if (!an_csv.empty()) write_text(an_csv, quantiles_csv(analysis));
      std::cout << "wrote " << an_out << '\n';
      return kOk;
    }

    if (*srv_cmd) {
      Config cfg = srv_common.load();
      if (srv_port) cfg.port = *srv_port;
      if (!srv_policies.empty()) cfg.policies_dir = srv_policies;
      if (!srv_host.empty()) cfg.host = srv_host;
      cfg.validate();
      SessionManager manager(cfg, SessionManager::load_policies(cfg.policies_dir));
      SessionServer server(manager);
      const int port = server.bind(cfg.host, cfg.port);
      if (port < 0) throw Error("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on http://" << cfg.host << ':' << port << " (" << manager.policy_ids().size()
                << " policies)" << std::endl;
      server.listen();
      g_server = nullptr;
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
