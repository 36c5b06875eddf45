#include "affnego/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "affnego/errors.hpp"

namespace affnego {
namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

Json box(const std::vector<double>& x) {
  if (x.empty()) return nullptr;
  return {{"min", quantile(x, 0.0)},   {"q1", quantile(x, 0.25)}, {"median", quantile(x, 0.5)},
          {"q3", quantile(x, 0.75)},   {"max", quantile(x, 1.0)}, {"mean", mean(x)},
          {"n", x.size()}};
}

}  // namespace

std::shared_ptr<const GwrNetwork> build_perception(const Config& cfg) {
  if (!cfg.use_perception) return nullptr;
  const auto states = synth_random_states(cfg.perception_samples, derive_seed(cfg.seed, streams::kPerception));
  std::vector<AffectFrame> frames;
  frames.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) frames.push_back(AffectFrame::from_affect(i, states[i]));
  auto result = fit(GwrNetwork(2, cfg.perception_params()), frames, cfg.perception_epochs);
  return std::make_shared<const GwrNetwork>(std::move(result.network));
}

std::vector<AffectFrame> conditioning_frames(const Config& cfg) {
  if (!cfg.conditioning_trace.empty()) return load_trace(cfg.conditioning_trace).frames;
  return synth_conditioning_stimuli(cfg.conditioning_stimuli, derive_seed(cfg.seed, streams::kConditioning));
}

Personality build_personality(const PersonalityConfig& p, const Config& cfg) {
  Personality out;
  out.config = p;
  const auto opts = cfg.core_options();
  if (p.has_time()) {
    out.time = std::make_shared<const TimePerceptionCore>(build_time_core(p.tau, cfg.time_core_steps, opts));
  }
  if (p.has_conditioning()) {
    const auto frames = conditioning_frames(cfg);
    out.social = std::make_shared<const SocialConditioningCore>(build_social_core(frames, p.conditioning, opts));
  }
  return out;
}

std::unique_ptr<Respondent> make_respondent(const Config& cfg) {
  if (cfg.respondent == "accept") {
    return std::make_unique<ScriptedRespondent>(std::vector<Decision>{Decision::Accept}, cfg.respondent_affect);
  }
  if (cfg.respondent == "reject") {
    return std::make_unique<ScriptedRespondent>(std::vector<Decision>{Decision::Reject}, cfg.respondent_affect);
  }
  return std::make_unique<StochasticRespondent>(cfg.game.acceptance, cfg.respondent_affect);
}

ConditionMetrics summarize(const std::string& name, const std::vector<EpisodeResult>& episodes) {
  if (episodes.empty()) throw DomainError("summarize: no episodes");
  ConditionMetrics m;
  m.name = name;
  double accepted_sum = 0.0, rejected_sum = 0.0;
  std::size_t accepted = 0, rejected = 0, geq50 = 0;
  for (const auto& e : episodes) {
    const bool ok = e.status == EpisodeStatus::Accepted;
    m.interactions.push_back(static_cast<double>(e.interactions));
    m.accepted.push_back(ok ? 1 : 0);
    m.first_offer.push_back(e.first_offer.human_points());
    m.final_offer.push_back(e.final_offer.human_points());
    m.max_offer.push_back(e.max_human_offer);
    m.returns.push_back(e.total_reward);
    if (ok) {
      ++accepted;
      accepted_sum += e.final_offer.human_points();
    } else {
      ++rejected;
      rejected_sum += e.final_offer.human_points();
    }
    if (e.max_human_offer >= 50.0) ++geq50;
  }
  const double n = static_cast<double>(episodes.size());
  m.success_rate = static_cast<double>(accepted) / n;
  m.mean_interactions = mean(m.interactions);
  m.stderr_interactions = standard_error(m.interactions);
  m.mean_first_offer = mean(m.first_offer);
  if (accepted) m.mean_accepted_offer = accepted_sum / static_cast<double>(accepted);
  if (rejected) m.mean_final_offer_if_rejected = rejected_sum / static_cast<double>(rejected);
  m.fraction_offered_geq_50 = static_cast<double>(geq50) / n;
  return m;
}

Json to_json(const ExperimentReport& r) {
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    conds.push_back({{"name", c.name},
                     {"success_rate", c.success_rate},
                     {"mean_interactions", c.mean_interactions},
                     {"stderr_interactions", c.stderr_interactions},
                     {"mean_first_offer", c.mean_first_offer},
                     {"mean_accepted_offer", opt(c.mean_accepted_offer)},
                     {"mean_final_offer_if_rejected", opt(c.mean_final_offer_if_rejected)},
                     {"fraction_offered_geq_50", c.fraction_offered_geq_50},
                     {"raw",
                      {{"interactions", c.interactions},
                       {"accepted", c.accepted},
                       {"first_offer", c.first_offer},
                       {"final_offer", c.final_offer},
                       {"max_offer", c.max_offer},
                       {"return", c.returns}}}});
  }
  Json comps = Json::array();
  for (const auto& p : r.comparisons) {
    comps.push_back({{"a", p.a},
                     {"b", p.b},
                     {"hedges_g_interactions", opt(p.hedges_g_interactions)},
                     {"mann_whitney_u", p.mann_whitney_u},
                     {"mann_whitney_p", p.mann_whitney_p}});
  }
  return {{"kind", "experiment"},
          {"seed", r.seed},
          {"config_hash", r.config_hash},
          {"episodes", r.episodes},
          {"conditions", conds},
          {"comparisons", comps}};
}

ExperimentReport run_experiment(const Config& cfg, const PolicyModel& policy,
                                std::vector<std::vector<EpisodeResult>>* episodes_out) {
  cfg.validate();
  ExperimentReport report;
  report.seed = cfg.seed;
  report.config_hash = config_hash(cfg);
  report.episodes = cfg.episodes;

  const auto perception = build_perception(cfg);
  const auto pipeline_cfg = cfg.pipeline_config();
  for (const auto& name : cfg.conditions) {
    const Personality persona = build_personality(cfg.parse_personality(name), cfg);
    PolicyModel agent = policy;
    std::vector<EpisodeResult> results;
    results.reserve(cfg.episodes);
    for (std::size_t i = 0; i < cfg.episodes; ++i) {
      auto respondent = make_respondent(cfg);
      AffectivePipeline pipeline(perception, Decoder::identity(), persona.time, persona.social, pipeline_cfg);
      results.push_back(run_episode(agent, *respondent, pipeline, cfg.game, derive_seed(cfg.seed, streams::kEpisodes, i)));
    }
    report.conditions.push_back(summarize(name, results));
    if (episodes_out) episodes_out->push_back(std::move(results));
  }

  for (std::size_t i = 0; i < report.conditions.size(); ++i) {
    for (std::size_t j = i + 1; j < report.conditions.size(); ++j) {
      const auto& a = report.conditions[i];
      const auto& b = report.conditions[j];
      PairComparison p;
      p.a = a.name;
      p.b = b.name;
      if (a.interactions.size() >= 2) {
        try {
          p.hedges_g_interactions = hedges_g(a.interactions, b.interactions);
        } catch (const DomainError&) {
          // zero variance in both conditions: effect size undefined
        }
      }
      const auto mw = mann_whitney_u(a.interactions, b.interactions);
      p.mann_whitney_u = mw.u;
      p.mann_whitney_p = mw.p;
      report.comparisons.push_back(p);
    }
  }
  return report;
}

// ---- replay study

const ReplayComparison& ReplayStudy::find(const std::string& condition, const std::string& dimension) const {
  for (const auto& c : comparisons) {
    if (c.condition == condition && c.dimension == dimension) return c;
  }
  throw DomainError("replay study: no comparison for " + condition + "/" + dimension);
}

AffectTrace replay_trace(const Config& cfg) {
  if (!cfg.replay_trace.empty()) return load_trace(cfg.replay_trace);
  return synth_replay_trace(cfg.replay_ticks, derive_seed(cfg.seed, streams::kReplay));
}

ReplayStudy replay_mood_study(const AffectTrace& trace, const std::vector<PersonalityConfig>& conditions,
                              const Config& cfg) {
  if (conditions.empty()) throw DomainError("replay study: no conditions");
  if (trace.frames.empty()) throw DomainError("replay study: empty trace");
  const auto perception = trace.dim == 2 ? build_perception(cfg) : nullptr;
  const auto pipeline_cfg = cfg.pipeline_config();

  ReplayStudy study;
  study.ticks = trace.frames.size();
  std::size_t reference = 0;
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (!conditions[i].has_time() && !conditions[i].has_conditioning()) {
      reference = i;
      break;
    }
  }

  for (const auto& p : conditions) {
    const Personality persona = build_personality(p, cfg);
    AffectivePipeline pipeline(perception, Decoder::identity(), persona.time, persona.social, pipeline_cfg);
    ReplayCondition rc;
    rc.name = p.name();
    for (const auto& f : trace.frames) {
      const auto snap = pipeline.perceive(f);
      rc.arousal.push_back(snap.mean.arousal());
      rc.valence.push_back(snap.mean.valence());
    }
    study.conditions.push_back(std::move(rc));
  }

  const auto& ref = study.conditions[reference];
  for (std::size_t i = 0; i < study.conditions.size(); ++i) {
    if (i == reference) continue;
    const auto& c = study.conditions[i];
    for (const std::string dim : {"arousal", "valence"}) {
      const auto& x = dim == "arousal" ? c.arousal : c.valence;
      const auto& y = dim == "arousal" ? ref.arousal : ref.valence;
      ReplayComparison cmp;
      cmp.condition = c.name;
      cmp.reference = ref.name;
      cmp.dimension = dim;
      const auto two = mann_whitney_u(x, y, Alternative::TwoSided);
      cmp.u = two.u;
      cmp.p_two_sided = two.p;
      cmp.p_greater = mann_whitney_u(x, y, Alternative::Greater).p;
      cmp.p_less = mann_whitney_u(x, y, Alternative::Less).p;
      cmp.median_shift = median(x) - median(y);
      study.comparisons.push_back(cmp);
    }
  }
  return study;
}

Json to_json(const ReplayStudy& s) {
  Json conds = Json::array();
  for (const auto& c : s.conditions) {
    conds.push_back({{"name", c.name},
                     {"mean_arousal", mean(c.arousal)},
                     {"mean_valence", mean(c.valence)},
                     {"arousal", c.arousal},
                     {"valence", c.valence}});
  }
  Json comps = Json::array();
  for (const auto& c : s.comparisons) {
    comps.push_back({{"condition", c.condition},
                     {"reference", c.reference},
                     {"dimension", c.dimension},
                     {"u", c.u},
                     {"p_two_sided", c.p_two_sided},
                     {"p_greater", c.p_greater},
                     {"p_less", c.p_less},
                     {"median_shift", c.median_shift}});
  }
  return {{"kind", "replay-mood"}, {"ticks", s.ticks}, {"conditions", conds}, {"comparisons", comps}};
}

// ---- analysis

Json analyze_report(const Json& report) {
  try {
    const std::string kind = report.at("kind").get<std::string>();
    Json out = {{"kind", kind + "-analysis"}};
    Json boxes = Json::array();
    Json tests = Json::array();
    if (kind == "experiment") {
      std::vector<std::pair<std::string, std::vector<double>>> series;
      for (const auto& c : report.at("conditions")) {
        const auto name = c.at("name").get<std::string>();
        auto inter = c.at("raw").at("interactions").get<std::vector<double>>();
        auto fin = c.at("raw").at("final_offer").get<std::vector<double>>();
        boxes.push_back({{"condition", name}, {"metric", "interactions"}, {"box", box(inter)}});
        boxes.push_back({{"condition", name}, {"metric", "final_offer"}, {"box", box(fin)}});
        series.emplace_back(name, std::move(inter));
      }
      for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = i + 1; j < series.size(); ++j) {
          const auto mw = mann_whitney_u(series[i].second, series[j].second);
          Json g = nullptr;
          try {
            g = hedges_g(series[i].second, series[j].second);
          } catch (const DomainError&) {
          }
          tests.push_back({{"a", series[i].first},
                           {"b", series[j].first},
                           {"metric", "interactions"},
                           {"u", mw.u},
                           {"p", mw.p},
                           {"exact", mw.exact},
                           {"hedges_g", g}});
        }
      }
    } else if (kind == "replay-mood") {
      for (const auto& c : report.at("conditions")) {
        const auto name = c.at("name").get<std::string>();
        boxes.push_back({{"condition", name}, {"metric", "arousal"}, {"box", box(c.at("arousal").get<std::vector<double>>())}});
        boxes.push_back({{"condition", name}, {"metric", "valence"}, {"box", box(c.at("valence").get<std::vector<double>>())}});
      }
      tests = report.at("comparisons");
    } else {
      throw DomainError("analyze: unknown report kind '" + kind + "'");
    }
    out["boxes"] = boxes;
    out["tests"] = tests;
    return out;
  } catch (const Json::exception& e) {
    throw DomainError(std::string("analyze: malformed report: ") + e.what());
  }
}

std::string quantiles_csv(const Json& analysis) {
  std::ostringstream out;
  out.precision(17);
  out << "condition,metric,min,q1,median,q3,max,mean,n\n";
  for (const auto& b : analysis.at("boxes")) {
    const auto& q = b.at("box");
    if (q.is_null()) continue;
    out << b.at("condition").get<std::string>() << ',' << b.at("metric").get<std::string>() << ','
        << q.at("min").get<double>() << ',' << q.at("q1").get<double>() << ',' << q.at("median").get<double>() << ','
        << q.at("q3").get<double>() << ',' << q.at("max").get<double>() << ',' << q.at("mean").get<double>() << ','
        << q.at("n").get<std::size_t>() << '\n';
  }
  return out.str();
}

}  // namespace affnego
