#include "affnego/stimuli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace affnego {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_real(const std::string& cell, std::size_t row) {
  const std::string t = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw TraceParseError("trace line " + std::to_string(row) + ": not a number: '" + cell + "'");
  }
  return v;
}

std::size_t parse_step(const std::string& cell, std::size_t row) {
  const std::string t = trim(cell);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw TraceParseError("trace line " + std::to_string(row) + ": bad step '" + cell + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

AffectTrace parse_trace(std::istream& in, const std::string& source_id) {
  std::string line;
  if (!std::getline(in, line)) throw TraceParseError("trace: missing header");
  const auto header = split_csv(trim(line));
  if (header.size() < 3 || trim(header[0]) != "step" || trim(header[1]) != "arousal" || trim(header[2]) != "valence") {
    throw TraceParseError("trace: header must start with step,arousal,valence");
  }
  const std::size_t feature_cols = header.size() - 3;
  for (std::size_t i = 0; i < feature_cols; ++i) {
    if (trim(header[3 + i]) != "f" + std::to_string(i)) throw TraceParseError("trace: feature columns must be f0..fD-1");
  }
  if (feature_cols == 1) throw TraceParseError("trace: feature dimension must be at least 2");

  AffectTrace trace;
  trace.source_id = source_id;
  trace.dim = feature_cols == 0 ? 2 : feature_cols;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw TraceParseError("trace line " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                            " columns, got " + std::to_string(cells.size()));
    }
    AffectFrame f;
    f.step = parse_step(cells[0], row);
    const double a = parse_real(cells[1], row);
    const double v = parse_real(cells[2], row);
    if (!in_affect_range(a, v)) {
      throw TraceRangeError("trace line " + std::to_string(row) + ": arousal/valence outside [-1, 1]");
    }
    f.av = ArousalValence(a, v);
    if (feature_cols == 0) {
      f.features = {a, v};
    } else {
      for (std::size_t i = 0; i < feature_cols; ++i) f.features.push_back(parse_real(cells[3 + i], row));
    }
    if (!trace.frames.empty() && f.step <= trace.frames.back().step) {
      throw TraceOrderError("trace line " + std::to_string(row) + ": steps must be strictly increasing");
    }
    trace.frames.push_back(std::move(f));
  }
  return trace;
}

AffectTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceParseError("trace: cannot open " + path.string());
  return parse_trace(in, path.stem().string());
}

std::string format_trace(const AffectTrace& trace) {
  const bool plain = trace.dim == 2 && std::all_of(trace.frames.begin(), trace.frames.end(), [](const AffectFrame& f) {
                       return f.features.size() == 2 && f.features[0] == f.av.arousal() && f.features[1] == f.av.valence();
                     });
  std::string out = "step,arousal,valence";
  if (!plain) {
    for (std::size_t i = 0; i < trace.dim; ++i) out += ",f" + std::to_string(i);
  }
  out += '\n';
  for (const auto& f : trace.frames) {
    if (f.features.size() != trace.dim) throw DimensionError("trace: frame dimension differs from trace");
    out += std::to_string(f.step) + ',' + fmt(f.av.arousal()) + ',' + fmt(f.av.valence());
    if (!plain) {
      for (const double x : f.features) out += ',' + fmt(x);
    }
    out += '\n';
  }
  return out;
}

void save_trace(const AffectTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("trace: cannot write " + path.string());
  out << format_trace(trace);
}

AffectTrace trace_from_affect(const std::vector<ArousalValence>& points, const std::string& source_id) {
  AffectTrace t;
  t.source_id = source_id;
  for (std::size_t i = 0; i < points.size(); ++i) t.frames.push_back(AffectFrame::from_affect(i, points[i]));
  return t;
}

std::vector<ArousalValence> synth_random_states(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ArousalValence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::clamp(normal(rng), -1.0, 1.0);
    const double v = std::clamp(normal(rng), -1.0, 1.0);
    out.emplace_back(a, v);
  }
  return out;
}

AffectTrace synth_decay_trajectory(ArousalValence start, double tau, std::size_t steps) {
  if (steps < 1) throw DomainError("decay trajectory: steps must be >= 1");
  std::vector<ArousalValence> points;
  for (std::size_t t = 0; t < steps; ++t) points.push_back(start * std::exp(-tau * static_cast<double>(t)));
  return trace_from_affect(points, "decay");
}

std::vector<AffectFrame> synth_conditioning_stimuli(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<AffectFrame> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u(rng);
    const double v = u(rng);
    out.push_back(AffectFrame::from_affect(i, {a, v}));
  }
  return out;
}

AffectTrace synth_replay_trace(std::size_t ticks, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> level(0.35, 0.12);
  std::normal_distribution<double> spread(0.0, 0.06);
  std::normal_distribution<double> jitter(0.0, 0.08);
  std::uniform_int_distribution<int> length(8, 16);
  std::vector<ArousalValence> points;
  points.reserve(ticks);
  while (points.size() < ticks) {
    const double l = level(rng);
    const double ca = std::clamp(l + spread(rng), -0.9, 0.9);
    const double cv = std::clamp(l + spread(rng), -0.9, 0.9);
    const int len = length(rng);
    for (int i = 0; i < len && points.size() < ticks; ++i) {
      const double a = ca + jitter(rng);
      const double v = cv + jitter(rng);
      points.emplace_back(a, v);
    }
  }
  return trace_from_affect(points, "replay");
}

ArousalValence RespondentAffectModel::base(const Offer& offer, std::size_t consecutive_rejections) const {
  const double valence = 2.0 * offer.human_fraction() - 1.0;
  const double arousal = std::min(1.0, arousal_base + arousal_step * static_cast<double>(consecutive_rejections));
  return {arousal, valence};
}

std::vector<ArousalValence> RespondentAffectModel::express(const Offer& offer, std::size_t consecutive_rejections,
                                                           Rng& rng) const {
  const ArousalValence b = base(offer, consecutive_rejections);
  std::vector<ArousalValence> out;
  out.reserve(frames);
  if (noise > 0.0) {
    std::normal_distribution<double> n(0.0, noise);
    for (std::size_t i = 0; i < frames; ++i) {
      const double a = b.arousal() + n(rng);
      const double v = b.valence() + n(rng);
      out.emplace_back(a, v);
    }
  } else {
    out.assign(frames, b);
  }
  return out;
}

std::vector<ArousalValence> respondent_affect(const Offer& offer, std::size_t consecutive_rejections,
                                              std::uint64_t noise_seed, const RespondentAffectModel& model) {
  Rng rng(noise_seed);
  return model.express(offer, consecutive_rejections, rng);
}

}  // namespace affnego
