#include "affnego/affect.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "affnego/errors.hpp"
#include "affnego/kernels.hpp"

namespace affnego {

double clamp_unit(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, -1.0, 1.0);
}

ArousalValence::ArousalValence(double arousal, double valence)
    : arousal_(clamp_unit(arousal)), valence_(clamp_unit(valence)) {}

ArousalValence ArousalValence::operator+(const ArousalValence& o) const {
  return {arousal_ + o.arousal_, valence_ + o.valence_};
}

ArousalValence ArousalValence::operator-(const ArousalValence& o) const {
  return {arousal_ - o.arousal_, valence_ - o.valence_};
}

ArousalValence ArousalValence::operator*(double s) const { return {arousal_ * s, valence_ * s}; }

bool in_affect_range(double arousal, double valence) {
  return arousal >= -1.0 && arousal <= 1.0 && valence >= -1.0 && valence <= 1.0;
}

AffectFrame AffectFrame::from_affect(std::size_t step, ArousalValence av) {
  return AffectFrame{step, {av.arousal(), av.valence()}, av};
}

Offer Offer::from_human(double human_points) {
  if (!(human_points >= 0.0 && human_points <= kTotal)) {
    throw DomainError("offer share out of [0, 100]: " + std::to_string(human_points));
  }
  return Offer(human_points);
}

Offer Offer::from_robot(double robot_points) {
  if (!(robot_points >= 0.0 && robot_points <= kTotal)) {
    throw DomainError("offer share out of [0, 100]: " + std::to_string(robot_points));
  }
  return Offer(kTotal - robot_points);
}

long Offer::rounded_human() const { return std::lround(human_); }
long Offer::rounded_robot() const { return std::lround(kTotal) - rounded_human(); }

PersonalityConfig PersonalityConfig::make(TimePerception time, Conditioning conditioning,
                                          double custom_tau) {
  PersonalityConfig p;
  p.time = time;
  p.conditioning = conditioning;
  switch (time) {
    case TimePerception::None: p.tau = 0.0; break;
    case TimePerception::Patient: p.tau = custom_tau > 0.0 ? custom_tau : kPatientTau; break;
    case TimePerception::Impatient: p.tau = custom_tau > 0.0 ? custom_tau : kImpatientTau; break;
    case TimePerception::Custom:
      if (!(custom_tau > 0.0)) throw DomainError("custom time perception needs tau > 0");
      p.tau = custom_tau;
      break;
  }
  return p;
}

std::string to_string(TimePerception t) {
  switch (t) {
    case TimePerception::None: return "none";
    case TimePerception::Patient: return "patient";
    case TimePerception::Impatient: return "impatient";
    case TimePerception::Custom: return "custom";
  }
  return "none";
}

std::string to_string(Conditioning c) {
  switch (c) {
    case Conditioning::None: return "none";
    case Conditioning::Excitatory: return "excitatory";
    case Conditioning::Inhibitory: return "inhibitory";
  }
  return "none";
}

std::string PersonalityConfig::name() const {
  if (!has_time() && !has_conditioning()) return "baseline";
  std::string out;
  if (has_time()) {
    if (time == TimePerception::Custom) {
      std::ostringstream os;
      os << "tau" << tau;
      out = os.str();
    } else {
      out = to_string(time);
    }
  }
  if (has_conditioning()) {
    if (out.empty()) return to_string(conditioning);
    out += conditioning == Conditioning::Excitatory ? "-high" : "-low";
  }
  return out;
}

PersonalityConfig PersonalityConfig::parse(const std::string& text, double patient_tau,
                                           double impatient_tau) {
  PersonalityConfig p;
  if (text == "none" || text == "baseline" || text.empty()) return p;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, text.find('+') != std::string::npos ? '+' : '-')) {
    if (token == "patient") {
      p.time = TimePerception::Patient;
      p.tau = patient_tau;
    } else if (token == "impatient") {
      p.time = TimePerception::Impatient;
      p.tau = impatient_tau;
    } else if (token.rfind("tau", 0) == 0 && token.size() > 3) {
      double tau = 0.0;
      try {
        tau = std::stod(token.substr(3));
      } catch (const std::exception&) {
        throw DomainError("bad custom tau in personality '" + text + "'");
      }
      p = make(TimePerception::Custom, p.conditioning, tau);
    } else if (token == "high" || token == "excitatory") {
      p.conditioning = Conditioning::Excitatory;
    } else if (token == "low" || token == "inhibitory") {
      p.conditioning = Conditioning::Inhibitory;
    } else if (token == "none" || token == "arousal") {
      // "high-arousal" style names
    } else {
      throw DomainError("unknown personality trait '" + token + "' in '" + text + "'");
    }
  }
  if (p.has_time() && !(p.tau > 0.0)) throw DomainError("time perception needs tau > 0");
  return p;
}

double euclidean_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("euclidean_sq: dimension mismatch " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  return simd::squared_distance(a, b);
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine_distance: dimension mismatch");
  const double na = std::sqrt(simd::dot(a, a));
  const double nb = std::sqrt(simd::dot(b, b));
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine_distance: zero-norm input");
  const double cos = std::clamp(simd::dot(a, b) / (na * nb), -1.0, 1.0);
  return 1.0 - cos;
}

ArousalValence mean_av(std::span<const ArousalValence> points) {
  if (points.empty()) throw DomainError("mean_av: empty list");
  double a = 0.0;
  double v = 0.0;
  for (const auto& p : points) {
    a += p.arousal();
    v += p.valence();
  }
  const auto n = static_cast<double>(points.size());
  return {a / n, v / n};
}

}  // namespace affnego
