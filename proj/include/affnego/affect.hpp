#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace affnego {

/// A point in the arousal-valence plane. Both components are clamped into
/// [-1, 1] on construction, so every instance is a legal affect state.
class ArousalValence {
 public:
  constexpr ArousalValence() = default;
  ArousalValence(double arousal, double valence);

  double arousal() const { return arousal_; }
  double valence() const { return valence_; }

  ArousalValence operator+(const ArousalValence& o) const;
  ArousalValence operator-(const ArousalValence& o) const;
  ArousalValence operator*(double s) const;

  bool operator==(const ArousalValence&) const = default;

 private:
  double arousal_ = 0.0;
  double valence_ = 0.0;
};

/// True when both components already lie in [-1, 1].
bool in_affect_range(double arousal, double valence);

/// One perception tick (500 ms). `features` has the stream dimension; for a
/// 2-D stream it is exactly (arousal, valence).
struct AffectFrame {
  std::size_t step = 0;
  std::vector<double> features;
  ArousalValence av;

  static AffectFrame from_affect(std::size_t step, ArousalValence av);
};

/// Split of the 100 points. Only the human share is stored; the robot share
/// is derived, so the split always sums to the total.
class Offer {
 public:
  static constexpr double kTotal = 100.0;

  Offer() = default;
  static Offer from_human(double human_points);
  static Offer from_robot(double robot_points);

  double human_points() const { return human_; }
  double robot_points() const { return kTotal - human_; }
  double human_fraction() const { return human_ / kTotal; }
  double robot_fraction() const { return robot_points() / kTotal; }

  // Display helpers; shares are kept as reals internally.
  long rounded_human() const;
  long rounded_robot() const;

  bool operator==(const Offer&) const = default;

 private:
  explicit Offer(double human) : human_(human) {}
  double human_ = 0.0;
};

enum class TimePerception { None, Patient, Impatient, Custom };
enum class Conditioning { None, Excitatory, Inhibitory };

inline constexpr double kPatientTau = 0.01;
inline constexpr double kImpatientTau = 0.08;

struct PersonalityConfig {
  TimePerception time = TimePerception::None;
  double tau = 0.0;  // meaningful only when time != None
  Conditioning conditioning = Conditioning::None;

  static PersonalityConfig none() { return {}; }
  static PersonalityConfig make(TimePerception time, Conditioning conditioning,
                                double custom_tau = 0.0);

  bool has_time() const { return time != TimePerception::None; }
  bool has_conditioning() const { return conditioning != Conditioning::None; }

  // Canonical short name, e.g. "patient-high", "impatient-low", "baseline".
  std::string name() const;
  // Accepts the names produced by name() plus "none"/"baseline", single traits
  // ("patient", "excitatory", ...) and combinations joined by '-' or '+'.
  static PersonalityConfig parse(const std::string& text, double patient_tau = kPatientTau,
                                 double impatient_tau = kImpatientTau);

  bool operator==(const PersonalityConfig&) const = default;
};

std::string to_string(TimePerception t);
std::string to_string(Conditioning c);

double clamp_unit(double v);

double euclidean_sq(std::span<const double> a, std::span<const double> b);
double cosine_distance(std::span<const double> a, std::span<const double> b);
ArousalValence mean_av(std::span<const ArousalValence> points);

}  // namespace affnego
