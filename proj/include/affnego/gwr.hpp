#pragma once

// Growing-When-Required network over a D-dimensional feature space. Serves as
// the perception prototype layer and as the lockstep reference for the
// recurrent variant in gamma_gwr.hpp.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "affnego/affect.hpp"
#include "affnego/topology.hpp"

namespace affnego {

struct GwrParams {
  double insertion_threshold = 0.5;    // a_T
  double habituation_threshold = 0.2;  // h_T
  int max_edge_age = 50;
  double eps_b = 0.1;  // winner learning rate
  double eps_n = 0.01;  // neighbour learning rate
  double tau_b = 0.3;
  double tau_n = 0.1;
  double kappa = 1.05;
  double eta_floor = 1e-3;

  void validate() const;

  // Table rows used by the affective stack.
  static GwrParams perception();
  static GwrParams affective_memory();
  static GwrParams core();
  static GwrParams mood();
};

/// Habituation after one firing: eta + tau*kappa*(1 - eta) - tau, floored and
/// never above the previous value.
double habituate(double eta, double tau, double kappa, double floor);

/// exp(-sqrt(d)) for a squared (or recurrent) distance d.
double activation_from_distance(double d);

struct BmuHit {
  std::size_t index;
  double distance;
};

struct StepReport {
  std::size_t bmu = 0;
  std::size_t second = 0;
  bool inserted = false;
  std::optional<std::size_t> new_neuron;
  double activation = 0.0;
  double bmu_habituation = 1.0;  // before this step's habituation
  std::size_t neurons_after = 0;
};

/// Affine map from feature space to the affect plane, clamped on output.
class Decoder {
 public:
  static Decoder identity();  // D = 2
  static Decoder zero(std::size_t dim);
  // row-major 2 x dim matrix; row 0 -> arousal, row 1 -> valence
  static Decoder affine(std::size_t dim, std::vector<double> matrix, std::array<double, 2> bias);

  std::size_t dim() const { return dim_; }
  ArousalValence apply(std::span<const double> x) const;

 private:
  Decoder(std::size_t dim, std::vector<double> m, std::array<double, 2> b)
      : dim_(dim), matrix_(std::move(m)), bias_(b) {}
  std::size_t dim_;
  std::vector<double> matrix_;
  std::array<double, 2> bias_;
};

class GwrNetwork {
 public:
  GwrNetwork(std::size_t dim, GwrParams params);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return habituation_.size(); }
  const GwrParams& params() const { return params_; }
  const Topology& topology() const { return topology_; }

  std::span<const double> weight(std::size_t i) const;
  double habituation(std::size_t i) const;

  // Seeding and snapshot restore. New neurons start with the given habituation.
  std::size_t add_neuron(std::span<const double> w, double eta = 1.0);
  void connect(std::size_t a, std::size_t b, int age);

  // Seeds two neurons from the first two distinct samples (duplicating the
  // first when every sample is identical). Requires an empty network.
  void seed(std::span<const std::vector<double>> samples);

  std::vector<BmuHit> find_bmus(std::span<const double> x, std::size_t n) const;
  StepReport train_step(std::span<const double> x);
  // Seeds while fewer than two neurons exist, then trains.
  std::optional<StepReport> learn(std::span<const double> x);

  ArousalValence decode(std::size_t i, const Decoder& decoder) const;
  // Euclidean distance from x to its best matching unit.
  double quantization_error(std::span<const double> x) const;

 private:
  void check_dim(std::span<const double> x) const;
  void remove_isolated(std::size_t protect);

  std::size_t dim_;
  GwrParams params_;
  std::vector<double> weights_;  // size() x dim_, row-major
  std::vector<double> habituation_;
  Topology topology_;
};

struct GwrFitResult {
  GwrNetwork network;
  std::vector<double> quantization_error;  // mean per epoch
  std::vector<std::size_t> insertions;     // per epoch
};

GwrFitResult fit(GwrNetwork net, std::span<const AffectFrame> stream, int epochs);

}  // namespace affnego
