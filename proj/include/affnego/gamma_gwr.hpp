#pragma once

// Recurrent Gamma-GWR: a GWR whose neurons carry K context descriptors fed by
// a recursive global context, so the winner depends on the recent input
// trajectory as well as on the current sample.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "affnego/affect.hpp"
#include "affnego/gwr.hpp"
#include "affnego/topology.hpp"

namespace affnego {

struct GammaGwrParams {
  GwrParams base;
  std::size_t context_order = 0;  // K
  double alpha_w = 1.0;
  std::vector<double> alpha_k;  // size K
  double beta = 0.7;

  /// Geometric, normalized modulation weights: alpha_w = 0.5 and
  /// alpha_k = 0.5 * 2^-k / (1 - 2^-K). With K = 0, alpha_w = 1.
  static GammaGwrParams with_order(GwrParams base, std::size_t k, double beta = 0.7);

  // Normalization (|alpha_w + sum alpha_k - 1| <= 1e-9), monotone alpha_k,
  // beta in (0, 1].
  void validate() const;
};

struct DecodedBmus {
  std::vector<ArousalValence> points;
  bool shortfall = false;  // fewer neurons than requested
};

class GammaGwrNetwork {
 public:
  GammaGwrNetwork(std::size_t dim, GammaGwrParams params);

  std::size_t dim() const { return dim_; }
  std::size_t order() const { return params_.context_order; }
  std::size_t size() const { return habituation_.size(); }
  const GammaGwrParams& params() const { return params_; }
  void set_params(GammaGwrParams params);
  const Topology& topology() const { return topology_; }

  std::span<const double> weight(std::size_t i) const;
  std::span<const double> context(std::size_t i, std::size_t k) const;  // k in [1, K]
  std::span<const double> global_context(std::size_t k) const;          // k in [1, K]
  double habituation(std::size_t i) const;
  std::optional<std::size_t> prev_bmu() const { return prev_bmu_; }

  // Restore / test hooks.
  std::size_t add_neuron(std::span<const double> w, double eta = 1.0);
  void set_weight(std::size_t i, std::span<const double> w);
  void set_context(std::size_t i, std::size_t k, std::span<const double> c);
  void set_global_context(std::size_t k, std::span<const double> c);
  void set_habituation(std::size_t i, double eta);
  void set_prev_bmu(std::optional<std::size_t> b);
  void connect(std::size_t a, std::size_t b, int age);

  void seed(std::span<const std::vector<double>> samples);

  double recurrent_distance(std::span<const double> x, std::size_t i) const;
  // C_k <- beta * w_prev + (1 - beta) * c_prev^{k-1}; no-op without a previous winner.
  void update_global_context();

  // Winners under the current global context (read-only).
  std::vector<BmuHit> find_bmus(std::span<const double> x, std::size_t n) const;
  StepReport train_step(std::span<const double> x);
  std::optional<StepReport> learn(std::span<const double> x);

  DecodedBmus bmus_decoded(std::span<const double> x, std::size_t n, const Decoder& decoder) const;
  ArousalValence decode(std::size_t i, const Decoder& decoder) const;
  ArousalValence mean_decoded(const Decoder& decoder) const;

 private:
  void check_dim(std::span<const double> x) const;
  std::span<double> weight_mut(std::size_t i);
  std::span<double> context_mut(std::size_t i, std::size_t k);
  void remove_isolated();

  std::size_t dim_;
  GammaGwrParams params_;
  std::vector<double> weights_;   // n x D
  std::vector<double> contexts_;  // n x K x D
  std::vector<double> habituation_;
  std::vector<double> global_;  // K x D
  std::optional<std::size_t> prev_bmu_;
  Topology topology_;
};

}  // namespace affnego
