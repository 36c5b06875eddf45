#include "affnego/gamma_gwr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "affnego/errors.hpp"
#include "affnego/kernels.hpp"

namespace affnego {

GammaGwrParams GammaGwrParams::with_order(GwrParams base, std::size_t k, double beta) {
  GammaGwrParams p;
  p.base = base;
  p.context_order = k;
  p.beta = beta;
  if (k == 0) {
    p.alpha_w = 1.0;
    return p;
  }
  p.alpha_w = 0.5;
  const double norm = 1.0 - std::ldexp(1.0, -static_cast<int>(k));
  for (std::size_t i = 1; i <= k; ++i) {
    p.alpha_k.push_back(0.5 * std::ldexp(1.0, -static_cast<int>(i)) / norm);
  }
  return p;
}

void GammaGwrParams::validate() const {
  base.validate();
  if (alpha_k.size() != context_order) throw ConfigError("gamma-gwr: need one alpha per context");
  if (!(alpha_w > 0.0 && alpha_w <= 1.0)) throw ConfigError("gamma-gwr: alpha_w must be in (0,1]");
  for (std::size_t k = 0; k < alpha_k.size(); ++k) {
    if (!(alpha_k[k] > 0.0)) throw ConfigError("gamma-gwr: alpha_k must be positive");
    if (k > 0 && alpha_k[k] > alpha_k[k - 1]) throw ConfigError("gamma-gwr: alpha_k must be non-increasing");
  }
  const double total = std::accumulate(alpha_k.begin(), alpha_k.end(), alpha_w);
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("gamma-gwr: modulation weights must sum to 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("gamma-gwr: beta must be in (0,1]");
}

GammaGwrNetwork::GammaGwrNetwork(std::size_t dim, GammaGwrParams params)
    : dim_(dim), params_(std::move(params)) {
  if (dim == 0) throw DimensionError("gamma-gwr: zero dimension");
  params_.validate();
  global_.assign(params_.context_order * dim_, 0.0);
}

void GammaGwrNetwork::set_params(GammaGwrParams params) {
  if (params.context_order != params_.context_order) {
    throw ConfigError("gamma-gwr: context order is fixed for a network");
  }
  params.validate();
  params_ = std::move(params);
}

void GammaGwrNetwork::check_dim(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw DimensionError("gamma-gwr: input dimension " + std::to_string(x.size()) + ", network " +
                         std::to_string(dim_));
  }
}

std::span<const double> GammaGwrNetwork::weight(std::size_t i) const {
  if (i >= size()) throw DomainError("gamma-gwr: neuron index out of range");
  return std::span<const double>(weights_).subspan(i * dim_, dim_);
}

std::span<double> GammaGwrNetwork::weight_mut(std::size_t i) {
  return std::span<double>(weights_).subspan(i * dim_, dim_);
}

std::span<const double> GammaGwrNetwork::context(std::size_t i, std::size_t k) const {
  if (i >= size() || k < 1 || k > order()) throw DomainError("gamma-gwr: context index out of range");
  return std::span<const double>(contexts_).subspan((i * order() + (k - 1)) * dim_, dim_);
}

std::span<double> GammaGwrNetwork::context_mut(std::size_t i, std::size_t k) {
  return std::span<double>(contexts_).subspan((i * order() + (k - 1)) * dim_, dim_);
}

std::span<const double> GammaGwrNetwork::global_context(std::size_t k) const {
  if (k < 1 || k > order()) throw DomainError("gamma-gwr: global context index out of range");
  return std::span<const double>(global_).subspan((k - 1) * dim_, dim_);
}

double GammaGwrNetwork::habituation(std::size_t i) const {
  if (i >= size()) throw DomainError("gamma-gwr: neuron index out of range");
  return habituation_[i];
}

std::size_t GammaGwrNetwork::add_neuron(std::span<const double> w, double eta) {
  check_dim(w);
  weights_.insert(weights_.end(), w.begin(), w.end());
  contexts_.insert(contexts_.end(), order() * dim_, 0.0);
  habituation_.push_back(eta);
  return size() - 1;
}

void GammaGwrNetwork::set_weight(std::size_t i, std::span<const double> w) {
  check_dim(w);
  if (i >= size()) throw DomainError("gamma-gwr: neuron index out of range");
  std::copy(w.begin(), w.end(), weight_mut(i).begin());
}

void GammaGwrNetwork::set_context(std::size_t i, std::size_t k, std::span<const double> c) {
  check_dim(c);
  if (i >= size() || k < 1 || k > order()) throw DomainError("gamma-gwr: context index out of range");
  std::copy(c.begin(), c.end(), context_mut(i, k).begin());
}

void GammaGwrNetwork::set_global_context(std::size_t k, std::span<const double> c) {
  check_dim(c);
  if (k < 1 || k > order()) throw DomainError("gamma-gwr: global context index out of range");
  std::copy(c.begin(), c.end(), global_.begin() + static_cast<std::ptrdiff_t>((k - 1) * dim_));
}

void GammaGwrNetwork::set_habituation(std::size_t i, double eta) {
  if (i >= size()) throw DomainError("gamma-gwr: neuron index out of range");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("gamma-gwr: habituation must be in (0,1]");
  habituation_[i] = eta;
}

void GammaGwrNetwork::set_prev_bmu(std::optional<std::size_t> b) {
  if (b && *b >= size()) throw DomainError("gamma-gwr: previous winner out of range");
  prev_bmu_ = b;
}

void GammaGwrNetwork::connect(std::size_t a, std::size_t b, int age) {
  if (a >= size() || b >= size()) throw DomainError("gamma-gwr: edge endpoint out of range");
  topology_.connect(a, b, age);
}

void GammaGwrNetwork::seed(std::span<const std::vector<double>> samples) {
  if (size() != 0) throw StateError("gamma-gwr: seed requires an empty network");
  if (samples.empty()) throw DomainError("gamma-gwr: cannot seed from an empty stream");
  add_neuron(samples.front());
  for (const auto& s : samples) {
    check_dim(s);
    if (s != samples.front()) {
      add_neuron(s);
      return;
    }
  }
  add_neuron(samples.front());
}

double GammaGwrNetwork::recurrent_distance(std::span<const double> x, std::size_t i) const {
  check_dim(x);
  double d = params_.alpha_w * simd::squared_distance(x, weight(i));
  for (std::size_t k = 1; k <= order(); ++k) {
    d += params_.alpha_k[k - 1] * simd::squared_distance(global_context(k), context(i, k));
  }
  return d;
}

void GammaGwrNetwork::update_global_context() {
  if (!prev_bmu_ || order() == 0) return;
  const std::size_t b = *prev_bmu_;
  const double beta = params_.beta;
  const auto w = weight(b);
  for (std::size_t k = 1; k <= order(); ++k) {
    const auto prev = k == 1 ? w : context(b, k - 1);
    auto out = std::span<double>(global_).subspan((k - 1) * dim_, dim_);
    for (std::size_t j = 0; j < dim_; ++j) out[j] = beta * w[j] + (1.0 - beta) * prev[j];
  }
}

std::vector<BmuHit> GammaGwrNetwork::find_bmus(std::span<const double> x, std::size_t n) const {
  check_dim(x);
  if (n == 0 || n > size()) throw DomainError("gamma-gwr: requested more winners than neurons");
  std::vector<BmuHit> hits(size());
  for (std::size_t i = 0; i < size(); ++i) hits[i] = {i, recurrent_distance(x, i)};
  const auto by_distance = [](const BmuHit& a, const BmuHit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), by_distance);
  hits.resize(n);
  return hits;
}

StepReport GammaGwrNetwork::train_step(std::span<const double> x) {
  check_dim(x);
  if (size() < 2) throw StateError("gamma-gwr: train_step needs at least two neurons");

  update_global_context();

  const auto hits = find_bmus(x, 2);
  const std::size_t b = hits[0].index;
  const std::size_t s = hits[1].index;

  StepReport report;
  report.bmu = b;
  report.second = s;
  report.activation = activation_from_distance(hits[0].distance);
  report.bmu_habituation = habituation_[b];

  topology_.age_edges_of(b);
  topology_.connect(b, s, 0);

  const GwrParams& gp = params_.base;
  std::optional<std::size_t> inserted;
  if (report.activation < gp.insertion_threshold && habituation_[b] < gp.habituation_threshold) {
    std::vector<double> w(weight(b).begin(), weight(b).end());
    for (std::size_t j = 0; j < dim_; ++j) w[j] = 0.5 * (w[j] + x[j]);
    const std::size_t r = add_neuron(w);
    for (std::size_t k = 1; k <= order(); ++k) {
      auto cr = context_mut(r, k);
      const auto cb = context(b, k);
      const auto ck = global_context(k);
      for (std::size_t j = 0; j < dim_; ++j) cr[j] = 0.5 * (cb[j] + ck[j]);
    }
    topology_.disconnect(b, s);
    topology_.connect(r, b, 0);
    topology_.connect(r, s, 0);
    inserted = r;
  } else {
    const auto adapt = [&](std::size_t i, double rate) {
      simd::move_toward(weight_mut(i), x, rate);
      for (std::size_t k = 1; k <= order(); ++k) simd::move_toward(context_mut(i, k), global_context(k), rate);
    };
    adapt(b, gp.eps_b * habituation_[b]);
    for (const std::size_t n : topology_.neighbors(b)) adapt(n, gp.eps_n * habituation_[n]);
  }

  habituation_[b] = habituate(habituation_[b], gp.tau_b, gp.kappa, gp.eta_floor);
  for (const std::size_t n : topology_.neighbors(b)) {
    if (inserted && n == *inserted) continue;
    habituation_[n] = habituate(habituation_[n], gp.tau_n, gp.kappa, gp.eta_floor);
  }

  topology_.prune_edges(gp.max_edge_age);
  const auto removed = topology_.isolated(size());
  const auto shift = [&removed](std::size_t i) {
    return i - static_cast<std::size_t>(std::lower_bound(removed.begin(), removed.end(), i) - removed.begin());
  };
  prev_bmu_ = b;
  remove_isolated();

  report.bmu = shift(b);
  report.second = shift(s);
  report.inserted = inserted.has_value();
  if (inserted) report.new_neuron = shift(*inserted);
  report.neurons_after = size();
  return report;
}

void GammaGwrNetwork::remove_isolated() {
  const auto gone = topology_.isolated(size());
  for (auto it = gone.rbegin(); it != gone.rend(); ++it) {
    const std::size_t n = *it;
    const auto i = static_cast<std::ptrdiff_t>(n);
    const auto d = static_cast<std::ptrdiff_t>(dim_);
    const auto kd = static_cast<std::ptrdiff_t>(order() * dim_);
    weights_.erase(weights_.begin() + i * d, weights_.begin() + (i + 1) * d);
    contexts_.erase(contexts_.begin() + i * kd, contexts_.begin() + (i + 1) * kd);
    habituation_.erase(habituation_.begin() + i);
    topology_.remove_neuron(n);
    if (prev_bmu_) {
      if (*prev_bmu_ == n) prev_bmu_.reset();
      else if (*prev_bmu_ > n) prev_bmu_ = *prev_bmu_ - 1;
    }
  }
}

std::optional<StepReport> GammaGwrNetwork::learn(std::span<const double> x) {
  check_dim(x);
  if (size() >= 2) return train_step(x);
  if (size() == 0 || !std::equal(x.begin(), x.end(), weight(0).begin())) add_neuron(x);
  return std::nullopt;
}

DecodedBmus GammaGwrNetwork::bmus_decoded(std::span<const double> x, std::size_t n,
                                          const Decoder& decoder) const {
  if (n == 0) throw DomainError("gamma-gwr: need at least one winner");
  if (size() == 0) throw StateError("gamma-gwr: empty network");
  DecodedBmus out;
  out.shortfall = n > size();
  for (const auto& hit : find_bmus(x, std::min(n, size()))) out.points.push_back(decoder.apply(weight(hit.index)));
  return out;
}

ArousalValence GammaGwrNetwork::decode(std::size_t i, const Decoder& decoder) const {
  if (i >= size()) throw DomainError("gamma-gwr: decode index out of range");
  return decoder.apply(weight(i));
}

ArousalValence GammaGwrNetwork::mean_decoded(const Decoder& decoder) const {
  if (size() == 0) throw StateError("gamma-gwr: empty network");
  std::vector<ArousalValence> points;
  points.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) points.push_back(decoder.apply(weight(i)));
  return mean_av(points);
}

}  // namespace affnego
