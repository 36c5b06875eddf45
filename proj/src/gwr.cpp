#include "affnego/gwr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "affnego/errors.hpp"
#include "affnego/kernels.hpp"

namespace affnego {

void GwrParams::validate() const {
  auto unit_open = [](double v) { return v > 0.0 && v < 1.0; };
  if (!unit_open(insertion_threshold)) throw ConfigError("insertion threshold must be in (0,1)");
  if (!unit_open(habituation_threshold)) throw ConfigError("habituation threshold must be in (0,1)");
  if (max_edge_age < 1) throw ConfigError("max edge age must be positive");
  if (!unit_open(eps_b) || !unit_open(eps_n)) throw ConfigError("learning rates must be in (0,1)");
  if (eps_n > eps_b) throw ConfigError("neighbour rate must not exceed winner rate");
  if (!(tau_b > 0.0) || !(tau_n > 0.0)) throw ConfigError("habituation constants must be positive");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!unit_open(eta_floor)) throw ConfigError("habituation floor must be in (0,1)");
}

GwrParams GwrParams::perception() {
  GwrParams p;
  p.habituation_threshold = 0.2;
  p.insertion_threshold = 0.5;
  p.max_edge_age = 50;
  return p;
}

GwrParams GwrParams::affective_memory() {
  GwrParams p;
  p.habituation_threshold = 0.5;
  p.insertion_threshold = 0.8;
  p.max_edge_age = 5;
  return p;
}

GwrParams GwrParams::core() {
  GwrParams p;
  p.habituation_threshold = 0.5;
  p.insertion_threshold = 0.9;
  p.max_edge_age = 5;
  return p;
}

GwrParams GwrParams::mood() { return core(); }

double habituate(double eta, double tau, double kappa, double floor) {
  const double next = eta + tau * kappa * (1.0 - eta) - tau;
  return std::min(eta, std::max(floor, next));
}

double activation_from_distance(double d) { return std::exp(-std::sqrt(std::max(0.0, d))); }

Decoder Decoder::identity() { return Decoder(2, {1.0, 0.0, 0.0, 1.0}, {0.0, 0.0}); }

Decoder Decoder::zero(std::size_t dim) { return Decoder(dim, std::vector<double>(2 * dim, 0.0), {0.0, 0.0}); }

Decoder Decoder::affine(std::size_t dim, std::vector<double> matrix, std::array<double, 2> bias) {
  if (matrix.size() != 2 * dim) throw DimensionError("decoder matrix must be 2 x dim");
  return Decoder(dim, std::move(matrix), bias);
}

ArousalValence Decoder::apply(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionError("decoder: dimension mismatch");
  const std::span<const double> m(matrix_);
  return {bias_[0] + simd::dot(m.subspan(0, dim_), x), bias_[1] + simd::dot(m.subspan(dim_, dim_), x)};
}

GwrNetwork::GwrNetwork(std::size_t dim, GwrParams params) : dim_(dim), params_(params) {
  if (dim == 0) throw DimensionError("gwr: zero dimension");
  params_.validate();
}

std::span<const double> GwrNetwork::weight(std::size_t i) const {
  if (i >= size()) throw DomainError("gwr: neuron index out of range");
  return std::span<const double>(weights_).subspan(i * dim_, dim_);
}

double GwrNetwork::habituation(std::size_t i) const {
  if (i >= size()) throw DomainError("gwr: neuron index out of range");
  return habituation_[i];
}

void GwrNetwork::check_dim(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw DimensionError("gwr: input dimension " + std::to_string(x.size()) + ", network " +
                         std::to_string(dim_));
  }
}

std::size_t GwrNetwork::add_neuron(std::span<const double> w, double eta) {
  check_dim(w);
  weights_.insert(weights_.end(), w.begin(), w.end());
  habituation_.push_back(eta);
  return size() - 1;
}

void GwrNetwork::connect(std::size_t a, std::size_t b, int age) {
  if (a >= size() || b >= size()) throw DomainError("gwr: edge endpoint out of range");
  topology_.connect(a, b, age);
}

void GwrNetwork::seed(std::span<const std::vector<double>> samples) {
  if (size() != 0) throw StateError("gwr: seed requires an empty network");
  if (samples.empty()) throw DomainError("gwr: cannot seed from an empty stream");
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

std::vector<BmuHit> GwrNetwork::find_bmus(std::span<const double> x, std::size_t n) const {
  check_dim(x);
  if (n == 0 || n > size()) throw DomainError("gwr: requested more winners than neurons");
  std::vector<BmuHit> hits(size());
  for (std::size_t i = 0; i < size(); ++i) hits[i] = {i, simd::squared_distance(weight(i), x)};
  const auto by_distance = [](const BmuHit& a, const BmuHit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), by_distance);
  hits.resize(n);
  return hits;
}

StepReport GwrNetwork::train_step(std::span<const double> x) {
  check_dim(x);
  if (size() < 2) throw StateError("gwr: train_step needs at least two neurons");

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

  std::optional<std::size_t> inserted;
  if (report.activation < params_.insertion_threshold &&
      habituation_[b] < params_.habituation_threshold) {
    std::vector<double> w(weight(b).begin(), weight(b).end());
    for (std::size_t k = 0; k < dim_; ++k) w[k] = 0.5 * (w[k] + x[k]);
    const std::size_t r = add_neuron(w);
    topology_.disconnect(b, s);
    topology_.connect(r, b, 0);
    topology_.connect(r, s, 0);
    inserted = r;
  } else {
    const auto row = [this](std::size_t i) { return std::span<double>(weights_).subspan(i * dim_, dim_); };
    simd::move_toward(row(b), x, params_.eps_b * habituation_[b]);
    for (const std::size_t n : topology_.neighbors(b)) {
      simd::move_toward(row(n), x, params_.eps_n * habituation_[n]);
    }
  }

  habituation_[b] = habituate(habituation_[b], params_.tau_b, params_.kappa, params_.eta_floor);
  for (const std::size_t n : topology_.neighbors(b)) {
    if (inserted && n == *inserted) continue;
    habituation_[n] = habituate(habituation_[n], params_.tau_n, params_.kappa, params_.eta_floor);
  }

  topology_.prune_edges(params_.max_edge_age);
  const auto removed = topology_.isolated(size());
  const auto shift = [&removed](std::size_t i) {
    return i - static_cast<std::size_t>(std::lower_bound(removed.begin(), removed.end(), i) - removed.begin());
  };
  remove_isolated(b);

  report.bmu = shift(b);
  report.second = shift(s);
  report.inserted = inserted.has_value();
  if (inserted) report.new_neuron = shift(*inserted);
  report.neurons_after = size();
  return report;
}

void GwrNetwork::remove_isolated(std::size_t protect) {
  const auto gone = topology_.isolated(size());
  for (auto it = gone.rbegin(); it != gone.rend(); ++it) {
    if (*it == protect) continue;
    const auto i = static_cast<std::ptrdiff_t>(*it);
    const auto d = static_cast<std::ptrdiff_t>(dim_);
    weights_.erase(weights_.begin() + i * d, weights_.begin() + (i + 1) * d);
    habituation_.erase(habituation_.begin() + i);
    topology_.remove_neuron(*it);
  }
}

std::optional<StepReport> GwrNetwork::learn(std::span<const double> x) {
  check_dim(x);
  if (size() >= 2) return train_step(x);
  if (size() == 0 || !std::equal(x.begin(), x.end(), weight(0).begin())) add_neuron(x);
  return std::nullopt;
}

ArousalValence GwrNetwork::decode(std::size_t i, const Decoder& decoder) const {
  if (i >= size()) throw DomainError("gwr: decode index out of range");
  return decoder.apply(weight(i));
}

double GwrNetwork::quantization_error(std::span<const double> x) const {
  return std::sqrt(find_bmus(x, 1).front().distance);
}

GwrFitResult fit(GwrNetwork net, std::span<const AffectFrame> stream, int epochs) {
  if (stream.empty()) throw DomainError("gwr fit: empty stream");
  if (epochs < 1) throw DomainError("gwr fit: epochs must be positive");
  if (net.size() < 2) {
    if (net.size() != 0) throw StateError("gwr fit: partially seeded network");
    std::vector<std::vector<double>> samples;
    samples.reserve(stream.size());
    for (const auto& f : stream) samples.push_back(f.features);
    net.seed(samples);
  }
  GwrFitResult result{std::move(net), {}, {}};
  for (int e = 0; e < epochs; ++e) {
    std::size_t inserted = 0;
    for (const auto& f : stream) inserted += result.network.train_step(f.features).inserted ? 1 : 0;
    double err = 0.0;
    for (const auto& f : stream) err += result.network.quantization_error(f.features);
    result.quantization_error.push_back(err / static_cast<double>(stream.size()));
    result.insertions.push_back(inserted);
  }
  return result;
}

}  // namespace affnego
