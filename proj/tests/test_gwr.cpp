#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"

#include "affnego/errors.hpp"
#include "affnego/gwr.hpp"
#include "affnego/snapshot.hpp"

using namespace affnego;

namespace {

using Pt = std::array<double, 2>;

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain, counter-clockwise.
std::vector<Pt> hull(std::vector<Pt> p) {
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<Pt> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i - 1]) <= 0) --k;
    h[k++] = p[i - 1];
  }
  h.resize(k - 1);
  return h;
}

bool inside(const std::vector<Pt>& h, const Pt& q, double tol = 1e-12) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (cross(h[i], h[(i + 1) % h.size()], q) < -tol) return false;
  }
  return true;
}

std::vector<AffectFrame> cluster_stream(std::size_t n, std::uint64_t seed, double radius) {
  const Pt centres[] = {{-0.5, -0.5}, {0.5, -0.5}, {0.0, 0.6}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<AffectFrame> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centres[i % 3];
    const double r = radius * std::sqrt(u(rng));
    const double th = 2.0 * M_PI * u(rng);
    out.push_back(AffectFrame::from_affect(i, {c[0] + r * std::cos(th), c[1] + r * std::sin(th)}));
  }
  return out;
}

GwrNetwork two_neuron(GwrParams p = {}) {
  GwrNetwork net(2, p);
  net.add_neuron(std::vector<double>{0.0, 0.0});
  net.add_neuron(std::vector<double>{1.0, 1.0});
  return net;
}

}  // namespace

TEST_CASE("find_bmus orders by distance and breaks ties by index") {
  auto net = two_neuron();
  auto hits = net.find_bmus(std::vector<double>{0.1, 0.0}, 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].index == 0);
  CHECK(hits[0].distance == doctest::Approx(0.01));

  hits = net.find_bmus(std::vector<double>{0.5, 0.5}, 2);
  CHECK(hits[0].index == 0);
  CHECK(hits[1].index == 1);
  CHECK(hits[0].distance == doctest::Approx(0.5));
  CHECK(hits[1].distance == doctest::Approx(0.5));

  CHECK_THROWS_AS(net.find_bmus(std::vector<double>{0.0, 0.0, 0.0}, 1), DimensionError);
  CHECK_THROWS_AS(net.find_bmus(std::vector<double>{0.0, 0.0}, 3), DomainError);
}

TEST_CASE("find_bmus matches an exhaustive sort") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    GwrNetwork net(3, {});
    for (int i = 0; i < 10; ++i) net.add_neuron(std::vector<double>{u(rng), u(rng), u(rng)});
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < net.size(); ++i) {
      double d = 0.0;
      for (int k = 0; k < 3; ++k) d += (net.weight(i)[k] - x[k]) * (net.weight(i)[k] - x[k]);
      all.push_back({d, i});
    }
    std::sort(all.begin(), all.end());
    const auto hits = net.find_bmus(x, 2);
    CHECK(hits[0].index == all[0].second);
    CHECK(hits[1].index == all[1].second);
  }
}

TEST_CASE("winner update and habituation by hand") {
  GwrParams p;
  p.eps_b = 0.3;
  p.eps_n = 0.01;
  p.insertion_threshold = 0.1;  // exp(-1) = 0.37 stays above: no insertion
  GwrNetwork net(2, p);
  net.add_neuron(std::vector<double>{0.0, 0.0});
  net.add_neuron(std::vector<double>{-1.0, -1.0});
  const auto r = net.train_step(std::vector<double>{1.0, 0.0});
  CHECK_FALSE(r.inserted);
  CHECK(r.bmu == 0);
  CHECK(net.weight(0)[0] == doctest::Approx(0.3));
  CHECK(net.weight(0)[1] == 0.0);
  // eta = 1: the first habituation term vanishes, so eta drops by tau_b
  CHECK(net.habituation(0) == doctest::Approx(1.0 - 0.3));
  CHECK(habituate(1.0, 0.3, 1.05, 1e-3) == doctest::Approx(0.7));
  CHECK(habituate(0.7, 0.3, 1.05, 1e-3) == doctest::Approx(0.7 - 0.2055));
  // fixed point of the rule at 1 - 1/kappa; below it eta is held, never raised
  double eta = 1.0;
  for (int i = 0; i < 200; ++i) eta = habituate(eta, 0.3, 1.05, 1e-3);
  CHECK(eta == doctest::Approx(1.0 - 1.0 / 1.05).epsilon(1e-9));
  CHECK(habituate(0.002, 0.3, 1.05, 1e-3) == 0.002);
  CHECK(habituate(0.5, 0.3, 0.5, 0.3) == 0.3);  // 0.275 floored
  CHECK(activation_from_distance(1.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("an input on an existing weight changes nothing but habituation") {
  auto net = two_neuron(GwrParams::perception());
  const auto r = net.train_step(std::vector<double>{1.0, 1.0});
  CHECK_FALSE(r.inserted);
  CHECK(r.bmu == 1);
  CHECK(net.weight(1)[0] == 1.0);
  CHECK(net.weight(1)[1] == 1.0);
  CHECK(r.activation == 1.0);
}

TEST_CASE("insertion places the new neuron halfway and rewires") {
  GwrParams p = GwrParams::perception();
  auto net = two_neuron(p);
  // habituate neuron 0 below h_T first
  for (int i = 0; i < 20; ++i) net.train_step(std::vector<double>{0.0, 0.0});
  REQUIRE(net.habituation(0) < p.habituation_threshold);
  const auto r = net.train_step(std::vector<double>{-1.0, 0.0});
  REQUIRE(r.inserted);
  REQUIRE(r.new_neuron.has_value());
  const auto w = net.weight(*r.new_neuron);
  CHECK(w[0] == doctest::Approx(-0.5));
  CHECK(w[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(net.topology().connected(*r.new_neuron, r.bmu));
  CHECK(net.topology().connected(*r.new_neuron, r.second));
  CHECK_FALSE(net.topology().connected(r.bmu, r.second));
}

TEST_CASE("step invariants over a random stream") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 0.5);
  GwrParams p = GwrParams::perception();
  p.max_edge_age = 8;
  GwrNetwork net(2, p);
  std::vector<Pt> seen;
  std::vector<std::vector<double>> first;
  for (int i = 0; i < 2; ++i) {
    first.push_back({std::clamp(n(rng), -1.0, 1.0), std::clamp(n(rng), -1.0, 1.0)});
    seen.push_back({first.back()[0], first.back()[1]});
  }
  net.seed(first);
  REQUIRE(net.size() == 2);

  for (int step = 0; step < 2000; ++step) {
    const std::vector<double> x{std::clamp(n(rng), -1.0, 1.0), std::clamp(n(rng), -1.0, 1.0)};
    seen.push_back({x[0], x[1]});
    const auto before_eta = [&] {
      std::vector<double> e;
      for (std::size_t i = 0; i < net.size(); ++i) e.push_back(net.habituation(i));
      return e;
    }();
    const std::size_t before = net.size();
    const auto bmu_before = net.find_bmus(x, 1).front();

    const auto r = net.train_step(x);

    // growth gating
    CHECK(r.inserted == (r.activation < p.insertion_threshold && r.bmu_habituation < p.habituation_threshold));
    CHECK(r.activation == doctest::Approx(std::exp(-std::sqrt(bmu_before.distance))));
    const bool removed = net.size() != before + (r.inserted ? 1 : 0);
    if (!r.inserted && bmu_before.distance > 0.0) {
      double d = 0.0;
      for (int k = 0; k < 2; ++k) d += (net.weight(r.bmu)[k] - x[k]) * (net.weight(r.bmu)[k] - x[k]);
      CHECK(d < bmu_before.distance);
    }
    if (!removed) {
      for (std::size_t i = 0; i < before; ++i) CHECK(net.habituation(i) <= before_eta[i]);
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
      CHECK(net.habituation(i) > 0.0);
      CHECK(net.habituation(i) <= 1.0);
    }
    for (const auto& [key, age] : net.topology().edges()) CHECK(age <= p.max_edge_age);
    CHECK(net.size() >= 2);
  }
  // no neuron without edges after a prune pass (the winner always has one)
  CHECK(net.topology().isolated(net.size()).empty());

  const auto h = hull(seen);
  for (std::size_t i = 0; i < net.size(); ++i) CHECK(inside(h, {net.weight(i)[0], net.weight(i)[1]}));
}

TEST_CASE("fit on three clusters") {
  const double radius = 0.3;
  const auto stream = cluster_stream(300, 4, radius);
  auto res = fit(GwrNetwork(2, GwrParams::perception()), stream, 50);
  CHECK(res.network.size() >= 3);
  CHECK(res.network.size() <= 30);
  CHECK(res.quantization_error.size() == 50);
  CHECK(res.quantization_error.back() < radius);

  // Lloyd's k-means from the true centres: the attainable error is well below the radius
  std::array<Pt, 3> c{Pt{-0.5, -0.5}, Pt{0.5, -0.5}, Pt{0.0, 0.6}};
  double kmeans_err = 0.0;
  for (int it = 0; it < 20; ++it) {
    std::array<Pt, 3> sum{};
    std::array<int, 3> cnt{};
    kmeans_err = 0.0;
    for (const auto& f : stream) {
      int best = 0;
      double bd = 1e9;
      for (int k = 0; k < 3; ++k) {
        const double d = std::hypot(f.features[0] - c[k][0], f.features[1] - c[k][1]);
        if (d < bd) bd = d, best = k;
      }
      kmeans_err += bd;
      sum[best][0] += f.features[0];
      sum[best][1] += f.features[1];
      ++cnt[best];
    }
    kmeans_err /= static_cast<double>(stream.size());
    for (int k = 0; k < 3; ++k) c[k] = {sum[k][0] / cnt[k], sum[k][1] / cnt[k]};
  }
  CHECK(kmeans_err < radius);
  // stationary stream: growth stops before the epoch budget runs out
  CHECK(res.insertions.back() == 0);
  CHECK(std::accumulate(res.insertions.begin() + 25, res.insertions.end(), std::size_t{0}) == 0);
}

TEST_CASE("a single repeated point never grows the network") {
  std::vector<AffectFrame> stream(100, AffectFrame::from_affect(0, {0.2, -0.3}));
  for (std::size_t i = 0; i < stream.size(); ++i) stream[i].step = i;
  const auto res = fit(GwrNetwork(2, GwrParams::perception()), stream, 5);
  CHECK(res.network.size() == 2);
  CHECK_THROWS_AS(fit(GwrNetwork(2, {}), std::vector<AffectFrame>{}, 1), DomainError);
}

TEST_CASE("decoders") {
  auto net = two_neuron();
  net.add_neuron(std::vector<double>{0.3, -0.2});
  CHECK(net.decode(2, Decoder::identity()) == ArousalValence(0.3, -0.2));
  CHECK(net.decode(2, Decoder::zero(2)) == ArousalValence(0.0, 0.0));
  CHECK_THROWS_AS(net.decode(7, Decoder::identity()), DomainError);

  GwrNetwork wide(4, {});
  wide.add_neuron(std::vector<double>{1, 0, 0, 1});
  const auto pairs = Decoder::affine(4, {0.5, 0.5, 0, 0, 0, 0, 0.5, 0.5}, {0, 0});
  CHECK(wide.decode(0, pairs) == ArousalValence(0.5, 0.5));
  CHECK_THROWS_AS(Decoder::affine(4, {1, 2, 3}, {0, 0}), DimensionError);
}

TEST_CASE("seeding") {
  GwrNetwork net(2, {});
  const std::vector<std::vector<double>> same{{0.1, 0.1}, {0.1, 0.1}, {0.4, 0.0}};
  net.seed(same);
  CHECK(net.size() == 2);
  CHECK(net.weight(1)[0] == 0.4);
  CHECK_THROWS_AS(net.seed(same), StateError);
  CHECK_THROWS_AS(GwrNetwork(2, {}).train_step(std::vector<double>{0, 0}), StateError);

  GwrNetwork l(2, {});
  CHECK_FALSE(l.learn(std::vector<double>{0.5, 0.5}).has_value());
  CHECK_FALSE(l.learn(std::vector<double>{0.5, 0.5}).has_value());
  CHECK(l.size() == 1);
  CHECK_FALSE(l.learn(std::vector<double>{0.0, 0.5}).has_value());
  CHECK(l.size() == 2);
  CHECK(l.learn(std::vector<double>{0.0, 0.5}).has_value());
}

TEST_CASE("parameter validation") {
  GwrParams p;
  p.eps_n = 0.5;
  p.eps_b = 0.1;
  CHECK_THROWS_AS(GwrNetwork(2, p), ConfigError);
  p = {};
  p.insertion_threshold = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("snapshot round trip is bit-exact") {
  const auto stream = cluster_stream(200, 8, 0.2);
  const auto res = fit(GwrNetwork(2, GwrParams::perception()), stream, 3);
  const Json j = to_json(res.network);
  const auto back = gwr_from_json(Json::parse(j.dump()));
  REQUIRE(back.size() == res.network.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.weight(i)[0] == res.network.weight(i)[0]);
    CHECK(back.weight(i)[1] == res.network.weight(i)[1]);
    CHECK(back.habituation(i) == res.network.habituation(i));
  }
  CHECK(back.topology().edges() == res.network.topology().edges());
  CHECK(to_json(back).dump() == j.dump());
}
