#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "affnego/errors.hpp"
#include "affnego/stats.hpp"
#include "oracles.hpp"

using namespace affnego;

namespace {

Alternative to_alt(oracle::Tail t) {
  return t == oracle::Tail::Two ? Alternative::TwoSided
                                : (t == oracle::Tail::Greater ? Alternative::Greater : Alternative::Less);
}

}  // namespace

TEST_CASE("midranks") {
  const std::vector<double> x{1, 2, 2, 3};
  CHECK(midranks(x) == std::vector<double>{1, 2.5, 2.5, 4});
  const std::vector<double> y{5, 5, 5};
  CHECK(midranks(y) == std::vector<double>{2, 2, 2});
  const std::vector<double> z{3, 1, 2};
  CHECK(midranks(z) == std::vector<double>{3, 1, 2});
}

TEST_CASE("mann whitney small examples") {
  const std::vector<double> a{1, 2}, b{3, 4};
  const auto r = mann_whitney_u(a, b);
  CHECK(r.u == 0.0);
  CHECK(r.exact);
  CHECK(r.p == doctest::Approx(1.0 / 3.0));
  CHECK(mann_whitney_u(a, b, Alternative::Less).p == doctest::Approx(1.0 / 6.0));
  CHECK(mann_whitney_u(a, b, Alternative::Greater).p == doctest::Approx(1.0));
  CHECK(mann_whitney_u(b, a).u == 4.0);

  const std::vector<double> same{2, 2, 2};
  CHECK(mann_whitney_u(same, same).p == 1.0);
  CHECK(mann_whitney_u(same, same).u == 4.5);
}

TEST_CASE("exact p matches full enumeration") {
  std::mt19937_64 rng(21);
  int cases = 0;
  for (std::size_t n1 = 1; n1 <= 8; ++n1) {
    for (std::size_t n2 = 1; n1 + n2 <= 14; ++n2) {
      for (int rep = 0; rep < 2; ++rep) {
        const auto a = oracle::tied_sample(n1, rng, 5, rep);
        const auto b = oracle::tied_sample(n2, rng, 5, 0);
        CHECK(mann_whitney_u(a, b).u == oracle::pairwise_u(a, b));
        for (auto t : {oracle::Tail::Two, oracle::Tail::Greater, oracle::Tail::Less}) {
          CHECK(mann_whitney_exact_p(a, b, to_alt(t)) == doctest::Approx(oracle::permutation_p(a, b, t)).epsilon(1e-12));
        }
        ++cases;
      }
    }
  }
  CHECK(cases > 100);
}

TEST_CASE("exact p at the size limit agrees with sampled permutations") {
  std::mt19937_64 rng(3);
  for (auto [n1, n2] : {std::pair<std::size_t, std::size_t>{20, 20}, {10, 40}, {25, 16}}) {
    CHECK(n1 * n2 <= 400);
    auto a = oracle::tied_sample(n1, rng, 12, 1);
    auto b = oracle::tied_sample(n2, rng, 12, 0);
    const auto r = mann_whitney_u(a, b, Alternative::TwoSided);
    CHECK(r.exact);
    const double draws = 40000;
    const double mc = oracle::sampled_permutation_p(a, b, oracle::Tail::Two, 40000, 5);
    const double sigma = std::sqrt(std::max(mc * (1 - mc), 1e-4) / draws);
    CHECK(std::abs(r.p - mc) <= 4 * sigma);
  }
}

TEST_CASE("normal approximation tracks the exact p") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = oracle::tied_sample(15, rng, 30, rep % 4);
    const auto b = oracle::tied_sample(15, rng, 30, 0);
    for (auto alt : {Alternative::TwoSided, Alternative::Greater, Alternative::Less}) {
      CHECK(std::abs(mann_whitney_normal_p(a, b, alt) - mann_whitney_exact_p(a, b, alt)) < 0.02);
    }
  }
  std::vector<double> big_a(30), big_b(30);
  for (int i = 0; i < 30; ++i) {
    big_a[i] = i;
    big_b[i] = i + 5;
  }
  CHECK_FALSE(mann_whitney_u(big_a, big_b).exact);
  CHECK(mann_whitney_u(big_a, big_b, Alternative::TwoSided, 10000).exact);
}

TEST_CASE("hedges g") {
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  CHECK(hedges_g(a, b) == doctest::Approx(-0.8));
  CHECK(hedges_g(b, a) == doctest::Approx(0.8));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(12), y(9);
  for (auto& v : x) v = n(rng);
  for (auto& v : y) v = n(rng) + 0.5;
  CHECK(hedges_g(x, y) == doctest::Approx(-hedges_g(y, x)));
  const std::vector<double> flat{1, 1, 1};
  CHECK_THROWS_AS(hedges_g(flat, flat), DomainError);
  const std::vector<double> one{1};
  CHECK_THROWS_AS(hedges_g(one, a), DomainError);
}

TEST_CASE("descriptive statistics") {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(x) == 5.0);
  CHECK(sample_variance(x) == doctest::Approx(32.0 / 7.0));
  CHECK(standard_error(x) == doctest::Approx(std::sqrt(32.0 / 7.0 / 8.0)));
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(quantile({1, 2, 3, 4}, 1.0) == 4.0);
  CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
  CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
  CHECK_THROWS_AS(mean(std::vector<double>{}), DomainError);
  CHECK(parse_alternative(to_string(Alternative::Greater)) == Alternative::Greater);
}
