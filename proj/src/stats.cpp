#include "affnego/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "affnego/errors.hpp"

namespace affnego {
namespace {

std::vector<double> pooled(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("mann-whitney: both samples must be non-empty");
  std::vector<double> x(a.begin(), a.end());
  x.insert(x.end(), b.begin(), b.end());
  for (const double v : x) {
    if (!std::isfinite(v)) throw DomainError("mann-whitney: non-finite observation");
  }
  return x;
}

double u_statistic(const std::vector<double>& ranks, std::size_t n1) {
  const double r1 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);
  return r1 - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
  }
  return "?";
}

Alternative parse_alternative(const std::string& s) {
  if (s == "two-sided") return Alternative::TwoSided;
  if (s == "greater") return Alternative::Greater;
  if (s == "less") return Alternative::Less;
  throw DomainError("unknown alternative '" + s + "'");
}

std::vector<double> midranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b, Alternative alt) {
  const auto x = pooled(a, b);
  const auto ranks = midranks(x);
  const std::size_t n1 = a.size(), n = x.size();

  // Midranks are multiples of 1/2; work with doubled ranks as integers.
  std::vector<std::size_t> r2(n);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
    total += r2[i];
  }
  std::size_t observed = 0;
  for (std::size_t i = 0; i < n1; ++i) observed += r2[i];

  // count[k][s]: subsets of size k with doubled rank sum s.
  std::vector<std::vector<double>> count(n1 + 1, std::vector<double>(total + 1, 0.0));
  count[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = std::min(i + 1, n1); k >= 1; --k) {
      auto& dst = count[k];
      const auto& src = count[k - 1];
      for (std::size_t s = total; s >= r2[i]; --s) {
        if (src[s - r2[i]] != 0.0) dst[s] += src[s - r2[i]];
        if (s == r2[i]) break;
      }
    }
  }

  // Compare in doubled units: 2U = 2R - n1(n1+1); centre 2 mu = n1 n2.
  const auto n1l = static_cast<long long>(n1);
  const long long centre = n1l * static_cast<long long>(n - n1);
  const long long offset = n1l * (n1l + 1);
  const long long u_obs = static_cast<long long>(observed) - offset;
  double hit = 0.0, all = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    const double c = count[n1][s];
    if (c == 0.0) continue;
    all += c;
    const long long u = static_cast<long long>(s) - offset;
    bool extreme = false;
    switch (alt) {
      case Alternative::TwoSided: extreme = std::llabs(u - centre) >= std::llabs(u_obs - centre); break;
      case Alternative::Greater: extreme = u >= u_obs; break;
      case Alternative::Less: extreme = u <= u_obs; break;
    }
    if (extreme) hit += c;
  }
  return std::min(1.0, hit / all);
}

double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b, Alternative alt) {
  const auto x = pooled(a, b);
  const auto ranks = midranks(x);
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  const double u = u_statistic(ranks, a.size());
  const double mu = n1 * n2 / 2.0;

  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double sd = std::sqrt(var);

  switch (alt) {
    case Alternative::TwoSided: {
      const double z = std::max(0.0, std::abs(u - mu) - 0.5) / sd;
      return std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
    }
    case Alternative::Greater: return 1.0 - normal_cdf((u - mu - 0.5) / sd);
    case Alternative::Less: return normal_cdf((u - mu + 0.5) / sd);
  }
  return 1.0;
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alt,
                                 std::size_t exact_limit) {
  const auto x = pooled(a, b);
  MannWhitneyResult r;
  r.u = u_statistic(midranks(x), a.size());
  r.exact = a.size() * b.size() <= exact_limit;
  r.p = r.exact ? mann_whitney_exact_p(a, b, alt) : mann_whitney_normal_p(a, b, alt);
  return r;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("variance needs at least two observations");
  const double m = mean(x);
  double ss = 0.0;
  for (const double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

double hedges_g(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DomainError("hedges_g: each sample needs at least two observations");
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  const double df = n1 + n2 - 2.0;
  const double pooled_var = ((n1 - 1.0) * sample_variance(a) + (n2 - 1.0) * sample_variance(b)) / df;
  if (!(pooled_var > 0.0)) throw DomainError("hedges_g: zero pooled variance");
  const double j = 1.0 - 3.0 / (4.0 * df - 1.0);
  return (mean(a) - mean(b)) / std::sqrt(pooled_var) * j;
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw DomainError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q outside [0, 1]");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

}  // namespace affnego
