#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace affnego {

enum class Alternative { TwoSided, Greater, Less };

std::string to_string(Alternative a);
Alternative parse_alternative(const std::string& s);

struct MannWhitneyResult {
  double u = 0.0;  // U of the first sample
  double p = 1.0;
  bool exact = false;
};

/// Midranks (1-based) of the pooled sample a ++ b.
std::vector<double> midranks(std::span<const double> pooled);

/// U from rank sums; exact permutation p when n1 * n2 <= exact_limit,
/// otherwise the tie-corrected normal approximation with continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 Alternative alt = Alternative::TwoSided, std::size_t exact_limit = 400);

/// Exact permutation p over all C(n1+n2, n1) reassignments of the observed midranks.
double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b, Alternative alt);

double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b, Alternative alt);

/// Bias-corrected standardized mean difference.
double hedges_g(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> x);
double sample_variance(std::span<const double> x);
double standard_error(std::span<const double> x);
// Linear-interpolation quantile (q in [0, 1]).
double quantile(std::vector<double> x, double q);

}  // namespace affnego
