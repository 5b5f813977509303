#pragma once

// Classical test statistics used by the harness: Pearson chi-squared, the
// two-sample Kolmogorov-Smirnov test, and the Jonckheere-Terpstra trend test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "mot/errors.hpp"

namespace mot {

struct TestResult {
  double statistic = 0;
  double p_value = 1;
};

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

inline double chi_square_sf(double x, double dof) {
  if (!(dof > 0)) throw domain_error("chi-squared needs positive degrees of freedom");
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

// Goodness of fit of observed counts against expected probabilities.
inline TestResult chi_square_test(std::span<const std::uint64_t> observed,
                                  std::span<const double> probabilities) {
  if (observed.size() != probabilities.size() || observed.size() < 2) {
    throw domain_error("chi-squared needs matching count and probability vectors");
  }
  double total = 0;
  for (auto o : observed) total += static_cast<double>(o);
  double stat = 0;
  std::size_t cells = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const double e = total * probabilities[k];
    if (e <= 0) {
      if (observed[k] > 0) return {INFINITY, 0.0};
      continue;
    }
    const double d = static_cast<double>(observed[k]) - e;
    stat += d * d / e;
    ++cells;
  }
  return {stat, chi_square_sf(stat, static_cast<double>(cells - 1))};
}

inline TestResult chi_square_uniform(std::span<const std::uint64_t> observed) {
  std::vector<double> p(observed.size(), 1.0 / static_cast<double>(observed.size()));
  return chi_square_test(observed, p);
}

// Asymptotic Kolmogorov distribution, P[K > lambda].
inline double kolmogorov_sf(double lambda) {
  if (lambda <= 0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Two-sample KS test with the Stephens small-sample correction.
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw domain_error("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

// Jonckheere-Terpstra test for an increasing trend across ordered groups;
// one-sided normal approximation with the tie-free variance.
inline TestResult jonckheere_increasing(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw domain_error("trend test needs at least two groups");
  double j_stat = 0;
  double n_total = 0, sum_sq = 0, sum_var = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double ng = static_cast<double>(groups[g].size());
    if (ng == 0) throw domain_error("trend test group is empty");
    n_total += ng;
    sum_sq += ng * ng;
    sum_var += ng * ng * (2 * ng + 3);
    for (std::size_t h = g + 1; h < groups.size(); ++h) {
      for (double x : groups[g]) {
        for (double y : groups[h]) {
          if (x < y) j_stat += 1;
          else if (x == y) j_stat += 0.5;
        }
      }
    }
  }
  const double mean = (n_total * n_total - sum_sq) / 4.0;
  const double var = (n_total * n_total * (2 * n_total + 3) - sum_var) / 72.0;
  const double z = (j_stat - mean) / std::sqrt(var);
  return {z, normal_sf(z)};
}

}  // namespace mot
