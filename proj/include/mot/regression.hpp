#pragma once

// Least-squares lines and log-log exponent fits with a scene-level bootstrap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mot/errors.hpp"
#include "mot/rng.hpp"

namespace mot {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw domain_error("line fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0) throw domain_error("line fit with a degenerate abscissa");
  return {sxy / sxx, my - sxy / sxx * mx};
}

struct ExponentEstimate {
  double slope = 0;
  double std_error = 0;
  double intercept = 0;
  std::vector<double> grid;
  std::vector<double> means;  // per grid point
  std::size_t n_samples = 0;
};

struct GridRequirements {
  std::size_t min_samples = 1;
  std::size_t min_scales = 4;
  double min_decades = 1.0;
};

inline void check_grid(const std::vector<double>& grid, const GridRequirements& req) {
  if (grid.size() < req.min_scales) throw domain_error("grid needs at least " + std::to_string(req.min_scales) + " scales");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0)) throw domain_error("grid points must be positive");
    if (k && !(grid[k] > grid[k - 1])) throw domain_error("grid must be increasing");
  }
  if (std::log10(grid.back() / grid.front()) < req.min_decades - 1e-12) {
    throw domain_error("grid spans fewer than " + std::to_string(req.min_decades) + " decades");
  }
}

namespace detail {

// Column means over the chosen rows; NaN marks a missing observation.
inline std::vector<double> column_means(const std::vector<std::vector<double>>& v,
                                        const std::vector<std::size_t>& rows, std::size_t cols) {
  std::vector<double> sum(cols, 0.0);
  std::vector<std::size_t> cnt(cols, 0);
  for (std::size_t r : rows) {
    for (std::size_t g = 0; g < cols; ++g) {
      if (std::isnan(v[r][g])) continue;
      sum[g] += v[r][g];
      ++cnt[g];
    }
  }
  for (std::size_t g = 0; g < cols; ++g) {
    sum[g] = cnt[g] ? sum[g] / static_cast<double>(cnt[g]) : std::numeric_limits<double>::quiet_NaN();
  }
  return sum;
}

inline double loglog_slope(const std::vector<double>& grid, const std::vector<double>& means,
                           double* intercept = nullptr) {
  std::vector<double> x, y;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!(means[g] > 0)) continue;
    x.push_back(std::log(grid[g]));
    y.push_back(std::log(means[g]));
  }
  const LinearFit f = fit_line(x, y);
  if (intercept) *intercept = f.intercept;
  return f.slope;
}

}  // namespace detail

// values[s][g] is a nonnegative observation of sample s at grid point g.
// Slope of log mean against log grid; the stderr is the spread of the slope
// over B resamples of whole samples.
inline ExponentEstimate loglog_exponent(const std::vector<std::vector<double>>& values,
                                        const std::vector<double>& grid, const GridRequirements& req,
                                        std::uint64_t seed, int bootstrap = 200) {
  check_grid(grid, req);
  if (values.size() < req.min_samples) {
    throw domain_error("need at least " + std::to_string(req.min_samples) + " samples, got " +
                       std::to_string(values.size()));
  }
  for (const auto& row : values) {
    if (row.size() != grid.size()) throw domain_error("sample row does not match the grid");
  }
  ExponentEstimate e;
  e.grid = grid;
  e.n_samples = values.size();
  std::vector<std::size_t> all(values.size());
  std::iota(all.begin(), all.end(), 0);
  e.means = detail::column_means(values, all, grid.size());
  e.slope = detail::loglog_slope(grid, e.means, &e.intercept);
  if (bootstrap > 1) {
    double s1 = 0, s2 = 0;
    std::vector<std::size_t> rows(values.size());
    for (int b = 0; b < bootstrap; ++b) {
      Rng rng = make_rng(seed, Stream::kBootstrap, static_cast<std::uint64_t>(b));
      for (auto& r : rows) r = static_cast<std::size_t>(rng() % values.size());
      const double s = detail::loglog_slope(grid, detail::column_means(values, rows, grid.size()));
      s1 += s;
      s2 += s * s;
    }
    const double m = s1 / bootstrap;
    e.std_error = std::sqrt(std::max(0.0, (s2 - bootstrap * m * m) / (bootstrap - 1)));
  }
  return e;
}

}  // namespace mot
