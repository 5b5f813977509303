#pragma once

// Walks from the origin to the first exit of the Euclidean disk of radius r:
// loop-erased walk length, raw walk exit time, and a straight-path oracle.
// Exit content and its tail report live here too.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mot/errors.hpp"
#include "mot/lattice.hpp"
#include "mot/regression.hpp"
#include "mot/rng.hpp"

namespace mot {

enum class WalkKind { kLoopErased, kSimple, kStraight };

inline bool outside_disk(int x, int y, int r) {
  return static_cast<std::int64_t>(x) * x + static_cast<std::int64_t>(y) * y >=
         static_cast<std::int64_t>(r) * r;
}

// Edges of the loop erasure, the exit edge included.
inline std::size_t lerw_exit_length(int r, Rng& rng) {
  if (r < 1) throw domain_error("radius must be positive");
  const int side = 2 * r + 3;
  std::vector<std::int32_t> slot(static_cast<std::size_t>(side) * side, -1);
  std::vector<std::int32_t> path;
  auto cell = [&](int x, int y) { return static_cast<std::size_t>(y + r + 1) * side + (x + r + 1); };
  int x = 0, y = 0;
  path.push_back(static_cast<std::int32_t>(cell(0, 0)));
  slot[cell(0, 0)] = 0;
  DirectionSource dirs(rng);
  while (true) {
    const int d = dirs.next();
    x += kDx[d];
    y += kDy[d];
    if (outside_disk(x, y, r)) return path.size();
    const std::size_t c = cell(x, y);
    if (slot[c] >= 0) {
      const auto keep = static_cast<std::size_t>(slot[c]) + 1;
      for (std::size_t k = keep; k < path.size(); ++k) slot[path[k]] = -1;
      path.resize(keep);
    } else {
      slot[c] = static_cast<std::int32_t>(path.size());
      path.push_back(static_cast<std::int32_t>(c));
    }
  }
}

inline std::size_t srw_exit_time(int r, Rng& rng) {
  if (r < 1) throw domain_error("radius must be positive");
  DirectionSource dirs(rng);
  int x = 0, y = 0;
  std::size_t steps = 0;
  while (!outside_disk(x, y, r)) {
    const int d = dirs.next();
    x += kDx[d];
    y += kDy[d];
    ++steps;
  }
  return steps;
}

inline std::size_t straight_exit_length(int r) {
  if (r < 1) throw domain_error("radius must be positive");
  return static_cast<std::size_t>(r);
}

inline std::size_t walk_length(WalkKind kind, int r, Rng& rng) {
  switch (kind) {
    case WalkKind::kLoopErased: return lerw_exit_length(r, rng);
    case WalkKind::kSimple: return srw_exit_time(r, rng);
    case WalkKind::kStraight: return straight_exit_length(r);
  }
  throw domain_error("unknown walk kind");
}

// values[s][g]: walk s at radius g. Walks at different radii are independent,
// so bootstrap rows pair them arbitrarily.
inline std::vector<std::vector<double>> walk_length_table(WalkKind kind, const std::vector<int>& radii,
                                                          std::size_t per_radius, std::uint64_t seed) {
  std::vector<std::vector<double>> v(per_radius, std::vector<double>(radii.size()));
  for (std::size_t g = 0; g < radii.size(); ++g) {
    for (std::size_t s = 0; s < per_radius; ++s) {
      Rng rng = make_rng(seed, Stream::kLerw, (static_cast<std::uint64_t>(radii[g]) << 32) | s);
      v[s][g] = static_cast<double>(walk_length(kind, radii[g], rng));
    }
  }
  return v;
}

inline ExponentEstimate lerw_growth_exponent(const std::vector<int>& radii, std::size_t per_radius,
                                             std::uint64_t seed,
                                             WalkKind kind = WalkKind::kLoopErased, int bootstrap = 200) {
  std::vector<double> grid(radii.begin(), radii.end());
  check_grid(grid, {1, 4, 1.0});
  return loglog_exponent(walk_length_table(kind, radii, per_radius, seed), grid, {2, 4, 1.0}, seed,
                         bootstrap);
}

// Content of the walk to exit the unit disk on the lattice of mesh 1/r.
inline std::vector<double> exit_content_samples(int r, std::size_t count, std::uint64_t seed,
                                                double c_check = 1.0) {
  const double scale = c_check * std::pow(1.0 / r, 1.25);
  std::vector<double> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    Rng rng = make_rng(seed, Stream::kLerw, (static_cast<std::uint64_t>(r) << 32) | (s + (1ULL << 31)));
    out[s] = scale * static_cast<double>(lerw_exit_length(r, rng));
  }
  return out;
}

inline double upper_tail_fraction(const std::vector<double>& x, double m) {
  if (x.empty()) throw domain_error("tail of an empty sample");
  std::size_t c = 0;
  for (double v : x) c += v > m;
  return static_cast<double>(c) / static_cast<double>(x.size());
}

inline double lower_tail_fraction(const std::vector<double>& x, double m) {
  if (x.empty()) throw domain_error("tail of an empty sample");
  std::size_t c = 0;
  for (double v : x) c += v < 1.0 / m;
  return static_cast<double>(c) / static_cast<double>(x.size());
}

// log p = intercept + slope * u, chosen to sit on or above every fit point
// (the first half of the thresholds). The check is whether later points stay
// below. The upper tail uses the form 2 exp(-cM): intercept log 2, c as large
// as the fit points allow. The lower tail has a free constant, so it is a
// least-squares line lifted by its largest residual.
struct TailEnvelope {
  double intercept = 0;
  double slope = 0;
  bool dominated = false;
  std::size_t crossings = 0;
};

struct TailReport {
  std::vector<double> upper_M;
  std::vector<double> upper_log_p;  // log P[content > M]
  TailEnvelope upper;  // log 2 - c M
  std::vector<double> lower_M;
  std::vector<double> lower_log_p;  // log P[content < 1/M]
  TailEnvelope lower;               // linear in M^lower_exponent
  double lower_exponent = 0.7;
  std::size_t n_samples = 0;

  bool upper_ok() const { return upper.dominated && upper.slope < 0; }
  bool lower_ok() const { return lower.dominated && lower.slope < 0; }
};

namespace detail {

inline void count_crossings(TailEnvelope& e, const std::vector<double>& u,
                            const std::vector<double>& log_p, std::size_t from) {
  e.crossings = 0;
  for (std::size_t k = from; k < u.size(); ++k) {
    if (log_p[k] > e.intercept + e.slope * u[k] + 1e-12) ++e.crossings;
  }
  e.dominated = e.crossings == 0;
}

inline void first_half(const std::vector<double>& u, const std::vector<double>& log_p,
                       std::vector<double>& fx, std::vector<double>& fy) {
  for (std::size_t k = 0; k < u.size() / 2; ++k) {
    if (std::isfinite(log_p[k])) {
      fx.push_back(u[k]);
      fy.push_back(log_p[k]);
    }
  }
  if (fx.size() < 2) throw domain_error("tail envelope needs two finite fit points");
}

inline TailEnvelope fit_lifted_envelope(const std::vector<double>& u, const std::vector<double>& log_p) {
  std::vector<double> fx, fy;
  first_half(u, log_p, fx, fy);
  TailEnvelope e;
  const LinearFit f = fit_line(fx, fy);
  e.slope = f.slope;
  double lift = 0;
  for (std::size_t k = 0; k < fx.size(); ++k) lift = std::max(lift, fy[k] - (f.intercept + f.slope * fx[k]));
  e.intercept = f.intercept + lift;
  count_crossings(e, u, log_p, u.size() / 2);
  return e;
}

inline TailEnvelope fit_anchored_envelope(const std::vector<double>& u, const std::vector<double>& log_p,
                                          double intercept) {
  std::vector<double> fx, fy;
  first_half(u, log_p, fx, fy);
  TailEnvelope e;
  e.intercept = intercept;
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < fx.size(); ++k) {
    if (!(fx[k] > 0)) throw domain_error("anchored envelope needs positive thresholds");
    c = std::min(c, (intercept - fy[k]) / fx[k]);
  }
  e.slope = -c;
  count_crossings(e, u, log_p, u.size() / 2);
  return e;
}

inline double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= x.size()) return x.back();
  return x[k] + (pos - static_cast<double>(k)) * (x[k + 1] - x[k]);
}

}  // namespace detail

// Thresholds run from the median out to where `min_tail` observations remain,
// evenly spaced in M for the upper tail and in M^exponent for the lower one.
inline TailReport content_tail_report(const std::vector<double>& content, int thresholds = 12,
                                      std::size_t min_tail = 20, double lower_exponent = 0.7) {
  if (content.size() < 4 * min_tail) throw domain_error("too few content samples for a tail report");
  if (thresholds < 4) throw domain_error("tail report needs at least four thresholds");
  TailReport t;
  t.n_samples = content.size();
  t.lower_exponent = lower_exponent;
  const double n = static_cast<double>(content.size());
  const double med = detail::quantile(content, 0.5);
  const double hi = detail::quantile(content, 1.0 - static_cast<double>(min_tail) / n);
  const double lo = detail::quantile(content, static_cast<double>(min_tail) / n);
  if (!(hi > med) || !(lo > 0) || !(med > lo)) throw domain_error("content sample is degenerate");
  std::vector<double> u_up, u_lo;
  const double a = std::pow(1.0 / med, lower_exponent), b = std::pow(1.0 / lo, lower_exponent);
  for (int k = 0; k < thresholds; ++k) {
    const double w = static_cast<double>(k) / (thresholds - 1);
    const double m = med + w * (hi - med);
    t.upper_M.push_back(m);
    t.upper_log_p.push_back(std::log(upper_tail_fraction(content, m)));
    u_up.push_back(m);
    const double ul = a + w * (b - a);
    const double ml = std::pow(ul, 1.0 / lower_exponent);
    t.lower_M.push_back(ml);
    t.lower_log_p.push_back(std::log(lower_tail_fraction(content, ml)));
    u_lo.push_back(ul);
  }
  t.upper = detail::fit_anchored_envelope(u_up, t.upper_log_p, std::log(2.0));
  t.lower = detail::fit_lifted_envelope(u_lo, t.lower_log_p);
  return t;
}

}  // namespace mot
