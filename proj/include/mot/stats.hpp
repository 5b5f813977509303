#pragma once

// Statistics over contour samples: scaling exponent, Hoelder constants across
// a mesh ladder, increment stationarity, the content/diameter bound on tree
// paths, and the running-maximum growth diagnostic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mot/contour.hpp"
#include "mot/errors.hpp"
#include "mot/hypothesis.hpp"
#include "mot/regression.hpp"
#include "mot/rng.hpp"
#include "mot/ust.hpp"

namespace mot {

// Real-valued pair indexed by integer steps n_minus..n_plus; step k sits at
// time k*dt. Contours convert with values scaled by c * delta^(5/4).
struct Trajectory {
  int n_minus = 0;
  double dt = 1.0;
  std::vector<double> L{0.0};
  std::vector<double> R{0.0};

  int n_plus() const { return n_minus + static_cast<int>(L.size()) - 1; }
  bool contains(int n) const { return n >= n_minus && n <= n_plus(); }
  double L_at(int n) const { return L[static_cast<std::size_t>(n - n_minus)]; }
  double R_at(int n) const { return R[static_cast<std::size_t>(n - n_minus)]; }
  double at(int coord, int n) const { return coord == 0 ? L_at(n) : R_at(n); }
};

inline Trajectory to_trajectory(const ContourPair& c) {
  Trajectory t;
  t.n_minus = c.n_minus;
  t.dt = c.delta * c.delta;
  const double s = c.c_check * std::pow(c.delta, 1.25);
  t.L.resize(c.size());
  t.R.resize(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    t.L[k] = s * c.L[k];
    t.R[k] = s * c.R[k];
  }
  return t;
}

inline std::vector<Trajectory> to_trajectories(const std::vector<ContourPair>& cs) {
  std::vector<Trajectory> out;
  out.reserve(cs.size());
  for (const auto& c : cs) out.push_back(to_trajectory(c));
  return out;
}

// ---------------------------------------------------------------------------
// Scaling exponent of E|Z_t|.

struct ScalingReport {
  ExponentEstimate L;
  ExponentEstimate R;
  ExponentEstimate joint;  // (|L| + |R|) / 2

  // L and R slopes agree within twice their combined bootstrap error.
  bool symmetric() const {
    return std::abs(L.slope - R.slope) <= 2.0 * std::hypot(L.std_error, R.std_error);
  }
};

inline constexpr std::size_t kScalingMinSamples = 50;

// Each sample contributes the average of |Z_t| and |Z_-t| where both exist,
// otherwise whichever exists. Grid points are step counts.
inline ScalingReport estimate_scaling_exponent(const std::vector<Trajectory>& samples,
                                               const std::vector<int>& grid, std::uint64_t seed,
                                               int bootstrap = 200) {
  std::vector<double> g(grid.begin(), grid.end());
  const GridRequirements req{kScalingMinSamples, 4, 1.5};
  check_grid(g, req);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> vl(samples.size(), std::vector<double>(grid.size(), nan));
  auto vr = vl, vj = vl;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Trajectory& z = samples[s];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double sl = 0, sr = 0;
      int c = 0;
      for (int t : {grid[k], -grid[k]}) {
        if (!z.contains(t)) continue;
        sl += std::abs(z.L_at(t));
        sr += std::abs(z.R_at(t));
        ++c;
      }
      if (!c) continue;
      vl[s][k] = sl / c;
      vr[s][k] = sr / c;
      vj[s][k] = 0.5 * (sl + sr) / c;
    }
  }
  ScalingReport r;
  r.L = loglog_exponent(vl, g, req, seed, bootstrap);
  r.R = loglog_exponent(vr, g, req, seed, bootstrap);
  r.joint = loglog_exponent(vj, g, req, seed, bootstrap);
  return r;
}

// ---------------------------------------------------------------------------
// Hoelder constants over dyadic pairs.

// sup over levels j (mesh (b-a)/2^j no finer than `finest`) and consecutive
// dyadic points s < t of |Z_t - Z_s| / |t - s|^alpha, Z the pair (L, R).
inline double holder_constant(const PiecewiseLinear& l, const PiecewiseLinear& r, double a, double b,
                              double alpha, double finest) {
  if (!(alpha > 0 && alpha <= 1)) throw domain_error("Hoelder exponent must lie in (0, 1]");
  if (!(b > a)) throw domain_error("Hoelder interval is empty");
  if (a < l.t_min() - 1e-12 || b > l.t_max() + 1e-12) throw domain_error("Hoelder interval outside the window");
  int levels = 0;
  while ((b - a) / std::ldexp(1.0, levels + 1) >= finest * (1 - 1e-9)) ++levels;
  const std::size_t points = (std::size_t{1} << levels) + 1;
  std::vector<double> xl(points), xr(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    xl[i] = l(t);
    xr[i] = r(t);
  }
  double best = 0;
  for (int j = 0; j <= levels; ++j) {
    const std::size_t stride = std::size_t{1} << (levels - j);
    const double denom = std::pow((b - a) / std::ldexp(1.0, j), alpha);
    for (std::size_t i = 0; i + stride < points; i += stride) {
      best = std::max(best, std::hypot(xl[i + stride] - xl[i], xr[i + stride] - xr[i]) / denom);
    }
  }
  return best;
}

inline double holder_constant(const RescaledContour& z, double a, double b, double alpha) {
  return holder_constant(z.L, z.R, a, b, alpha, z.L.dt());
}

struct HolderReport {
  double alpha = 0;
  double a = 0, b = 0;
  std::vector<double> deltas;                  // coarse to fine
  std::vector<std::vector<double>> constants;  // per delta, per sample
  std::vector<double> medians;
  TestResult trend;  // one-sided, increasing from coarse to fine
  double level = 0.05;

  bool increasing() const { return trend.p_value < level; }
};

inline HolderReport holder_report(const std::vector<std::vector<RescaledContour>>& groups,
                                  const std::vector<double>& deltas, double alpha, double a, double b,
                                  double level = 0.05) {
  if (!(alpha > 0 && alpha <= 1)) throw domain_error("Hoelder exponent must lie in (0, 1]");
  if (groups.size() != deltas.size() || groups.size() < 2) {
    throw domain_error("Hoelder report needs one sample group per delta, at least two");
  }
  HolderReport h;
  h.alpha = alpha;
  h.a = a;
  h.b = b;
  h.deltas = deltas;
  h.level = level;
  for (const auto& grp : groups) {
    if (grp.empty()) throw domain_error("empty Hoelder sample group");
    std::vector<double> c;
    for (const auto& z : grp) c.push_back(holder_constant(z, a, b, alpha));
    std::vector<double> sorted = c;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    h.medians.push_back(m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]));
    h.constants.push_back(std::move(c));
  }
  h.trend = jonckheere_increasing(h.constants);
  return h;
}

// ---------------------------------------------------------------------------
// Stationarity of increments.

struct StationarityRow {
  int coord = 0;  // 0 = L, 1 = R
  int lag = 0;
  int shift = 0;
  std::size_t n_base = 0, n_shift = 0;
  TestResult ks;
};

struct StationarityReport {
  int base = 0;
  int guard = 0;
  std::vector<StationarityRow> rows;
  double min_p = 1;
  double adjusted_p = 1;  // Bonferroni over all rows

  bool passed(double level = 0.01) const { return adjusted_p > level; }
};

inline constexpr std::size_t kStationarityMinSamples = 100;

// Increments Z_{t+lag} - Z_t at t = base against t = shift, for every lag and
// shift, by two-sample KS. A sample only enters a comparison when both
// intervals sit at least `guard` steps inside its window.
inline StationarityReport stationarity_report(const std::vector<Trajectory>& samples,
                                              const std::vector<int>& lags, const std::vector<int>& shifts,
                                              int base = 0, int guard = 0,
                                              std::size_t min_samples = kStationarityMinSamples) {
  if (samples.size() < min_samples) {
    throw domain_error("stationarity needs at least " + std::to_string(min_samples) + " samples");
  }
  if (lags.empty() || shifts.empty()) throw domain_error("stationarity needs lags and shifts");
  StationarityReport rep;
  rep.base = base;
  rep.guard = guard;
  auto inside = [&](const Trajectory& z, int t, int lag) {
    return t - guard >= z.n_minus && t + lag + guard <= z.n_plus();
  };
  for (int coord : {0, 1}) {
    for (int lag : lags) {
      if (lag <= 0) throw domain_error("lags must be positive");
      for (int shift : shifts) {
        std::vector<double> xa, xb;
        for (const auto& z : samples) {
          if (inside(z, base, lag)) xa.push_back(z.at(coord, base + lag) - z.at(coord, base));
          if (inside(z, shift, lag)) xb.push_back(z.at(coord, shift + lag) - z.at(coord, shift));
        }
        if (xa.empty() || xb.empty()) throw domain_error("no sample covers shift " + std::to_string(shift));
        StationarityRow row{coord, lag, shift, xa.size(), xb.size(), ks_two_sample(xa, xb)};
        rep.rows.push_back(row);
        rep.min_p = std::min(rep.min_p, row.ks.p_value);
      }
    }
  }
  rep.adjusted_p = std::min(1.0, rep.min_p * static_cast<double>(rep.rows.size()));
  return rep;
}

// ---------------------------------------------------------------------------
// Content against diameter for pairs of tree paths.

namespace detail {

inline double point_set_diameter(std::vector<Vertex> p) {
  if (p.size() < 2) return 0;
  std::sort(p.begin(), p.end(), [](Vertex a, Vertex b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  auto cross = [](Vertex o, Vertex a, Vertex b) {
    return static_cast<std::int64_t>(a.x - o.x) * (b.y - o.y) -
           static_cast<std::int64_t>(a.y - o.y) * (b.x - o.x);
  };
  std::vector<Vertex> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  std::int64_t best = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      const std::int64_t dx = hull[i].x - hull[j].x, dy = hull[i].y - hull[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  }
  return std::sqrt(static_cast<double>(best));
}

}  // namespace detail

struct DiameterBoundReport {
  double delta = 1, r = 0;
  std::vector<double> lambdas;
  std::vector<double> rates;  // per lambda
  std::size_t considered = 0;
  std::size_t drawn = 0;
};

// Pairs x, y with x uniform in the window |x|,|y| <= n and y within r of x
// (physical units, mesh delta). The symmetric difference of the two root
// paths is the pair of branches below their meet, or both full paths when
// they only meet at the wired root. Pairs whose difference has diameter
// above r are discarded; of the rest, the rate is the fraction with
// edges * delta^(5/4) > lambda * r^(5/4).
inline DiameterBoundReport content_diam_bound_check(const SpanningTree& tree, const PrimalDepthIndex& idx,
                                                    double delta, double r,
                                                    const std::vector<double>& lambdas,
                                                    std::size_t pairs, std::uint64_t seed) {
  if (!(delta > 0) || !(r > 0)) throw domain_error("delta and r must be positive");
  const Box& box = tree.box();
  const int n = box.n;
  const int reach = std::max(1, static_cast<int>(std::floor(r / delta)));
  DiameterBoundReport rep;
  rep.delta = delta;
  rep.r = r;
  rep.lambdas = lambdas;
  std::vector<std::size_t> viol(lambdas.size(), 0);
  Rng rng = make_rng(seed, Stream::kPairs, 0);
  std::uniform_int_distribution<int> ux(-n, n), uo(-reach, reach);
  std::vector<Vertex> pts;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Vertex x{ux(rng), ux(rng)};
    Vertex y;
    do {
      y = {x.x + uo(rng), x.y + uo(rng)};
    } while (!box.contains(y) || static_cast<double>((y.x - x.x) * (y.x - x.x) + (y.y - x.y) * (y.y - x.y)) >
                                     static_cast<double>(reach) * reach);
    ++rep.drawn;
    const std::optional<Vertex> m = idx.meet(x, y);
    pts.clear();
    std::size_t edges = 0;
    for (Vertex s : {x, y}) {
      std::optional<Vertex> v = s;
      while (v && (!m || !(*v == *m))) {
        pts.push_back(*v);
        ++edges;
        v = tree.parent(*v);
      }
      if (m) pts.push_back(*m);
    }
    if (x == y) edges = 0;
    if (delta * detail::point_set_diameter(pts) > r) continue;
    ++rep.considered;
    const double content = static_cast<double>(edges) * std::pow(delta, 1.25);
    for (std::size_t l = 0; l < lambdas.size(); ++l) viol[l] += content > lambdas[l] * std::pow(r, 1.25);
  }
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    rep.rates.push_back(rep.considered ? static_cast<double>(viol[l]) / static_cast<double>(rep.considered) : 0.0);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Running maximum of L over [-2^k, 2^k].

struct RunningMaxReport {
  int k_min = 0, k_max = 0;
  std::vector<std::vector<double>> maxima;  // per sample, per k
  bool nondecreasing = true;
  double grew_fraction = 0;  // samples whose max at 2^k_max exceeds that at 2^k_min
};

inline RunningMaxReport running_max_diagnostic(const std::vector<Trajectory>& samples, int k_min, int k_max) {
  if (k_min < 0 || k_max <= k_min) throw domain_error("running max needs 0 <= k_min < k_max");
  if (samples.empty()) throw domain_error("running max of no samples");
  RunningMaxReport rep;
  rep.k_min = k_min;
  rep.k_max = k_max;
  std::size_t grew = 0;
  for (const auto& z : samples) {
    std::vector<double> m;
    double best = -std::numeric_limits<double>::infinity();
    int reached = 0;
    for (int k = k_min; k <= k_max; ++k) {
      const int w = 1 << k;
      for (int t = std::max(z.n_minus, -w); t <= std::min(z.n_plus(), w); ++t) {
        if (t >= -reached && t <= reached && reached > 0) continue;
        best = std::max(best, z.L_at(t));
      }
      reached = w;
      if (!m.empty() && best < m.back()) rep.nondecreasing = false;
      m.push_back(best);
    }
    grew += m.back() > m.front();
    rep.maxima.push_back(std::move(m));
  }
  rep.grew_fraction = static_cast<double>(grew) / static_cast<double>(samples.size());
  return rep;
}

}  // namespace mot
