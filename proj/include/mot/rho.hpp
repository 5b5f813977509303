#pragma once

// Upper bound on the curve distance
//   rho = inf_alpha sum_k min{2^-k, sup |alpha(t) - t| + sup |g1(t) - g2(alpha(t))|}
// with sups over t in [-2^k, 2^k]. Reparametrizations come from banded
// bottleneck dynamic programs over monotone couplings of the two breakpoint
// sequences, one per time tolerance; the sum is evaluated exactly on each
// coupling for k = 0..K, the smallest is kept, and 2^-K is added for the rest.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <utility>
#include <vector>

#include "mot/errors.hpp"
#include "mot/peano.hpp"
#include "mot/ust.hpp"
#include "mot/dual.hpp"

namespace mot {

struct PolyCurve {
  std::vector<double> t;  // strictly increasing
  std::vector<double> x, y;

  std::size_t size() const { return t.size(); }
  void check() const {
    if (t.empty() || t.size() != x.size() || t.size() != y.size()) throw domain_error("malformed polygonal curve");
    for (std::size_t k = 1; k < t.size(); ++k) {
      if (!(t[k] > t[k - 1])) throw domain_error("curve times must increase strictly");
    }
  }
};

// Positions scaled by delta; each step covers area delta^2 / 4, so t = n delta^2 / 4.
inline PolyCurve peano_polycurve(const PeanoCurve& c, double delta) {
  if (!(delta > 0)) throw domain_error("delta must be positive");
  PolyCurve p;
  for (int n = c.n_minus(); n <= c.n_plus(); ++n) {
    const QuarterPoint& q = c.at(n);
    p.t.push_back(0.25 * delta * delta * n);
    p.x.push_back(delta * q.x());
    p.y.push_back(delta * q.y());
  }
  return p;
}

struct RhoResult {
  double value = 0;
  std::vector<double> terms;  // min{2^-k, time + space} for k = 0..K
  double tail = 0;
};

namespace detail {

// Distance from 0 of the hull of a breakpoint and its neighbours.
inline std::vector<double> reach_from_zero(const std::vector<double>& t) {
  std::vector<double> r(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double lo = t[i == 0 ? 0 : i - 1], hi = t[i + 1 < t.size() ? i + 1 : i];
    r[i] = (lo <= 0 && hi >= 0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
  }
  return r;
}

}  // namespace detail

namespace detail {

struct RhoBand {
  std::vector<std::size_t> lo, hi;
};

inline RhoBand rho_band(const PolyCurve& a, const PolyCurve& b, double band) {
  const std::size_t n1 = a.size(), n2 = b.size();
  // Band around the affine map between the two parameter intervals.
  const double span1 = a.t.back() - a.t.front(), span2 = b.t.back() - b.t.front();
  const double slope = span1 > 0 ? span2 / span1 : 0;
  double max_gap = 0;
  for (std::size_t k = 1; k < n1; ++k) max_gap = std::max(max_gap, (a.t[k] - a.t[k - 1]) * slope);
  for (std::size_t k = 1; k < n2; ++k) max_gap = std::max(max_gap, b.t[k] - b.t[k - 1]);
  const double w = std::max(band, 2 * max_gap);
  RhoBand r{std::vector<std::size_t>(n1), std::vector<std::size_t>(n1)};
  for (std::size_t i = 0; i < n1; ++i) {
    const double c = b.t.front() + (a.t[i] - a.t.front()) * slope;
    r.lo[i] = static_cast<std::size_t>(std::lower_bound(b.t.begin(), b.t.end(), c - w) - b.t.begin());
    r.hi[i] = static_cast<std::size_t>(std::upper_bound(b.t.begin(), b.t.end(), c + w) - b.t.begin());
    if (r.hi[i] > 0) --r.hi[i];
    if (i) r.lo[i] = std::max(r.lo[i], r.lo[i - 1]);
  }
  r.lo[0] = 0;
  r.hi[n1 - 1] = n2 - 1;
  for (std::size_t i = n1 - 1; i-- > 0;) r.hi[i] = std::min(r.hi[i], r.hi[i + 1]);
  for (std::size_t i = 0; i + 1 < n1; ++i) {
    if (r.lo[i + 1] > r.hi[i] + 1) throw domain_error("rho band is disconnected");
    if (r.hi[i] < r.lo[i]) throw domain_error("rho band is empty");
  }
  return r;
}

// Bottleneck coupling inside the band. With tau finite, cells with time lag
// above tau are forbidden and the space distance is minimized; otherwise the
// per-cell sum of both lags is. Returns the coupling from (0,0) to the end,
// or an empty path if none exists.
inline std::vector<std::pair<std::size_t, std::size_t>> rho_coupling(const PolyCurve& a, const PolyCurve& b,
                                                                      const RhoBand& band, double tau) {
  const std::size_t n1 = a.size(), n2 = b.size();
  const double inf = std::numeric_limits<double>::infinity();
  auto cost = [&](std::size_t i, std::size_t j) {
    const double dt = std::abs(a.t[i] - b.t[j]), dz = std::hypot(a.x[i] - b.x[j], a.y[i] - b.y[j]);
    if (std::isfinite(tau)) return dt > tau ? inf : dz;
    return dt + dz;
  };
  const auto& lo = band.lo;
  const auto& hi = band.hi;
  // move: 0 diagonal, 1 from (i-1, j), 2 from (i, j-1)
  std::vector<std::vector<std::uint8_t>> move(n1);
  std::vector<double> prev, cur;
  for (std::size_t i = 0; i < n1; ++i) {
    cur.assign(hi[i] - lo[i] + 1, inf);
    move[i].assign(cur.size(), 0);
    for (std::size_t j = lo[i]; j <= hi[i]; ++j) {
      const std::size_t c = j - lo[i];
      double best = inf;
      std::uint8_t m = 0;
      if (i == 0 && j == 0) {
        best = 0;
      } else {
        auto up = [&](std::size_t jj) {
          return (i > 0 && jj >= lo[i - 1] && jj <= hi[i - 1]) ? prev[jj - lo[i - 1]] : inf;
        };
        // ties go to the diagonal
        if (i > 0 && j > 0) { best = up(j - 1); m = 0; }
        if (up(j) < best) { best = up(j); m = 1; }
        if (j > lo[i] && cur[c - 1] < best) { best = cur[c - 1]; m = 2; }
      }
      cur[c] = std::max(best, cost(i, j));
      move[i][c] = m;
    }
    prev.swap(cur);
  }
  std::vector<std::pair<std::size_t, std::size_t>> path;
  if (!std::isfinite(prev.back())) return path;
  std::size_t i = n1 - 1, j = n2 - 1;
  while (true) {
    path.emplace_back(i, j);
    if (i == 0 && j == 0) break;
    const std::uint8_t m = move[i][j - lo[i]];
    if (m == 0) { --i; --j; }
    else if (m == 1) --i;
    else --j;
  }
  return path;
}

// Both curves resampled on the union of their breakpoint times, each held
// constant outside its own time range.
inline std::pair<PolyCurve, PolyCurve> common_range(const PolyCurve& a, const PolyCurve& b) {
  std::vector<double> ts;
  ts.reserve(a.size() + b.size());
  std::merge(a.t.begin(), a.t.end(), b.t.begin(), b.t.end(), std::back_inserter(ts));
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  auto resample = [&](const PolyCurve& c) {
    PolyCurve out;
    out.t = ts;
    std::size_t k = 0;
    for (double t : ts) {
      while (k + 1 < c.size() && c.t[k + 1] <= t) ++k;
      double x = c.x[k], y = c.y[k];
      if (t > c.t[k] && k + 1 < c.size()) {
        const double u = (t - c.t[k]) / (c.t[k + 1] - c.t[k]);
        x += u * (c.x[k + 1] - c.x[k]);
        y += u * (c.y[k + 1] - c.y[k]);
      }
      out.x.push_back(x);
      out.y.push_back(y);
    }
    return out;
  };
  return {resample(a), resample(b)};
}

}  // namespace detail

inline RhoResult curve_distance_rho(const PolyCurve& a0, const PolyCurve& b0, int K, double band = 1.0 / 16) {
  if (K <= 0) throw domain_error("rho horizon K must be positive");
  a0.check();
  b0.check();
  const auto [a, b] = detail::common_range(a0, b0);
  const detail::RhoBand bd = detail::rho_band(a, b, band);
  const std::vector<double> ra = detail::reach_from_zero(a.t), rb = detail::reach_from_zero(b.t);

  auto evaluate = [&](const std::vector<std::pair<std::size_t, std::size_t>>& path) {
    std::vector<double> time_sup(K + 1, 0.0), space_sup(K + 1, 0.0);
    for (auto [i, j] : path) {
      // A cell counts toward window k when either parameter's neighbourhood
      // meets [-2^k, 2^k]; windows are nested, so record at the first one.
      const double r = std::min(ra[i], rb[j]);
      int k0 = 0;
      while (k0 <= K && r > std::ldexp(1.0, k0)) ++k0;
      if (k0 <= K) {
        time_sup[k0] = std::max(time_sup[k0], std::abs(a.t[i] - b.t[j]));
        space_sup[k0] = std::max(space_sup[k0], std::hypot(a.x[i] - b.x[j], a.y[i] - b.y[j]));
      }
    }
    RhoResult res;
    double tsup = 0, ssup = 0;
    for (int k = 0; k <= K; ++k) {
      tsup = std::max(tsup, time_sup[k]);
      ssup = std::max(ssup, space_sup[k]);
      res.terms.push_back(std::min(std::ldexp(1.0, -k), tsup + ssup));
      res.value += res.terms.back();
    }
    res.tail = std::ldexp(1.0, -K);
    res.value += res.tail;
    return res;
  };

  // Candidates: the summed bottleneck, then time tolerances from the forced
  // end point lags up to the band width.
  auto path = detail::rho_coupling(a, b, bd, std::numeric_limits<double>::infinity());
  if (path.empty()) throw domain_error("rho coupling did not reach the end points");
  RhoResult best = evaluate(path);
  const double t0 = std::max(std::abs(a.t.front() - b.t.front()), std::abs(a.t.back() - b.t.back()));
  const double w = std::max(band, 1e-300);
  std::vector<double> taus{t0 * (1 + 1e-12) + 1e-15};
  for (int m = 8; m >= 0; --m) taus.push_back(t0 + std::ldexp(w, -m));
  for (double tau : taus) {
    path = detail::rho_coupling(a, b, bd, tau);
    if (path.empty()) continue;
    RhoResult r = evaluate(path);
    if (r.value < best.value) best = std::move(r);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Peano curves on nested meshes driven by shared arrow stacks.

// Window [-W, W] at mesh delta, box four times wider. `finest` fixes the
// physical integer grid used to key the stacks.
inline PeanoCurve coupled_peano(std::uint64_t seed, double delta, double finest, double W = 1.0) {
  const int n = static_cast<int>(std::lround(W / delta));
  const auto scale = static_cast<std::int64_t>(std::llround(delta / finest));
  if (n < 1 || scale < 1 || delta < finest || std::abs(delta / finest - static_cast<double>(scale)) > 1e-9) throw domain_error("coupled mesh must not be finer than the finest mesh");
  const Box box{4 * n, n};
  const SpanningTree t = wilson_sample_stacks(box, seed, scale);
  return trace_peano(t, build_dual(t), n);
}

struct RhoTrend {
  std::vector<double> deltas;            // coarse to fine
  std::vector<std::vector<double>> rho;  // per seed: rho(delta_k, delta_(k+1))
  std::vector<bool> monotone;            // strictly decreasing as delta shrinks
  double monotone_fraction = 0;
};

inline RhoTrend rho_cauchy_trend(std::uint64_t seed, std::size_t seeds, const std::vector<double>& deltas,
                                 int K, double W = 1.0) {
  if (deltas.size() < 3) throw domain_error("rho trend needs at least three meshes");
  RhoTrend tr;
  tr.deltas = deltas;
  const double finest = *std::min_element(deltas.begin(), deltas.end());
  std::size_t good = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::uint64_t sd = derive_seed(seed, Stream::kScene, s);
    std::vector<PolyCurve> curves;
    for (double d : deltas) curves.push_back(peano_polycurve(coupled_peano(sd, d, finest, W), d));
    std::vector<double> row;
    for (std::size_t k = 0; k + 1 < curves.size(); ++k) {
      row.push_back(curve_distance_rho(curves[k], curves[k + 1], K).value);
    }
    bool mono = true;
    for (std::size_t k = 0; k + 1 < row.size(); ++k) mono = mono && row[k + 1] < row[k];
    good += mono;
    tr.monotone.push_back(mono);
    tr.rho.push_back(std::move(row));
  }
  tr.monotone_fraction = seeds ? static_cast<double>(good) / static_cast<double>(seeds) : 0.0;
  return tr;
}

}  // namespace mot
