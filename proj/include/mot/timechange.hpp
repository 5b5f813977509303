#pragma once

// Recovering Lebesgue time from a reparametrized contour. Crossings of size
// 1/M by L are counted from the origin; the count times C * M^(-1/H), H the
// scaling exponent 1/2 + 1/kappa, estimates elapsed time. C is calibrated on
// windows held out from scoring.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "mot/errors.hpp"
#include "mot/rng.hpp"
#include "mot/stats.hpp"

namespace mot {

inline double count_exponent(double kappa) {
  if (!(kappa > 0)) throw domain_error("kappa must be positive");
  return 1.0 / (0.5 + 1.0 / kappa);
}

// Values of a trajectory at new clock times u; u[origin] = 0.
struct ReparametrizedTrajectory {
  std::vector<double> u;
  std::vector<double> L, R;
  std::size_t origin = 0;

  void check() const {
    if (u.size() != L.size() || u.size() != R.size() || u.empty()) {
      throw domain_error("reparametrized sequences differ in length");
    }
    if (origin >= u.size() || u[origin] != 0) throw domain_error("clock is not zero at the origin");
    for (std::size_t k = 1; k < u.size(); ++k) {
      if (!(u[k] > u[k - 1])) throw domain_error("time change is not strictly increasing (flat interval)");
    }
  }
};

// Smooth positive rate exp(sigma * g(t)), g a sum of random sinusoids with
// unit variance; the clock is its integral from 0, exact on each step.
struct RandomTimeChange {
  double sigma = 0.5;
  std::vector<double> amp, freq, phase;

  static RandomTimeChange draw(Rng& rng, double sigma, double max_freq, int modes = 8) {
    RandomTimeChange tc;
    tc.sigma = sigma;
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0, 1);
    for (int k = 0; k < modes; ++k) {
      tc.amp.push_back(nd(rng) * std::sqrt(2.0 / modes));
      tc.freq.push_back(max_freq * ud(rng));
      tc.phase.push_back(2 * std::numbers::pi * ud(rng));
    }
    return tc;
  }

  double rate(double t) const {
    double g = 0;
    for (std::size_t k = 0; k < amp.size(); ++k) g += amp[k] * std::sin(freq[k] * t + phase[k]);
    return std::exp(sigma * g);
  }
};

// Clock breakpoints by Simpson's rule on each step, then Z'(u_k) = Z(t_k).
inline ReparametrizedTrajectory apply_time_change(const Trajectory& z, const RandomTimeChange& tc) {
  if (!z.contains(0)) throw domain_error("trajectory window does not contain time 0");
  ReparametrizedTrajectory out;
  out.L = z.L;
  out.R = z.R;
  out.origin = static_cast<std::size_t>(-z.n_minus);
  out.u.assign(z.L.size(), 0.0);
  auto piece = [&](double t0, double t1) {
    return (t1 - t0) / 6.0 * (tc.rate(t0) + 4 * tc.rate(0.5 * (t0 + t1)) + tc.rate(t1));
  };
  for (std::size_t k = out.origin + 1; k < out.u.size(); ++k) {
    const double t1 = z.dt * (static_cast<double>(k) + z.n_minus);
    out.u[k] = out.u[k - 1] + piece(t1 - z.dt, t1);
  }
  for (std::size_t k = out.origin; k-- > 0;) {
    const double t0 = z.dt * (static_cast<double>(k) + z.n_minus);
    out.u[k] = out.u[k + 1] - piece(t0, t0 + z.dt);
  }
  return out;
}

inline ReparametrizedTrajectory identity_time_change(const Trajectory& z) {
  ReparametrizedTrajectory out;
  out.L = z.L;
  out.R = z.R;
  out.origin = static_cast<std::size_t>(-z.n_minus);
  for (std::size_t k = 0; k < z.L.size(); ++k) out.u.push_back(z.dt * (static_cast<double>(k) + z.n_minus));
  return out;
}

// Breakpoint times of Z on its own clock, for scoring.
inline double true_time(const Trajectory& z, const ReparametrizedTrajectory& zp, double u) {
  const auto it = std::upper_bound(zp.u.begin(), zp.u.end(), u);
  if (it == zp.u.begin() || it == zp.u.end()) {
    if (it != zp.u.begin() && u == zp.u.back()) return z.dt * z.n_plus();
    throw domain_error("query outside the reparametrized window");
  }
  const auto k = static_cast<std::size_t>(it - zp.u.begin()) - 1;
  const double w = (u - zp.u[k]) / (zp.u[k + 1] - zp.u[k]);
  return z.dt * (static_cast<double>(k) + z.n_minus + w);
}

// Crossings of size h by L, scanning breakpoints from index `from` toward
// `to` (either direction). A crossing resets the reference level.
inline std::size_t crossing_count(const std::vector<double>& L, double h, std::size_t from, std::size_t to) {
  if (!(h > 0)) throw domain_error("crossing size must be positive");
  std::size_t n = 0;
  double base = L[from];
  const double tol = 1e-9 * h;
  const long step = to >= from ? 1 : -1;
  for (long k = static_cast<long>(from); k != static_cast<long>(to);) {
    k += step;
    if (std::abs(L[static_cast<std::size_t>(k)] - base) >= h - tol) {
      ++n;
      base = L[static_cast<std::size_t>(k)];
    }
  }
  return n;
}

struct TimeChangeRecovery {
  std::vector<double> queries;    // clock times u >= 0
  std::vector<double> recovered;  // elapsed Lebesgue time
  std::vector<double> M;          // ladder, increasing
  std::vector<std::vector<std::size_t>> counts;  // per query, per M
  double C = 1;
  double kappa = 8;
};

// Recovered time uses the largest M of the ladder. Queries must be
// nondecreasing and inside the forward part of the window.
inline TimeChangeRecovery recover_time_parametrization(const ReparametrizedTrajectory& zp,
                                                       const std::vector<double>& queries,
                                                       const std::vector<double>& M, double C,
                                                       double kappa = 8) {
  zp.check();
  if (M.empty()) throw domain_error("crossing ladder is empty");
  for (std::size_t k = 0; k < M.size(); ++k) {
    if (!(M[k] > 0) || (k && !(M[k] > M[k - 1]))) throw domain_error("ladder must be positive and increasing");
  }
  TimeChangeRecovery out;
  out.queries = queries;
  out.M = M;
  out.C = C;
  out.kappa = kappa;
  const double e = count_exponent(kappa);
  for (double u : queries) {
    if (u < 0 || u > zp.u.back()) throw domain_error("query outside the forward window");
    const auto it = std::upper_bound(zp.u.begin(), zp.u.end(), u);
    const std::size_t last = static_cast<std::size_t>(it - zp.u.begin()) - 1;
    std::vector<std::size_t> row;
    for (double m : M) row.push_back(crossing_count(zp.L, 1.0 / m, zp.origin, last));
    out.recovered.push_back(C * static_cast<double>(row.back()) * std::pow(M.back(), -e));
    out.counts.push_back(std::move(row));
  }
  return out;
}

// C from the backward halves: total elapsed time over total scaled count.
inline double calibrate_time_constant(const std::vector<Trajectory>& held_out, double M, double kappa = 8) {
  const double e = count_exponent(kappa);
  double time = 0, scaled = 0;
  for (const auto& z : held_out) {
    if (!z.contains(0) || z.n_minus >= 0) continue;
    time += -z.dt * z.n_minus;
    scaled += static_cast<double>(crossing_count(z.L, 1.0 / M, static_cast<std::size_t>(-z.n_minus), 0)) *
              std::pow(M, -e);
  }
  if (!(scaled > 0)) throw domain_error("held-out windows contain no crossings");
  return time / scaled;
}

}  // namespace mot
