// Command-line front end: sample, contour, reconstruct, glue, stats, render.
//
// Exit codes: 0 ok, 1 verification failed, 2 usage, 3 I/O, 4 precondition.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mot/io.hpp"
#include "mot/lerw.hpp"
#include "mot/mating.hpp"
#include "mot/parallel.hpp"
#include "mot/rho.hpp"
#include "mot/scene.hpp"
#include "mot/stats.hpp"
#include "mot/svg.hpp"
#include "mot/timechange.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mot;

namespace {

constexpr const char* kVersion = "mot 0.1.0";

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int N = 0;  // 0: four times n
  int n = 32;
  std::vector<double> deltas;  // empty: 1/n
  std::uint64_t seed = 1;
  std::size_t samples = 1;
  std::string out;
  double c_check = 1.0;
  double kappa = 8.0;
  unsigned workers = 0;

  // task-specific
  std::string task = "scaling";
  std::string contour_file;
  bool verify = false;
  std::vector<int> radii{16, 32, 64, 128, 256};
  double alpha = 0.55;
  int horizon = 4;
  double lambda = 1.0;

  Box box() const { return Box{N, n}; }
  double delta() const { return deltas.empty() ? 1.0 / n : deltas.front(); }

  void validate() {
    if (N == 0) N = 4 * n;
    try {
      box().validate();
    } catch (const domain_error& e) {
      throw usage_error(e.what());
    }
    for (double d : deltas) {
      if (!(d > 0 && d <= 1)) throw usage_error("delta values must lie in (0, 1]");
    }
    if (samples == 0) throw usage_error("--samples must be positive");
    if (!(c_check > 0)) throw usage_error("--c-check must be positive");
    if (!(kappa > 0)) throw usage_error("--kappa must be positive");
  }

  json echo() const {
    json j;
    j["command"] = command;
    j["N"] = N;
    j["n"] = n;
    j["deltas"] = deltas;
    j["seed"] = seed;
    j["samples"] = samples;
    j["c_check"] = c_check;
    j["kappa"] = kappa;
    if (command == "stats") {
      j["task"] = task;
      j["radii"] = radii;
      j["alpha"] = alpha;
      j["horizon"] = horizon;
      j["lambda"] = lambda;
    }
    if (command == "reconstruct") {
      j["contour"] = contour_file;
      j["verify"] = verify;
    }
    return j;
  }
};

// Serialized writer: outputs are collected in order and written from the
// main thread, each atomically, and recorded for the manifest.
class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw io_error("cannot create output directory " + dir_.string());
  }

  void write(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    sums_[name] = hex64(fnv1a64(content));
  }

  void manifest(const RunConfig& cfg, double seconds) {
    json m;
    m["config"] = cfg.echo();
    m["version"] = kVersion;
    json outs = json::object();
    for (const auto& [k, v] : sums_) outs[k] = "fnv1a64:" + v;
    m["outputs"] = outs;
    m["wall_clock_seconds"] = seconds;
    write_file_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> sums_;
};

std::string numbered(const std::string& stem, std::size_t k, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04zu", k);
  return stem + buf + ext;
}

std::uint64_t scene_seed(const RunConfig& cfg, std::size_t s) { return derive_seed(cfg.seed, Stream::kScene, s); }

std::vector<Scene> scenes(const RunConfig& cfg, const Box& box, double delta, std::size_t count,
                          std::uint64_t salt = 0) {
  return parallel_map(count, cfg.workers, [&](std::size_t s) {
    return make_scene(box, scene_seed(cfg, salt + s), delta, cfg.c_check);
  });
}

json null_or(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void summary(Output& out, const RunConfig& cfg, double estimate, double stderr_, std::size_t n_samples,
             const json& grid, json extra = json::object()) {
  json j;
  j["estimate"] = null_or(estimate);
  j["stderr"] = null_or(stderr_);
  j["n_samples"] = n_samples;
  j["grid"] = grid;
  j["seed"] = cfg.seed;
  for (auto& [k, v] : extra.items()) j[k] = v;
  out.write("summary.json", j.dump(2) + "\n");
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s + "\n";
}

std::string fd(double x) { return format_double(x); }

// ---------------------------------------------------------------------------

int cmd_sample(const RunConfig& cfg, Output& out) {
  const auto sc = scenes(cfg, cfg.box(), cfg.delta(), cfg.samples);
  for (std::size_t k = 0; k < sc.size(); ++k) {
    out.write(numbered("ust", k, ".txt"), write_ust(sc[k].tree));
    out.write(numbered("dual", k, ".txt"), write_dual(sc[k].dual));
    out.write(numbered("peano", k, ".txt"), write_peano(sc[k].curve));
  }
  return 0;
}

int cmd_contour(const RunConfig& cfg, Output& out) {
  const auto sc = scenes(cfg, cfg.box(), cfg.delta(), cfg.samples);
  for (std::size_t k = 0; k < sc.size(); ++k) out.write(numbered("contour", k, ".csv"), write_contour(sc[k].contour));
  return 0;
}

int cmd_reconstruct(const RunConfig& cfg, Output& out) {
  if (cfg.contour_file.empty()) throw usage_error("reconstruct needs --contour FILE");
  const ContourPair c = read_contour(read_file(cfg.contour_file));
  const ReconstructedScene r = reconstruct_scene(c);
  const std::string stem = fs::path(cfg.contour_file).stem().string();
  out.write(stem + "_peano.txt", write_peano(r.curve));
  out.write(stem + "_primal.txt", write_partial(r.primal_parent, "primal"));
  out.write(stem + "_dual.txt", write_partial(r.dual_parent, "dual"));
  if (!cfg.verify) return 0;
  // Re-encode the rebuilt scene; it must give back the input heights.
  ContourPair again = contour_from_partial(r.curve, r.primal_parent, r.dual_parent);
  again.delta = c.delta;
  again.c_check = c.c_check;
  const bool ok = again == c && r.contour == c;
  std::cout << (ok ? "round trip matched" : "round trip FAILED") << " (rotation " << r.rotation << ")\n";
  return ok ? 0 : 1;
}

int cmd_glue(const RunConfig& cfg, Output& out) {
  const auto recs = parallel_map(cfg.samples, cfg.workers, [&](std::size_t s) {
    const Scene sc = make_scene(cfg.box(), scene_seed(cfg, s), cfg.delta(), cfg.c_check);
    int top = 0;
    for (std::size_t k = 0; k < sc.contour.size(); ++k) top = std::max(top, sc.contour.L[k] + sc.contour.R[k]);
    const GluedComplex g = glue_complex(sc.contour, top + 1.0);
    return std::pair{glue_record(g), g.is_sphere()};
  });
  std::vector<GlueRecord> rs;
  std::size_t spheres = 0;
  for (const auto& [r, ok] : recs) {
    rs.push_back(r);
    spheres += ok;
  }
  out.write("glue.csv", write_glue_records(rs));
  std::cout << spheres << "/" << rs.size() << " glued windows are spheres\n";
  return spheres == rs.size() ? 0 : 1;
}

int cmd_render(const RunConfig& cfg, Output& out) {
  const auto sc = scenes(cfg, cfg.box(), cfg.delta(), cfg.samples);
  for (std::size_t k = 0; k < sc.size(); ++k) {
    out.write(numbered("scene", k, ".svg"), render_svg(sc[k].tree, sc[k].dual, sc[k].curve));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// stats tasks

int task_scaling(const RunConfig& cfg, Output& out) {
  std::vector<ContourPair> cs;
  for (auto& s : scenes(cfg, cfg.box(), cfg.delta(), cfg.samples)) cs.push_back(std::move(s.contour));
  std::vector<int> grid;
  for (int t = 16; t <= cfg.n * cfg.n / 4; t *= 2) grid.push_back(t);
  const ScalingReport r = estimate_scaling_exponent(to_trajectories(cs), grid, cfg.seed);
  std::string csv = csv_line({"t", "mean_abs_L", "mean_abs_R", "mean_abs_joint"});
  for (std::size_t g = 0; g < grid.size(); ++g) {
    csv += csv_line({std::to_string(grid[g]), fd(r.L.means[g]), fd(r.R.means[g]), fd(r.joint.means[g])});
  }
  out.write("scaling.csv", csv);
  summary(out, cfg, r.joint.slope, r.joint.std_error, r.joint.n_samples, grid,
          {{"slope", r.joint.slope},
           {"slope_L", r.L.slope},
           {"slope_R", r.R.slope},
           {"stderr_L", r.L.std_error},
           {"stderr_R", r.R.std_error},
           {"symmetric", r.symmetric()}});
  return 0;
}

int task_lerw(const RunConfig& cfg, Output& out) {
  const ExponentEstimate e = lerw_growth_exponent(cfg.radii, cfg.samples, cfg.seed);
  std::string csv = csv_line({"radius", "mean_length"});
  for (std::size_t g = 0; g < e.grid.size(); ++g) csv += csv_line({fd(e.grid[g]), fd(e.means[g])});
  out.write("lerw.csv", csv);
  summary(out, cfg, e.slope, e.std_error, e.n_samples, cfg.radii, {{"slope", e.slope}});
  return 0;
}

int task_holder(const RunConfig& cfg, Output& out) {
  const std::vector<double> deltas =
      cfg.deltas.size() >= 2 ? cfg.deltas : std::vector<double>{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<std::vector<RescaledContour>> groups(deltas.size());
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    const int n = std::max(1, static_cast<int>(std::lround(2 / deltas[d])));
    std::uint64_t next = 0;
    while (groups[d].size() < cfg.samples) {
      const std::size_t want = cfg.samples - groups[d].size();
      for (auto& s : scenes(cfg, Box{4 * n, n}, deltas[d], want, (d + 1) * 1000000 + next)) {
        RescaledContour z = rescale_contour(s.contour);
        if (z.L.t_min() <= -1 && z.L.t_max() >= 1) groups[d].push_back(std::move(z));
      }
      next += want;
      if (next > 100 * cfg.samples) throw domain_error("windows rarely cover [-1, 1]; increase n");
    }
  }
  const HolderReport h = holder_report(groups, deltas, cfg.alpha, -1, 1);
  std::string csv = csv_line({"delta", "sample", "constant"});
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    for (std::size_t s = 0; s < h.constants[d].size(); ++s) {
      csv += csv_line({fd(deltas[d]), std::to_string(s), fd(h.constants[d][s])});
    }
  }
  out.write("holder.csv", csv);
  summary(out, cfg, h.trend.statistic, NAN, cfg.samples * deltas.size(), deltas,
          {{"alpha", cfg.alpha}, {"medians", h.medians}, {"trend_p", h.trend.p_value}, {"increasing", h.increasing()}});
  return 0;
}

std::vector<Trajectory> trajectories(const RunConfig& cfg) {
  std::vector<ContourPair> cs;
  for (auto& s : scenes(cfg, cfg.box(), cfg.delta(), cfg.samples)) cs.push_back(std::move(s.contour));
  return to_trajectories(cs);
}

int task_stationarity(const RunConfig& cfg, Output& out) {
  const auto zs = trajectories(cfg);
  const int guard = (cfg.n / 4) * (cfg.n / 4);
  const int far = cfg.n * cfg.n / 2, near = cfg.n * cfg.n / 4;
  const std::vector<int> lags{std::max(1, cfg.n / 2), std::max(2, 4 * cfg.n)};
  const StationarityReport r = stationarity_report(zs, lags, {-far, -near, near, far}, 0, guard);
  std::string csv = csv_line({"coord", "lag", "shift", "n_base", "n_shift", "ks", "p"});
  for (const auto& row : r.rows) {
    csv += csv_line({row.coord ? "R" : "L", std::to_string(row.lag), std::to_string(row.shift),
                     std::to_string(row.n_base), std::to_string(row.n_shift), fd(row.ks.statistic),
                     fd(row.ks.p_value)});
  }
  out.write("stationarity.csv", csv);
  summary(out, cfg, r.adjusted_p, NAN, zs.size(), lags,
          {{"min_p", r.min_p}, {"guard", guard}, {"passed", r.passed(0.01)}});
  return 0;
}

int task_tails(const RunConfig& cfg, Output& out) {
  std::vector<double> content;
  for (int r : cfg.radii) {
    const auto v = exit_content_samples(r, cfg.samples, derive_seed(cfg.seed, Stream::kLerw, r), cfg.c_check);
    content.insert(content.end(), v.begin(), v.end());
  }
  const TailReport t = content_tail_report(content);
  std::string csv = csv_line({"side", "M", "log_p", "envelope"});
  for (std::size_t k = 0; k < t.upper_M.size(); ++k) {
    csv += csv_line({"upper", fd(t.upper_M[k]), fd(t.upper_log_p[k]), fd(t.upper.intercept + t.upper.slope * t.upper_M[k])});
  }
  for (std::size_t k = 0; k < t.lower_M.size(); ++k) {
    csv += csv_line({"lower", fd(t.lower_M[k]), fd(t.lower_log_p[k]),
                     fd(t.lower.intercept + t.lower.slope * std::pow(t.lower_M[k], t.lower_exponent))});
  }
  out.write("tails.csv", csv);
  summary(out, cfg, -t.upper.slope, NAN, t.n_samples, cfg.radii,
          {{"upper_ok", t.upper_ok()},
           {"lower_ok", t.lower_ok()},
           {"lower_rate", -t.lower.slope},
           {"upper_crossings", t.upper.crossings},
           {"lower_crossings", t.lower.crossings}});
  return 0;
}

int task_timechange(const RunConfig& cfg, Output& out) {
  const auto zs = trajectories(cfg);
  const double delta = cfg.delta();
  std::vector<double> hs{16, 8, 4, 2}, M;
  for (double h : hs) M.push_back(1 / (h * std::pow(delta, 1.25)));
  const double C = calibrate_time_constant(zs, M.back(), cfg.kappa);
  std::string csv = csv_line({"sample", "query", "truth", "recovered", "rel_error"});
  double sum = 0, sum2 = 0;
  std::vector<double> tot(M.size(), 0.0);
  for (std::size_t s = 0; s < zs.size(); ++s) {
    Rng rng = make_rng(cfg.seed, Stream::kTimeChange, s);
    const ReparametrizedTrajectory zp = apply_time_change(zs[s], RandomTimeChange::draw(rng, 0.5, 25));
    const double u = 0.5 * zp.u.back();
    const TimeChangeRecovery r = recover_time_parametrization(zp, {u}, M, C, cfg.kappa);
    const double truth = true_time(zs[s], zp, u), e = std::abs(r.recovered[0] - truth) / truth;
    sum += e;
    sum2 += e * e;
    for (std::size_t k = 0; k < M.size(); ++k) tot[k] += static_cast<double>(r.counts[0][k]);
    csv += csv_line({std::to_string(s), fd(u), fd(truth), fd(r.recovered[0]), fd(e)});
  }
  out.write("timechange.csv", csv);
  const double n = static_cast<double>(zs.size()), mean = sum / n;
  const double sd = n > 1 ? std::sqrt(std::max(0.0, (sum2 - n * mean * mean) / (n - 1))) : NAN;
  std::vector<double> ratios;
  for (std::size_t k = 1; k < M.size(); ++k) ratios.push_back(tot[k] / tot[k - 1]);
  summary(out, cfg, mean, sd / std::sqrt(n), zs.size(), M,
          {{"C", C}, {"ladder_ratios", ratios}, {"target_ratio", std::pow(2.0, count_exponent(cfg.kappa))}});
  return 0;
}

int task_rho(const RunConfig& cfg, Output& out) {
  const std::vector<double> deltas =
      cfg.deltas.size() >= 3 ? cfg.deltas : std::vector<double>{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  const RhoTrend t = rho_cauchy_trend(cfg.seed, cfg.samples, deltas, cfg.horizon);
  std::string csv = "seed";
  for (std::size_t k = 0; k + 1 < deltas.size(); ++k) csv += ",rho_" + std::to_string(k);
  csv += ",monotone\n";
  for (std::size_t s = 0; s < t.rho.size(); ++s) {
    csv += std::to_string(s);
    for (double r : t.rho[s]) csv += "," + fd(r);
    csv += t.monotone[s] ? ",1\n" : ",0\n";
  }
  out.write("rho.csv", csv);
  summary(out, cfg, t.monotone_fraction, NAN, t.rho.size(), deltas, {{"horizon", cfg.horizon}});
  return 0;
}

int task_diameter(const RunConfig& cfg, Output& out) {
  const double delta = cfg.delta();
  const double r = 0.25;
  std::vector<double> lambdas;
  for (int k = 1; k <= 16; ++k) lambdas.push_back(0.25 * k);
  const auto reps = parallel_map(cfg.samples, cfg.workers, [&](std::size_t s) {
    const Scene sc = make_scene(cfg.box(), scene_seed(cfg, s), delta, cfg.c_check);
    const PrimalDepthIndex idx(sc.tree);
    return content_diam_bound_check(sc.tree, idx, delta, r, lambdas, 2000, derive_seed(cfg.seed, Stream::kPairs, s));
  });
  std::vector<double> viol(lambdas.size(), 0.0);
  std::size_t considered = 0;
  for (const auto& rep : reps) {
    for (std::size_t k = 0; k < lambdas.size(); ++k) viol[k] += rep.rates[k] * static_cast<double>(rep.considered);
    considered += rep.considered;
  }
  std::string csv = csv_line({"lambda", "rate"});
  std::vector<double> rates;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    rates.push_back(considered ? viol[k] / static_cast<double>(considered) : 0.0);
    csv += csv_line({fd(lambdas[k]), fd(rates.back())});
  }
  out.write("diameter.csv", csv);
  const double at_one = rates[3];
  summary(out, cfg, at_one, std::sqrt(at_one * (1 - at_one) / std::max<std::size_t>(considered, 1)), considered,
          lambdas, {{"r", r}, {"rates", rates}});
  return 0;
}

int cmd_stats(const RunConfig& cfg, Output& out) {
  static const std::map<std::string, int (*)(const RunConfig&, Output&)> tasks{
      {"scaling", task_scaling}, {"lerw", task_lerw},   {"holder", task_holder},          {"stationarity", task_stationarity},
      {"tails", task_tails},     {"timechange", task_timechange}, {"rho", task_rho}, {"diameter", task_diameter}};
  const auto it = tasks.find(cfg.task);
  if (it == tasks.end()) throw usage_error("unknown stats task " + cfg.task);
  return it->second(cfg, out);
}

fs::path output_dir(const RunConfig& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv("MOT_OUT_DIR"); env && *env) return env;
  return "mot_out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform spanning tree, Peano curve and contour toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* s) {
    s->add_option("--N", cfg.N, "box half-width (default 4n)");
    s->add_option("--n", cfg.n, "window half-width")->check(CLI::PositiveNumber);
    s->add_option("--delta", cfg.deltas, "mesh ladder, coarse to fine")->delimiter(',');
    s->add_option("--seed", cfg.seed, "top-level seed");
    s->add_option("--samples", cfg.samples, "number of samples");
    s->add_option("--out", cfg.out, "output directory (else MOT_OUT_DIR, else ./mot_out)");
    s->add_option("--c-check", cfg.c_check, "edge-time normalisation constant");
    s->add_option("--kappa", cfg.kappa, "SLE parameter for count exponents");
    s->add_option("--workers", cfg.workers, "worker threads (0: all cores)");
  };
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"sample", "contour", "reconstruct", "glue", "stats", "render"}) {
    subs[name] = app.add_subcommand(name);
    common(subs[name]);
  }
  subs["sample"]->description("sample trees, dual trees and Peano curves");
  subs["contour"]->description("sample scenes and write their contour pairs");
  subs["reconstruct"]->description("rebuild curve and trees from a contour file");
  subs["glue"]->description("glue contour windows into cell complexes");
  subs["stats"]->description("run a statistical task");
  subs["render"]->description("draw scenes as SVG");
  subs["reconstruct"]->add_option("--contour", cfg.contour_file, "contour file")->required();
  subs["reconstruct"]->add_flag("--verify", cfg.verify, "exit 0 iff the round trip matches");
  auto* st = subs["stats"];
  st->add_option("--task", cfg.task, "scaling|lerw|holder|stationarity|tails|timechange|rho|diameter")
      ->check(CLI::IsMember({"scaling", "lerw", "holder", "stationarity", "tails", "timechange", "rho", "diameter"}));
  st->add_option("--radii", cfg.radii, "LERW radii")->delimiter(',');
  st->add_option("--alpha", cfg.alpha, "Hoelder exponent");
  st->add_option("--horizon", cfg.horizon, "rho truncation K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (const auto& [name, s] : subs) {
    if (s->parsed()) cfg.command = name;
  }
  const auto t0 = std::chrono::steady_clock::now();
  try {
    cfg.validate();
    Output out(output_dir(cfg));
    static const std::map<std::string, int (*)(const RunConfig&, Output&)> commands{
        {"sample", cmd_sample}, {"contour", cmd_contour}, {"reconstruct", cmd_reconstruct},
        {"glue", cmd_glue},     {"stats", cmd_stats},     {"render", cmd_render}};
    const int code = commands.at(cfg.command)(cfg, out);
    out.manifest(cfg, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return code;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const io_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
