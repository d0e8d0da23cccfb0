#pragma once

// Epsilon sweeps, log-log slope fits and the rate report.

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "twofluid/picard.hpp"
#include "twofluid/runs.hpp"

namespace twofluid {

inline constexpr int kReportFormatVersion = 1;
inline constexpr double kSlopeTarget = 1.0;
inline constexpr double kSlopeThreshold = 0.8;
inline constexpr double kResidualThreshold = 0.1;

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS of the log residuals
};

/// Ordinary least squares of log(value) against log(epsilon).
inline SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw InsufficientPoints("slope fit needs at least 3 points");
  for (const auto& [e, v] : points) {
    if (!(e > 0.0)) throw NonPositiveValue("slope fit needs positive epsilon");
    if (!(v > 0.0)) throw NonPositiveValue("slope fit needs positive values");
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [e, v] : points) {
    mx += std::log(e);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [e, v] : points) {
    const double dx = std::log(e) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (!(sxx > 0.0)) throw InsufficientPoints("slope fit needs distinct epsilons");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (const auto& [e, v] : points) {
    const double r = std::log(v) - (f.intercept + f.slope * std::log(e));
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

/// Sup-in-time summaries for one epsilon.
struct EpsilonResult {
  double epsilon = 0.0;
  bool completed = false;
  std::string error;
  double failure_time = 0.0;
  double dt = 0.0;
  int steps_per_snapshot = 0;
  double sup_R_Hs = 0.0;
  double sup_Q_Hs = 0.0;
  double sup_div_Hs1 = 0.0;
  double sup_div_diff_Hs1 = 0.0;
  double sup_u_rate = 0.0;  ///< sup ||u_eps - u||^2_{L2} + int ||u_eps - u||^2_{H1}
  double sup_rel_energy = 0.0;
  double final_R_Hs = 0.0;
  double final_div_Hs1 = 0.0;
  double final_u_rate = 0.0;
  double final_rel_energy = 0.0;
  double sup_E_s = 0.0;
  std::vector<diagnostics::EnergyReport> history;
};

struct RateFit {
  std::string quantity;
  bool required = true;
  bool computed = false;
  SlopeFit fit;
  bool pass = false;
};

struct RateReport {
  int format_version = kReportFormatVersion;
  nlohmann::json config;
  int reference_steps_per_snapshot = 0;
  std::vector<EpsilonResult> runs;
  std::vector<RateFit> fits;
  bool partial = false;
  bool pass = false;
};

/// Quantities fitted against epsilon; the Q norm is informational.
inline const std::vector<std::pair<std::string, bool>>& rate_quantities() {
  static const std::vector<std::pair<std::string, bool>> q{
      {"sup_R_Hs", true},      {"sup_div_Hs1", true}, {"sup_u_rate", true},
      {"sup_rel_energy", true}, {"sup_Q_Hs", false}};
  return q;
}

inline double quantity(const EpsilonResult& r, const std::string& name) {
  if (name == "sup_R_Hs") return r.sup_R_Hs;
  if (name == "sup_Q_Hs") return r.sup_Q_Hs;
  if (name == "sup_div_Hs1") return r.sup_div_Hs1;
  if (name == "sup_u_rate") return r.sup_u_rate;
  if (name == "sup_rel_energy") return r.sup_rel_energy;
  throw InvalidConfig("unknown rate quantity " + name);
}

/// One epsilon of a sweep against a precomputed reference trajectory.
inline EpsilonResult run_epsilon(const RunConfig& cfg, const GridPtr& grid, double epsilon,
                                 const std::vector<VectorField>& reference) {
  EpsilonResult res;
  res.epsilon = epsilon;
  try {
    TwoFluidRun run(cfg, grid, epsilon);
    res.dt = run.dt();
    res.steps_per_snapshot = run.steps_per_snapshot();
    auto record = [&] {
      const auto r = run.observe(reference[run.snapshot()]);
      res.sup_R_Hs = std::max(res.sup_R_Hs, r.rate_R);
      res.sup_Q_Hs = std::max(res.sup_Q_Hs, r.rate_Q);
      res.sup_div_Hs1 = std::max(res.sup_div_Hs1, r.rate_div);
      res.sup_div_diff_Hs1 = std::max(res.sup_div_diff_Hs1, r.rate_div_diff);
      res.sup_u_rate = std::max(res.sup_u_rate, r.velocity_rate());
      res.sup_rel_energy = std::max(res.sup_rel_energy, r.rel_energy);
      res.sup_E_s = std::max(res.sup_E_s, r.E_s);
      res.final_R_Hs = r.rate_R;
      res.final_div_Hs1 = r.rate_div;
      res.final_u_rate = r.velocity_rate();
      res.final_rel_energy = r.rel_energy;
      res.history.push_back(r);
    };
    record();
    while (!run.finished()) {
      run.advance_snapshot();
      record();
    }
    res.completed = true;
  } catch (const StepFailure& e) {
    res.error = e.what();
    res.failure_time = e.time();
  } catch (const Error& e) {
    res.error = e.what();
  }
  return res;
}

/// Fits and pass flags from the per-epsilon results.
inline void assemble_fits(RateReport& report) {
  std::vector<const EpsilonResult*> done;
  for (const auto& r : report.runs) {
    if (r.completed) done.push_back(&r);
    else report.partial = true;
  }
  report.fits.clear();
  bool pass = !report.partial;
  for (const auto& [name, required] : rate_quantities()) {
    RateFit f;
    f.quantity = name;
    f.required = required;
    if (done.size() >= 3) {
      std::vector<std::pair<double, double>> pts;
      for (const auto* r : done) pts.emplace_back(r->epsilon, quantity(*r, name));
      try {
        f.fit = fit_slope(pts);
        f.computed = true;
        f.pass = f.fit.slope >= kSlopeThreshold && f.fit.residual <= kResidualThreshold;
      } catch (const Error&) {
        f.computed = false;
      }
    }
    if (required && f.computed && !f.pass) pass = false;
    if (required && done.size() >= 3 && !f.computed) pass = false;
    report.fits.push_back(f);
  }
  report.pass = pass;
}

/// Runs every epsilon of cfg.sweep (up to `workers` concurrently) and fits
/// the rates. The reference uses the finest two-fluid step of the sweep.
inline RateReport run_sweep(const RunConfig& cfg, int workers = 0) {
  cfg.validate();
  if (workers <= 0) workers = cfg.sweep.workers;
  const auto grid = make_grid(cfg);
  const auto& eps = cfg.sweep.epsilons;

  int m_ref = 1;
  for (double e : eps) {
    try {
      m_ref = std::max(m_ref, TwoFluidRun(cfg, grid, e).steps_per_snapshot());
    } catch (const Error&) {
      // reported by the per-epsilon run
    }
  }
  const auto reference = reference_trajectory(cfg, grid, m_ref);

  std::vector<EpsilonResult> results(eps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < eps.size(); i = next++) {
      results[i] = run_epsilon(cfg, grid, eps[i], reference);
    }
  };
  const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(eps.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }

  RateReport report;
  report.config = to_json(cfg);
  report.reference_steps_per_snapshot = m_ref;
  report.runs = std::move(results);
  assemble_fits(report);
  return report;
}

inline nlohmann::json to_json(const RateReport& r) {
  nlohmann::json j;
  j["format_version"] = r.format_version;
  j["config"] = r.config;
  j["slope_target"] = kSlopeTarget;
  j["slope_threshold"] = kSlopeThreshold;
  j["residual_threshold"] = kResidualThreshold;
  j["reference_steps_per_snapshot"] = r.reference_steps_per_snapshot;
  j["partial"] = r.partial;
  j["pass"] = r.pass;
  auto& runs = j["runs"] = nlohmann::json::array();
  for (const auto& e : r.runs) {
    runs.push_back({{"epsilon", e.epsilon},
                    {"completed", e.completed},
                    {"error", e.error},
                    {"failure_time", e.failure_time},
                    {"dt", e.dt},
                    {"steps_per_snapshot", e.steps_per_snapshot},
                    {"sup_R_Hs", e.sup_R_Hs},
                    {"sup_Q_Hs", e.sup_Q_Hs},
                    {"sup_div_Hs1", e.sup_div_Hs1},
                    {"sup_div_diff_Hs1", e.sup_div_diff_Hs1},
                    {"sup_u_rate", e.sup_u_rate},
                    {"sup_rel_energy", e.sup_rel_energy},
                    {"sup_E_s", e.sup_E_s},
                    {"final_R_Hs", e.final_R_Hs},
                    {"final_div_Hs1", e.final_div_Hs1},
                    {"final_u_rate", e.final_u_rate},
                    {"final_rel_energy", e.final_rel_energy}});
  }
  auto& fits = j["fits"] = nlohmann::json::array();
  for (const auto& f : r.fits) {
    nlohmann::json fj{{"quantity", f.quantity}, {"required", f.required}, {"computed", f.computed}};
    if (f.computed) {
      fj["slope"] = f.fit.slope;
      fj["intercept"] = f.fit.intercept;
      fj["residual"] = f.fit.residual;
      fj["pass"] = f.pass;
    }
    fits.push_back(fj);
  }
  return j;
}

inline RateReport report_from_json(const nlohmann::json& j) {
  try {
    RateReport r;
    r.format_version = j.at("format_version").get<int>();
    if (r.format_version != kReportFormatVersion) {
      throw FormatVersionMismatch("report format version " + std::to_string(r.format_version));
    }
    r.config = j.at("config");
    r.reference_steps_per_snapshot = j.at("reference_steps_per_snapshot").get<int>();
    r.partial = j.at("partial").get<bool>();
    r.pass = j.at("pass").get<bool>();
    for (const auto& e : j.at("runs")) {
      EpsilonResult x;
      x.epsilon = e.at("epsilon").get<double>();
      x.completed = e.at("completed").get<bool>();
      x.error = e.at("error").get<std::string>();
      x.failure_time = e.at("failure_time").get<double>();
      x.dt = e.at("dt").get<double>();
      x.steps_per_snapshot = e.at("steps_per_snapshot").get<int>();
      x.sup_R_Hs = e.at("sup_R_Hs").get<double>();
      x.sup_Q_Hs = e.at("sup_Q_Hs").get<double>();
      x.sup_div_Hs1 = e.at("sup_div_Hs1").get<double>();
      x.sup_div_diff_Hs1 = e.at("sup_div_diff_Hs1").get<double>();
      x.sup_u_rate = e.at("sup_u_rate").get<double>();
      x.sup_rel_energy = e.at("sup_rel_energy").get<double>();
      x.sup_E_s = e.at("sup_E_s").get<double>();
      x.final_R_Hs = e.at("final_R_Hs").get<double>();
      x.final_div_Hs1 = e.at("final_div_Hs1").get<double>();
      x.final_u_rate = e.at("final_u_rate").get<double>();
      x.final_rel_energy = e.at("final_rel_energy").get<double>();
      r.runs.push_back(std::move(x));
    }
    for (const auto& f : j.at("fits")) {
      RateFit x;
      x.quantity = f.at("quantity").get<std::string>();
      x.required = f.at("required").get<bool>();
      x.computed = f.at("computed").get<bool>();
      if (x.computed) {
        x.fit.slope = f.at("slope").get<double>();
        x.fit.intercept = f.at("intercept").get<double>();
        x.fit.residual = f.at("residual").get<double>();
        x.pass = f.at("pass").get<bool>();
      }
      r.fits.push_back(x);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("malformed report: ") + e.what());
  }
}

inline std::string epsilon_dir_name(double epsilon) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, epsilon);
  return "eps_" + std::string(buf, r.ptr);
}

/// report.json, rates.csv and one energy.csv per completed epsilon.
inline void save_report(const RateReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "report.json").string());
    out << to_json(r).dump(2) << '\n';
  }
  {
    CsvWriter csv(dir / "rates.csv",
                  {"epsilon", "completed", "sup_R_Hs", "sup_Q_Hs", "sup_div_Hs1", "sup_u_rate",
                   "sup_rel_energy", "dt"});
    for (const auto& e : r.runs) {
      csv.row({e.epsilon, e.completed ? 1.0 : 0.0, e.sup_R_Hs, e.sup_Q_Hs, e.sup_div_Hs1,
               e.sup_u_rate, e.sup_rel_energy, e.dt});
    }
  }
  for (const auto& e : r.runs) {
    if (e.history.empty()) continue;
    const auto sub = dir / epsilon_dir_name(e.epsilon);
    std::filesystem::create_directories(sub);
    CsvWriter energy(sub / "energy.csv", energy_csv_columns());
    CsvWriter rel(sub / "relative_energy.csv", {"t", "rel_energy", "visc_dissipation"});
    for (const auto& h : e.history) {
      energy.row(energy_csv_row(h));
      rel.row({h.t, h.rel_energy, h.visc_dissipation});
    }
  }
}

inline RateReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open report " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("malformed report: ") + e.what());
  }
  return report_from_json(j);
}

struct PicardRunResult {
  picard::PicardResult iteration;
  picard::Distance to_nonlinear;  ///< final iterate vs the nonlinear solver
  double dt = 0.0;
  int steps = 0;
};

/// K Picard iterations at cfg.physics.epsilon over [0, T]; writes contraction.csv.
inline PicardRunResult picard_run(const RunConfig& cfg, int K, const std::filesystem::path& out) {
  cfg.validate();
  const auto grid = make_grid(cfg);
  TwoFluidRun run(cfg, grid, cfg.physics.epsilon);
  PicardRunResult res;
  res.dt = run.dt();
  res.steps = run.steps_per_snapshot() * run.snapshot_count();
  const auto& p = run.params();
  res.iteration = picard::iterate(run.state(), p, res.dt, res.steps, K, cfg.init.s);
  const auto nonlinear = picard::nonlinear_solve(run.state(), p, res.dt, res.steps);
  res.to_nonlinear = picard::contraction_distance(res.iteration.final_iterate, nonlinear, p.epsilon);

  std::filesystem::create_directories(out);
  CsvWriter csv(out / "contraction.csv", {"k", "d_k", "ratio", "E_s_sup", "Es1_dt_sup"});
  for (const auto& r : res.iteration.records) {
    csv.row({static_cast<double>(r.k), r.d(), r.ratio, r.E_s_sup, r.Es1_dt_sup});
  }
  return res;
}

}  // namespace twofluid
