#pragma once

// Run drivers shared by the CLI, the sweep and the tests.
//
// Every run samples diagnostics on the snapshot grid t_j = j * interval. The
// time step is interval / m with m chosen from the CFL bound of the initial
// state, so runs with different steps all land on the same snapshot times.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "twofluid/checkpoint.hpp"
#include "twofluid/config.hpp"
#include "twofluid/diagnostics.hpp"
#include "twofluid/ins_reference.hpp"
#include "twofluid/presets.hpp"
#include "twofluid/twofluid_solver.hpp"

namespace twofluid {

/// Decimal with 17 significant digits.
inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
      : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot open " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out_ << (i ? "," : "") << format_number(values[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

inline PhysParams make_params(const RunConfig& cfg, double epsilon) {
  PhysParams p{closure::Gammas(cfg.physics.gamma_plus, cfg.physics.gamma_minus),
               cfg.physics.mu, cfg.physics.lambda, epsilon, nullptr};
  p.validate();
  return p;
}

inline GridPtr make_grid(const RunConfig& cfg) {
  return make_grid(cfg.grid.dim, cfg.grid.n, cfg.grid.length);
}

inline VectorField initial_velocity(const RunConfig& cfg, const GridPtr& grid) {
  return field::dealias(presets::named_velocity(cfg.init.u0, grid));
}

inline FieldState initial_state(const RunConfig& cfg, const GridPtr& grid, double epsilon) {
  return well_prepared_init(initial_velocity(cfg, grid), cfg.init.delta0, epsilon, cfg.init.seed,
                            cfg.init.s);
}

/// Smallest m with interval / m <= dt_max.
inline int steps_per_snapshot(double interval, double dt_max) {
  return std::max(1, static_cast<int>(std::ceil(interval / dt_max * (1.0 - 1e-12))));
}

/// Incompressible reference run on the snapshot grid.
class ReferenceRun {
 public:
  ReferenceRun(const RunConfig& cfg, const GridPtr& grid, int steps_per_snapshot)
      : mu_(cfg.physics.mu),
        interval_(cfg.time.snapshot_interval),
        count_(cfg.snapshot_count()),
        m_(steps_per_snapshot),
        dt_(interval_ / m_),
        state_{0.0, initial_velocity(cfg, grid)} {}

  /// m from the reference's own CFL bound.
  static int natural_steps(const RunConfig& cfg, const GridPtr& grid) {
    const ins::InsState s{0.0, initial_velocity(cfg, grid)};
    return twofluid::steps_per_snapshot(cfg.time.snapshot_interval,
                              ins::stable_dt(s, cfg.physics.mu, cfg.time.cfl));
  }

  int snapshot() const noexcept { return snapshot_; }
  int snapshot_count() const noexcept { return count_; }
  bool finished() const noexcept { return snapshot_ >= count_; }
  double dt() const noexcept { return dt_; }
  int steps_per_snapshot() const noexcept { return m_; }
  const ins::InsState& state() const noexcept { return state_; }

  void advance_snapshot() {
    for (int i = 0; i < m_; ++i) {
      state_ = ins::step_rk4(state_, mu_, dt_);
      ++step_;
      state_.t = step_ * dt_;
    }
    ++snapshot_;
  }

 private:
  double mu_;
  double interval_;
  int count_;
  int m_;
  double dt_;
  ins::InsState state_;
  int snapshot_ = 0;
  long step_ = 0;
};

/// Reference velocities at every snapshot time.
inline std::vector<VectorField> reference_trajectory(const RunConfig& cfg, const GridPtr& grid,
                                                     int steps_per_snapshot) {
  ReferenceRun ref(cfg, grid, steps_per_snapshot);
  std::vector<VectorField> out{ref.state().u};
  while (!ref.finished()) {
    ref.advance_snapshot();
    out.push_back(ref.state().u);
  }
  return out;
}

/// Two-fluid run on the snapshot grid with running diagnostics.
class TwoFluidRun {
 public:
  /// steps_per_snapshot = 0 picks m from the initial CFL bound.
  TwoFluidRun(const RunConfig& cfg, const GridPtr& grid, double epsilon, int steps_per_snapshot = 0)
      : params_(make_params(cfg, epsilon)),
        interval_(cfg.time.snapshot_interval),
        count_(cfg.snapshot_count()),
        cfl_(cfg.time.cfl),
        s_(cfg.init.s),
        state_(initial_state(cfg, grid, epsilon)),
        diag_(params_.gammas, params_.mu, params_.lambda, epsilon, cfg.init.s) {
    m_ = steps_per_snapshot > 0
             ? steps_per_snapshot
             : twofluid::steps_per_snapshot(interval_, stable_dt(state_, params_, cfl_));
    dt_ = interval_ / m_;
  }

  static TwoFluidRun resume(const RunConfig& cfg, const Checkpoint& c) {
    const auto& p = c.parameters;
    if (p.value("kind", "") != "twofluid") throw CorruptCheckpoint("not a two-fluid checkpoint");
    if (!(*c.grid == *make_grid(cfg))) throw InvalidConfig("checkpoint grid differs from config");
    if (p.at("gamma_plus").get<double>() != cfg.physics.gamma_plus ||
        p.at("gamma_minus").get<double>() != cfg.physics.gamma_minus ||
        p.at("mu").get<double>() != cfg.physics.mu ||
        p.at("lambda").get<double>() != cfg.physics.lambda) {
      throw InvalidConfig("checkpoint physics differs from config");
    }
    TwoFluidRun run(cfg, c.grid, c.epsilon, p.at("steps_per_snapshot").get<int>());
    run.state_ = FieldState{c.time, c.R, c.Q, c.u};
    run.snapshot_ = p.at("snapshot_index").get<int>();
    run.step_ = p.at("step_index").get<long>();
    auto acc = [](const nlohmann::json& j) {
      return diagnostics::TrapezoidAccumulator(j.at("total").get<double>(),
                                               j.at("last_t").get<double>(),
                                               j.at("last_value").get<double>(),
                                               j.at("started").get<bool>());
    };
    run.diag_.restore(acc(p.at("dissipation")), acc(p.at("h1_integral")));
    return run;
  }

  int snapshot() const noexcept { return snapshot_; }
  int snapshot_count() const noexcept { return count_; }
  bool finished() const noexcept { return snapshot_ >= count_; }
  double dt() const noexcept { return dt_; }
  int steps_per_snapshot() const noexcept { return m_; }
  double epsilon() const noexcept { return params_.epsilon; }
  const PhysParams& params() const noexcept { return params_; }
  const FieldState& state() const noexcept { return state_; }

  diagnostics::EnergyReport observe(const VectorField& u_ref) {
    return diag_.observe(state_, u_ref);
  }

  void advance_snapshot() {
    // The step was fixed from the initial state; make sure it is still stable.
    if (dt_ > stable_dt(state_, params_, 1.0)) {
      throw StepFailure(state_.t, "time step exceeds the CFL bound");
    }
    for (int i = 0; i < m_; ++i) {
      try {
        state_ = step_rk4(state_, params_, dt_);
      } catch (const Error& e) {
        throw StepFailure(state_.t, e.what());
      }
      ++step_;
      state_.t = step_ * dt_;
    }
    ++snapshot_;
  }

  Checkpoint checkpoint() const {
    auto acc = [](const diagnostics::TrapezoidAccumulator& a) {
      return nlohmann::json{{"total", a.total()},
                            {"last_t", a.last_t()},
                            {"last_value", a.last_value()},
                            {"started", a.started()}};
    };
    nlohmann::json p;
    p["kind"] = "twofluid";
    p["gamma_plus"] = params_.gammas.gamma_plus();
    p["gamma_minus"] = params_.gammas.gamma_minus();
    p["mu"] = params_.mu;
    p["lambda"] = params_.lambda;
    p["s"] = s_;
    p["dt"] = dt_;
    p["steps_per_snapshot"] = m_;
    p["snapshot_index"] = snapshot_;
    p["step_index"] = step_;
    p["dissipation"] = acc(diag_.dissipation());
    p["h1_integral"] = acc(diag_.h1_integral());
    return Checkpoint{state_.R.grid_ptr(), state_.t, params_.epsilon, p, state_.R, state_.Q,
                      state_.u};
  }

 private:
  PhysParams params_;
  double interval_;
  int count_;
  double cfl_;
  int s_;
  FieldState state_;
  diagnostics::RunDiagnostics diag_;
  int m_ = 1;
  double dt_ = 0.0;
  int snapshot_ = 0;
  long step_ = 0;
};

inline const std::vector<std::string>& energy_csv_columns() {
  static const std::vector<std::string> cols{
      "t", "E_s", "F_s", "rel_energy", "div_u_Hs1", "rate_RQ_Hs_sq", "rate_u_L2sq_H1int",
      "rate_div_diff_Hs1"};
  return cols;
}

inline std::vector<double> energy_csv_row(const diagnostics::EnergyReport& r) {
  return {r.t, r.E_s, r.F_s, r.rel_energy, r.rate_div, r.rate_RQ_sq, r.velocity_rate(),
          r.rate_div_diff};
}

/// CSV sinks of a two-fluid run directory.
class RunOutputs {
 public:
  explicit RunOutputs(const std::filesystem::path& dir)
      : energy_(prepare(dir) / "energy.csv", energy_csv_columns()),
        relative_(dir / "relative_energy.csv", {"t", "rel_energy", "visc_dissipation"}),
        conservation_(dir / "conservation.csv",
                      {"t", "mass_R", "mass_Q", "total_energy", "potential_as_written",
                       "F_weight_min", "F_weight_max"}) {}

  void write(const diagnostics::EnergyReport& r) {
    energy_.row(energy_csv_row(r));
    relative_.row({r.t, r.rel_energy, r.visc_dissipation});
    conservation_.row({r.t, r.mass_R, r.mass_Q, r.total_energy, r.potential_as_written,
                       r.F_weight_min, r.F_weight_max});
  }

 private:
  static std::filesystem::path prepare(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    return dir;
  }
  CsvWriter energy_;
  CsvWriter relative_;
  CsvWriter conservation_;
};

inline std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int snapshot) {
  std::ostringstream name;
  name << "checkpoint_" << std::setw(5) << std::setfill('0') << snapshot << ".bin";
  return dir / name.str();
}

inline bool is_checkpoint_snapshot(const RunConfig& cfg, int snapshot) {
  if (!cfg.output.write_checkpoints) return false;
  for (double t : cfg.output.checkpoint_times) {
    if (std::llround(t / cfg.time.snapshot_interval) == snapshot) return true;
  }
  return false;
}

struct SimulationResult {
  std::vector<diagnostics::EnergyReport> history;
  FieldState final_state;
  double dt = 0.0;
  int steps_per_snapshot = 0;
};

/// Two-fluid run at cfg.physics.epsilon with the incompressible reference in
/// lockstep; writes CSVs and the configured checkpoints into `out`. When
/// `resume` is given the run continues from that checkpoint.
inline SimulationResult simulate(const RunConfig& cfg, const std::filesystem::path& out,
                                 const std::optional<Checkpoint>& resume = std::nullopt) {
  cfg.validate();
  const auto grid = resume ? resume->grid : make_grid(cfg);
  TwoFluidRun run = resume ? TwoFluidRun::resume(cfg, *resume)
                           : TwoFluidRun(cfg, grid, cfg.physics.epsilon);
  ReferenceRun ref(cfg, run.state().R.grid_ptr(), run.steps_per_snapshot());
  while (ref.snapshot() < run.snapshot()) ref.advance_snapshot();

  RunOutputs outputs(out);
  SimulationResult res;
  res.dt = run.dt();
  res.steps_per_snapshot = run.steps_per_snapshot();
  auto record = [&] {
    const auto r = run.observe(ref.state().u);
    outputs.write(r);
    res.history.push_back(r);
    if (is_checkpoint_snapshot(cfg, run.snapshot())) {
      write_checkpoint(checkpoint_path(out, run.snapshot()), run.checkpoint());
    }
  };
  if (!resume) record();
  while (!run.finished()) {
    run.advance_snapshot();
    ref.advance_snapshot();
    record();
  }
  res.final_state = run.state();
  return res;
}

struct ReferenceResult {
  std::vector<double> t;
  std::vector<double> kinetic_energy;
  std::vector<double> enstrophy;
  std::vector<double> max_divergence;
  ins::InsState final_state;
};

/// Incompressible reference alone; writes energy.csv and checkpoints (with
/// R = Q = 1 so the two-fluid checkpoint layout is reused).
inline ReferenceResult reference(const RunConfig& cfg, const std::filesystem::path& out) {
  cfg.validate();
  const auto grid = make_grid(cfg);
  ReferenceRun ref(cfg, grid, ReferenceRun::natural_steps(cfg, grid));
  std::filesystem::create_directories(out);
  CsvWriter csv(out / "energy.csv", {"t", "kinetic_energy", "enstrophy"});
  ReferenceResult res;
  auto record = [&] {
    const auto& u = ref.state().u;
    res.t.push_back(ref.state().t);
    res.kinetic_energy.push_back(ins::kinetic_energy(u));
    res.enstrophy.push_back(ins::enstrophy(u));
    res.max_divergence.push_back(field::divergence(u).max_abs());
    csv.row({res.t.back(), res.kinetic_energy.back(), res.enstrophy.back()});
    if (is_checkpoint_snapshot(cfg, ref.snapshot())) {
      nlohmann::json p{{"kind", "reference"},
                       {"mu", cfg.physics.mu},
                       {"dt", ref.dt()},
                       {"snapshot_index", ref.snapshot()}};
      write_checkpoint(checkpoint_path(out, ref.snapshot()),
                       Checkpoint{grid, ref.state().t, 1.0, p, ScalarField(grid, 1.0),
                                  ScalarField(grid, 1.0), u});
    }
  };
  record();
  while (!ref.finished()) {
    ref.advance_snapshot();
    record();
  }
  res.final_state = ref.state();
  return res;
}

}  // namespace twofluid
