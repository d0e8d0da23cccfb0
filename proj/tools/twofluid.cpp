// twofluid: command-line driver for the two-fluid solver, the incompressible
// reference, Picard iteration and epsilon sweeps.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "twofluid/closure.hpp"
#include "twofluid/config.hpp"
#include "twofluid/runs.hpp"
#include "twofluid/sweep.hpp"

namespace fs = std::filesystem;
using namespace twofluid;

namespace {

constexpr int kExitRateFailure = 2;
constexpr int kExitRuntimeError = 1;

struct CommonOptions {
  std::string config;
  std::string out;
  int workers = 0;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "run configuration (INI)");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--workers", o.workers, "concurrent sweep jobs")->check(CLI::NonNegativeNumber);
  app->add_option("--seed", o.seed, "override [init] seed");
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.init.seed = *o.seed;
  if (o.workers > 0) cfg.sweep.workers = o.workers;
  cfg.validate();
  return cfg;
}

/// --out, then [output] directory, then $TWOFLUID_OUTPUT_ROOT/<command>,
/// then ./twofluid-out/<command>.
fs::path resolve_out(const CommonOptions& o, const RunConfig& cfg, const std::string& command) {
  if (!o.out.empty()) return o.out;
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  if (const char* root = std::getenv("TWOFLUID_OUTPUT_ROOT"); root && *root) {
    return fs::path(root) / command;
  }
  return fs::path("twofluid-out") / command;
}

std::vector<double> parse_range(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw InvalidConfig("range must look like a:b:n, got '" + text + "'");
  }
  double lo = 0.0, hi = 0.0;
  int n = 0;
  try {
    lo = std::stod(text.substr(0, a));
    hi = std::stod(text.substr(a + 1, b - a - 1));
    n = std::stoi(text.substr(b + 1));
  } catch (const std::exception&) {
    throw InvalidConfig("range must look like a:b:n, got '" + text + "'");
  }
  if (n < 1) throw InvalidConfig("range needs at least one point");
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  return v;
}

int closure_table(const std::string& gammas, const std::string& r_range,
                  const std::string& q_range, const std::string& out) {
  const auto g = detail::parse_list(gammas);
  if (g.size() != 2) throw InvalidConfig("--gammas expects gamma_plus,gamma_minus");
  const closure::Gammas gm(g[0], g[1]);
  const auto rs = parse_range(r_range);
  const auto qs = parse_range(q_range);
  if (!out.empty() && fs::path(out).has_parent_path()) {
    fs::create_directories(fs::path(out).parent_path());
  }
  CsvWriter csv(out, {"R", "Q", "Z", "alpha", "p", "dZdR", "dZdQ"});
  for (double r : rs) {
    for (double q : qs) {
      const auto j = closure::jet(r, q, gm);
      csv.row({r, q, j.Z, j.alpha, j.p, j.dZdR, j.dZdQ});
    }
  }
  return 0;
}

void print_report(const RateReport& r, std::ostream& os) {
  os << "epsilon sup_R_Hs sup_div_Hs1 sup_u_rate sup_rel_energy\n";
  for (const auto& e : r.runs) {
    os << format_number(e.epsilon) << ' ';
    if (!e.completed) {
      os << "failed: " << e.error << '\n';
      continue;
    }
    os << format_number(e.sup_R_Hs) << ' ' << format_number(e.sup_div_Hs1) << ' '
       << format_number(e.sup_u_rate) << ' ' << format_number(e.sup_rel_energy) << '\n';
  }
  for (const auto& f : r.fits) {
    os << f.quantity << ": ";
    if (!f.computed) {
      os << "no fit\n";
      continue;
    }
    os << "slope " << format_number(f.fit.slope) << " residual " << format_number(f.fit.residual)
       << (f.required ? (f.pass ? " PASS" : " FAIL") : " (informational)") << '\n';
  }
  os << (r.partial ? "partial sweep\n" : "") << (r.pass ? "rates: PASS\n" : "rates: FAIL\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-fluid low Mach number laboratory"};
  app.require_subcommand(1);

  auto* closure_cmd = app.add_subcommand("closure", "pressure closure utilities");
  closure_cmd->require_subcommand(1);
  auto* table = closure_cmd->add_subcommand("table", "tabulate the closure on a grid");
  std::string gammas = "2,3", r_range, q_range, table_out;
  table->add_option("--gammas", gammas, "gamma_plus,gamma_minus");
  table->add_option("--r-range", r_range, "a:b:n")->required();
  table->add_option("--q-range", q_range, "a:b:n")->required();
  table->add_option("--out", table_out, "CSV path")->required();

  CommonOptions sim_opt, ref_opt, pic_opt, rates_opt;
  auto* simulate = app.add_subcommand("simulate", "two-fluid run at [physics] epsilon");
  add_common(simulate, sim_opt);
  std::string resume_path;
  simulate->add_option("--resume", resume_path, "checkpoint to continue from");

  auto* reference_cmd = app.add_subcommand("reference", "incompressible reference run");
  add_common(reference_cmd, ref_opt);

  auto* picard_cmd = app.add_subcommand("picard", "Picard iteration contraction study");
  add_common(picard_cmd, pic_opt);
  int iters = 0;
  picard_cmd->add_option("--iters", iters, "number of iterations")->check(CLI::PositiveNumber);

  auto* rates = app.add_subcommand("rates", "epsilon sweep with slope fits");
  add_common(rates, rates_opt);

  auto* report_cmd = app.add_subcommand("report", "summarize a saved rate report");
  std::string report_path;
  report_cmd->add_option("report", report_path, "report.json or its directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*closure_cmd) return closure_table(gammas, r_range, q_range, table_out);

    if (*simulate) {
      const auto cfg = resolve_config(sim_opt);
      const auto out = resolve_out(sim_opt, cfg, "simulate");
      std::optional<Checkpoint> resume;
      if (!resume_path.empty()) resume = read_checkpoint(resume_path);
      const auto res = twofluid::simulate(cfg, out, resume);
      const auto& last = res.history.back();
      std::cout << "t " << format_number(last.t) << " E_s " << format_number(last.E_s)
                << " rel_energy " << format_number(last.rel_energy) << '\n';
      return 0;
    }

    if (*reference_cmd) {
      const auto cfg = resolve_config(ref_opt);
      const auto res = twofluid::reference(cfg, resolve_out(ref_opt, cfg, "reference"));
      std::cout << "t " << format_number(res.t.back()) << " kinetic_energy "
                << format_number(res.kinetic_energy.back()) << '\n';
      return 0;
    }

    if (*picard_cmd) {
      const auto cfg = resolve_config(pic_opt);
      const int K = iters > 0 ? iters : cfg.picard.iterations;
      const auto res = picard_run(cfg, K, resolve_out(pic_opt, cfg, "picard"));
      for (const auto& r : res.iteration.records) {
        std::cout << "k " << r.k << " d_k " << format_number(r.d()) << " ratio "
                  << format_number(r.ratio) << '\n';
      }
      std::cout << "distance to nonlinear " << format_number(res.to_nonlinear.total()) << '\n';
      return 0;
    }

    if (*rates) {
      const auto cfg = resolve_config(rates_opt);
      const auto report = run_sweep(cfg, cfg.sweep.workers);
      save_report(report, resolve_out(rates_opt, cfg, "rates"));
      print_report(report, std::cout);
      return report.pass ? 0 : kExitRateFailure;
    }

    if (*report_cmd) {
      fs::path p = report_path;
      if (fs::is_directory(p)) p /= "report.json";
      const auto report = load_report(p);
      print_report(report, std::cout);
      return report.pass ? 0 : kExitRateFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return 0;
}
