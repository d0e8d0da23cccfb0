#pragma once

// Run configuration: INI-style file with [grid], [physics], [init], [time],
// [sweep], [picard] and [output] sections.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <fstream>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "twofluid/errors.hpp"

namespace twofluid {

struct RunConfig {
  struct Grid {
    int dim = 2;
    int n = 64;
    double length = 2.0 * std::numbers::pi;
  } grid;
  struct Physics {
    double gamma_plus = 2.0;
    double gamma_minus = 3.0;
    double mu = 0.1;
    double lambda = 0.0;
    double epsilon = 0.2;
  } physics;
  struct Init {
    std::string u0 = "taylor_green_perturbed";
    double delta0 = 0.5;
    std::uint64_t seed = 1;
    int s = 2;  ///< Sobolev index for profiles and norms
  } init;
  struct Time {
    double T = 0.5;
    double cfl = 0.5;
    double snapshot_interval = 0.01;
  } time;
  struct Sweep {
    std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
    int workers = 1;
  } sweep;
  struct Picard {
    int iterations = 8;
  } picard;
  struct Output {
    std::string directory;
    std::vector<double> checkpoint_times;
    bool write_checkpoints = true;
  } output;

  /// Number of snapshot intervals in [0, T].
  int snapshot_count() const {
    return static_cast<int>(std::llround(time.T / time.snapshot_interval));
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw InvalidConfig(m); };
    if (grid.dim < 1 || grid.dim > 3) fail("[grid] dim must be 1, 2 or 3");
    if (grid.n < 8 || grid.n % 2 != 0) fail("[grid] n must be even and >= 8");
    if (!(grid.length > 0.0)) fail("[grid] length must be positive");
    if (!(physics.gamma_plus > 1.0) || !(physics.gamma_minus > 1.0)) {
      fail("[physics] gamma_plus and gamma_minus must exceed 1");
    }
    if (!(physics.mu > 0.0)) fail("[physics] mu must be positive");
    if (!(2.0 * physics.mu + 3.0 * physics.lambda >= 0.0)) {
      fail("[physics] requires 2 mu + 3 lambda >= 0");
    }
    if (!(physics.epsilon > 0.0) || physics.epsilon > 1.0) fail("[physics] epsilon must lie in (0, 1]");
    if (!(init.delta0 >= 0.0)) fail("[init] delta0 must be non-negative");
    if (init.u0 != "taylor_green" && init.u0 != "taylor_green_perturbed" && init.u0 != "zero") {
      fail("[init] u0 must be taylor_green, taylor_green_perturbed or zero");
    }
    if (init.s < 1 || init.s > 5) fail("[init] s must lie in [1, 5]");
    if (!(time.T > 0.0)) fail("[time] T must be positive");
    if (!(time.cfl > 0.0) || time.cfl > 1.0) fail("[time] cfl must lie in (0, 1]");
    if (!(time.snapshot_interval > 0.0) || time.snapshot_interval > time.T) {
      fail("[time] snapshot_interval must lie in (0, T]");
    }
    const double count = time.T / time.snapshot_interval;
    if (std::abs(count - std::round(count)) > 1e-9 * count) {
      fail("[time] T must be an integer multiple of snapshot_interval");
    }
    if (sweep.epsilons.empty()) fail("[sweep] epsilons must not be empty");
    for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
      const double e = sweep.epsilons[i];
      if (!(e > 0.0) || e > 1.0) fail("[sweep] every epsilon must lie in (0, 1]");
      if (i > 0 && !(e < sweep.epsilons[i - 1])) fail("[sweep] epsilons must be strictly decreasing");
    }
    if (sweep.workers < 1) fail("[sweep] workers must be >= 1");
    if (picard.iterations < 1) fail("[picard] iterations must be >= 1");
    for (double t : output.checkpoint_times) {
      if (!(t >= 0.0) || t > time.T) fail("[output] checkpoint_times must lie in [0, T]");
    }
  }
};

namespace detail {

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    try {
      out.push_back(std::stod(item.substr(b)));
    } catch (const std::exception&) {
      throw InvalidConfig("not a number: '" + item + "'");
    }
  }
  return out;
}

/// Like ptree::get with a default, but a present value that does not convert
/// is an error instead of silently falling back.
template <class T>
T get(const boost::property_tree::ptree& tree, const std::string& path, T fallback) {
  const auto text = tree.get_optional<std::string>(path);
  if (!text) return fallback;
  const auto v = tree.get_optional<T>(path);
  if (!v) throw InvalidConfig("config: bad value '" + *text + "' for " + path);
  return *v;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }

  static const std::vector<std::pair<std::string, std::vector<std::string>>> known = {
      {"grid", {"dim", "n", "length"}},
      {"physics", {"gamma_plus", "gamma_minus", "mu", "lambda", "epsilon"}},
      {"init", {"u0", "delta0", "seed", "s"}},
      {"time", {"T", "cfl", "snapshot_interval"}},
      {"sweep", {"epsilons", "workers"}},
      {"picard", {"iterations"}},
      {"output", {"directory", "checkpoint_times", "write_checkpoints"}},
  };
  for (const auto& [section, body] : tree) {
    auto it = std::find_if(known.begin(), known.end(),
                           [&](const auto& k) { return k.first == section; });
    if (it == known.end()) throw InvalidConfig("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw InvalidConfig("config: unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  RunConfig c;
  try {
    c.grid.dim = detail::get(tree, "grid.dim", c.grid.dim);
    c.grid.n = detail::get(tree, "grid.n", c.grid.n);
    c.grid.length = detail::get(tree, "grid.length", c.grid.length);
    c.physics.gamma_plus = detail::get(tree, "physics.gamma_plus", c.physics.gamma_plus);
    c.physics.gamma_minus = detail::get(tree, "physics.gamma_minus", c.physics.gamma_minus);
    c.physics.mu = detail::get(tree, "physics.mu", c.physics.mu);
    c.physics.lambda = detail::get(tree, "physics.lambda", c.physics.lambda);
    c.physics.epsilon = detail::get(tree, "physics.epsilon", c.physics.epsilon);
    c.init.u0 = detail::get(tree, "init.u0", c.init.u0);
    c.init.delta0 = detail::get(tree, "init.delta0", c.init.delta0);
    c.init.seed = detail::get(tree, "init.seed", c.init.seed);
    c.init.s = detail::get(tree, "init.s", c.init.s);
    c.time.T = detail::get(tree, "time.T", c.time.T);
    c.time.cfl = detail::get(tree, "time.cfl", c.time.cfl);
    c.time.snapshot_interval = detail::get(tree, "time.snapshot_interval", c.time.snapshot_interval);
    if (auto e = tree.get_optional<std::string>("sweep.epsilons")) {
      c.sweep.epsilons = detail::parse_list(*e);
    }
    c.sweep.workers = detail::get(tree, "sweep.workers", c.sweep.workers);
    c.picard.iterations = detail::get(tree, "picard.iterations", c.picard.iterations);
    c.output.directory = detail::get(tree, "output.directory", c.output.directory);
    if (auto t = tree.get_optional<std::string>("output.checkpoint_times")) {
      c.output.checkpoint_times = detail::parse_list(*t);
    }
    c.output.write_checkpoints = detail::get(tree, "output.write_checkpoints", c.output.write_checkpoints);
  } catch (const boost::property_tree::ptree_error& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config " + path.string());
  return parse_config(in);
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["grid"] = {{"dim", c.grid.dim}, {"n", c.grid.n}, {"length", c.grid.length}};
  j["physics"] = {{"gamma_plus", c.physics.gamma_plus},
                  {"gamma_minus", c.physics.gamma_minus},
                  {"mu", c.physics.mu},
                  {"lambda", c.physics.lambda},
                  {"epsilon", c.physics.epsilon}};
  j["init"] = {{"u0", c.init.u0}, {"delta0", c.init.delta0}, {"seed", c.init.seed}, {"s", c.init.s}};
  j["time"] = {{"T", c.time.T}, {"cfl", c.time.cfl}, {"snapshot_interval", c.time.snapshot_interval}};
  j["sweep"] = {{"epsilons", c.sweep.epsilons}};
  j["picard"] = {{"iterations", c.picard.iterations}};
  j["output"] = {{"checkpoint_times", c.output.checkpoint_times},
                 {"write_checkpoints", c.output.write_checkpoints}};
  return j;
}

}  // namespace twofluid
