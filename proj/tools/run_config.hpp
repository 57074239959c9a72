#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kansa::cli {

/// Everything a benchmark run needs, serializable to a key=value text file.
/// Flags override file values; unknown keys are rejected.
struct RunConfig {
  std::string problem = "poisson-square";
  std::string mode = "one-level";      // one-level | multilevel
  int levels = 4;
  std::string schedule = "";           // fixed | experimental | theoretical; "" = default per mode
  double delta = 2.0;                  // fixed schedule
  double mu = 0.5;
  double v = 2.4;
  double sigma = 4.5;
  int dim = 2;
  int eval_grid = 1000;
  long cg_max_iter = 200000;
  int threads = 0;                     // 0 = hardware
  std::string output = "";             // report file; empty = stdout table only
  std::string format = "csv";          // csv | json
  bool dump_matrices = false;
  bool dump_points = false;
  bool dump_solutions = false;

  std::string schedule_or_default() const {
    if (!schedule.empty()) return schedule;
    return mode == "multilevel" ? "experimental" : "fixed";
  }

  void validate() const {
    if (mode != "one-level" && mode != "multilevel")
      throw std::invalid_argument("config: mode must be one-level or multilevel");
    if (levels < 1) throw std::invalid_argument("config: levels must be >= 1");
    const std::string sched = schedule_or_default();
    if (sched != "fixed" && sched != "experimental" && sched != "theoretical")
      throw std::invalid_argument("config: schedule must be fixed, experimental or theoretical");
    if (!(delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("config: mu must be in (0,1)");
    if (!(v > 0.0)) throw std::invalid_argument("config: v must be positive");
    if (dim != 2) throw std::invalid_argument("config: only dim=2 is supported");
    if (!(sigma > 0.5 * dim + 2.0)) throw std::invalid_argument("config: need sigma > d/2 + 2");
    if (eval_grid != 0 && eval_grid < 2)
      throw std::invalid_argument("config: eval_grid must be 0 or >= 2");
    if (cg_max_iter < 1) throw std::invalid_argument("config: cg_max_iter must be >= 1");
    if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
    if (format != "csv" && format != "json")
      throw std::invalid_argument("config: format must be csv or json");
  }

  std::string serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "problem=" << problem << '\n'
       << "mode=" << mode << '\n'
       << "levels=" << levels << '\n'
       << "schedule=" << schedule << '\n'
       << "delta=" << delta << '\n'
       << "mu=" << mu << '\n'
       << "v=" << v << '\n'
       << "sigma=" << sigma << '\n'
       << "dim=" << dim << '\n'
       << "eval_grid=" << eval_grid << '\n'
       << "cg_max_iter=" << cg_max_iter << '\n'
       << "threads=" << threads << '\n'
       << "output=" << output << '\n'
       << "format=" << format << '\n'
       << "dump_matrices=" << (dump_matrices ? 1 : 0) << '\n'
       << "dump_points=" << (dump_points ? 1 : 0) << '\n'
       << "dump_solutions=" << (dump_solutions ? 1 : 0) << '\n';
    return os.str();
  }

  void apply_key(const std::string& key, const std::string& value) {
    if (key == "problem") problem = value;
    else if (key == "mode") mode = value;
    else if (key == "levels") levels = std::stoi(value);
    else if (key == "schedule") schedule = value;
    else if (key == "delta") delta = std::stod(value);
    else if (key == "mu") mu = std::stod(value);
    else if (key == "v") v = std::stod(value);
    else if (key == "sigma") sigma = std::stod(value);
    else if (key == "dim") dim = std::stoi(value);
    else if (key == "eval_grid") eval_grid = std::stoi(value);
    else if (key == "cg_max_iter") cg_max_iter = std::stol(value);
    else if (key == "threads") threads = std::stoi(value);
    else if (key == "output") output = value;
    else if (key == "format") format = value;
    else if (key == "dump_matrices") dump_matrices = value == "1" || value == "true";
    else if (key == "dump_points") dump_points = value == "1" || value == "true";
    else if (key == "dump_solutions") dump_solutions = value == "1" || value == "true";
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
};

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    cfg.apply_key(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace kansa::cli
