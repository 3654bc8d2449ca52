#include "hamrec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace hamrec {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
    } catch (const std::exception&) {
      throw ConfigError("config: bad number '" + item + "' in " + key);
    }
  }
  return out;
}

/// flat `section.key = value` lines, '#' comments, blank lines ignored
std::map<std::string, std::string> parse_config_text(std::istream& in,
                                                     const std::string& name) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

class ConfigReader {
 public:
  explicit ConfigReader(std::map<std::string, std::string> kv)
      : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string str(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing key '" + key + "'");
    used_.insert(key);
    return it->second;
  }
  std::string str_or(const std::string& key, const std::string& dflt) {
    return has(key) ? str(key) : dflt;
  }
  double num(const std::string& key) {
    const std::string v = str(key);
    try {
      size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("config: bad number '" + v + "' for " + key);
    }
  }
  double num_or(const std::string& key, double dflt) {
    return has(key) ? num(key) : dflt;
  }
  long long integer(const std::string& key) {
    const double x = num(key);
    if (x != std::floor(x)) {
      throw ConfigError("config: expected integer for " + key);
    }
    return static_cast<long long>(x);
  }
  long long integer_or(const std::string& key, long long dflt) {
    return has(key) ? integer(key) : dflt;
  }
  std::vector<double> list(const std::string& key) {
    return parse_list(str(key), key);
  }

  void check_all_used() const {
    for (const auto& [key, value] : kv_) {
      if (!used_.count(key)) {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    }
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          size_t n_cols) {
  std::ifstream in(path);
  if (!in) throw IoError("missing result file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row = parse_list(line, path);
    if (row.size() != n_cols) {
      throw IoError("'" + path + "': expected " + std::to_string(n_cols) +
                    " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("'" + path + "': no data rows");
  return rows;
}

}  // namespace

ElementField SigmaTrueSpec::sample(const SpaceGrid& grid) const {
  ElementField sigma(grid.n_elements);
  for (int e = 0; e < grid.n_elements; ++e) {
    const double x = grid.element_center(e);
    switch (kind) {
      case Kind::tanh_profile:
        sigma[e] = offset + amplitude * std::tanh(steepness * (x - center));
        break;
      case Kind::piecewise_constant: {
        size_t seg = 0;
        while (seg < breakpoints.size() && x >= breakpoints[seg]) ++seg;
        sigma[e] = values[seg];
        break;
      }
      case Kind::constant:
        sigma[e] = value;
        break;
    }
  }
  return sigma;
}

BoundaryTrace FluxSpec::sample(const TimeGrid& tgrid) const {
  BoundaryTrace trace = BoundaryTrace::zeros(tgrid.n_levels());
  for (int n = 0; n < tgrid.n_levels(); ++n) {
    const double t = tgrid.times[n];
    double j = 0.0;
    switch (kind) {
      case Kind::sin_burst:
        j = t < cutoff_time ? amplitude * std::sin(frequency * t) : 0.0;
        break;
      case Kind::constant:
        j = value;
        break;
    }
    trace.left[n] = j;
    trace.right[n] = j;
  }
  return trace;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  ConfigReader cfg(parse_config_text(in, path));

  ExperimentConfig c;
  const std::string eq = cfg.str("problem.equation");
  if (eq == "heat") {
    c.equation = Equation::heat;
  } else if (eq == "wave") {
    c.equation = Equation::wave;
  } else {
    throw ConfigError("config: problem.equation must be heat or wave");
  }

  c.space_a = cfg.num_or("space.a", 0.0);
  c.space_b = cfg.num_or("space.b", 1.0);
  c.space_elements = static_cast<int>(cfg.integer("space.elements"));
  c.time_final = cfg.num("time.final");
  c.time_steps = static_cast<int>(cfg.integer("time.steps"));
  c.sigma_minus = cfg.num("bounds.sigma_minus");
  c.sigma_plus = cfg.num("bounds.sigma_plus");
  c.delta_start = cfg.num_or("continuation.delta_start", 1e-1);
  c.delta_end = cfg.num_or("continuation.delta_end", 1e-6);
  c.continuation_stages =
      static_cast<int>(cfg.integer_or("continuation.stages", 8));

  const std::string st = cfg.str("sigma_true.kind");
  if (st == "tanh_profile") {
    c.sigma_true.kind = SigmaTrueSpec::Kind::tanh_profile;
    c.sigma_true.offset = cfg.num("sigma_true.offset");
    c.sigma_true.amplitude = cfg.num("sigma_true.amplitude");
    c.sigma_true.steepness = cfg.num("sigma_true.steepness");
    c.sigma_true.center = cfg.num("sigma_true.center");
  } else if (st == "piecewise_constant") {
    c.sigma_true.kind = SigmaTrueSpec::Kind::piecewise_constant;
    c.sigma_true.breakpoints = cfg.list("sigma_true.breakpoints");
    c.sigma_true.values = cfg.list("sigma_true.values");
    if (!std::is_sorted(c.sigma_true.breakpoints.begin(),
                        c.sigma_true.breakpoints.end()) ||
        c.sigma_true.values.size() != c.sigma_true.breakpoints.size() + 1) {
      throw ConfigError("config: piecewise sigma_true needs sorted breakpoints and one more value than breakpoints");
    }
  } else if (st == "constant") {
    c.sigma_true.kind = SigmaTrueSpec::Kind::constant;
    c.sigma_true.value = cfg.num("sigma_true.value");
  } else {
    throw ConfigError("config: sigma_true.kind must be tanh_profile, piecewise_constant or constant");
  }

  const std::string fx = cfg.str("flux.kind");
  if (fx == "sin_burst") {
    c.flux.kind = FluxSpec::Kind::sin_burst;
    c.flux.amplitude = cfg.num("flux.amplitude");
    c.flux.frequency = cfg.num("flux.frequency");
    c.flux.cutoff_time = cfg.num("flux.cutoff_time");
  } else if (fx == "constant") {
    c.flux.kind = FluxSpec::Kind::constant;
    c.flux.value = cfg.num("flux.value");
  } else {
    throw ConfigError("config: flux.kind must be sin_burst or constant");
  }

  c.space_refinement = static_cast<int>(cfg.integer_or("data.space_refinement", 1));
  c.time_refinement = static_cast<int>(cfg.integer_or("data.time_refinement", 1));
  c.noise.eta = cfg.num_or("noise.eta", 0.0);
  c.noise.seed = static_cast<std::uint64_t>(cfg.integer_or("noise.seed", 0));

  c.newton.residual_tol = cfg.num_or("newton.residual_tol", 1e-8);
  c.newton.max_iters = static_cast<int>(cfg.integer_or("newton.max_iters", 50));
  const std::string damping = cfg.str_or("newton.damping", "backtracking");
  if (damping == "backtracking") {
    c.newton.backtracking = true;
  } else if (damping == "fixed") {
    c.newton.backtracking = false;
  } else {
    throw ConfigError("config: newton.damping must be backtracking or fixed");
  }
  c.newton.alpha = cfg.num_or("newton.alpha", 1.0);
  c.newton.backtracking_shrink = cfg.num_or("newton.shrink", 0.5);
  c.newton.min_alpha = cfg.num_or("newton.min_alpha", 1.0 / 1024.0);

  c.krylov.rel_tol = cfg.num_or("krylov.rel_tol", 1e-8);
  c.krylov.max_iters = static_cast<int>(cfg.integer_or("krylov.max_iters", 500));
  c.krylov.restart = static_cast<int>(cfg.integer_or("krylov.restart", 50));

  const std::string ls = cfg.str_or("solver.linear", "direct");
  if (ls == "direct") {
    c.linear_solver = LinearSolverKind::direct;
  } else if (ls == "gmres_gs") {
    c.linear_solver = LinearSolverKind::gmres_gs;
  } else {
    throw ConfigError("config: solver.linear must be direct or gmres_gs");
  }

  const std::string sides = cfg.str_or("measurements.sides", "both");
  if (sides == "both") {
    c.observe = {true, true};
  } else if (sides == "left") {
    c.observe = {true, false};
  } else if (sides == "right") {
    c.observe = {false, true};
  } else {
    throw ConfigError("config: measurements.sides must be both, left or right");
  }

  c.output_dir = cfg.str_or("output.dir", ".");
  cfg.check_all_used();

  // structural validation
  if (c.space_elements < 1 || c.time_steps < 1) {
    throw ConfigError("config: need at least one element and one time step");
  }
  if (!(c.space_a < c.space_b) || !(c.time_final > 0.0)) {
    throw ConfigError("config: need space.a < space.b and time.final > 0");
  }
  if (!(c.sigma_minus > 0.0) || !(c.sigma_minus < c.sigma_plus)) {
    throw ConfigError("config: need 0 < bounds.sigma_minus < bounds.sigma_plus");
  }
  if (c.space_refinement < 1 || c.time_refinement < 1) {
    throw ConfigError("config: refinement factors must be >= 1");
  }
  if (c.noise.eta < 0.0) throw ConfigError("config: noise.eta must be >= 0");
  if (c.continuation_stages < 1 ||
      (c.continuation_stages > 1 && !(c.delta_end < c.delta_start)) ||
      !(c.delta_end > 0.0)) {
    throw ConfigError("config: continuation needs delta_start > delta_end > 0");
  }
  return c;
}

std::map<std::string, std::string> ExperimentConfig::resolved_entries() const {
  std::map<std::string, std::string> m;
  m["problem.equation"] = equation == Equation::heat ? "heat" : "wave";
  m["space.a"] = fmt(space_a);
  m["space.b"] = fmt(space_b);
  m["space.elements"] = std::to_string(space_elements);
  m["time.final"] = fmt(time_final);
  m["time.steps"] = std::to_string(time_steps);
  m["bounds.sigma_minus"] = fmt(sigma_minus);
  m["bounds.sigma_plus"] = fmt(sigma_plus);
  m["continuation.delta_start"] = fmt(delta_start);
  m["continuation.delta_end"] = fmt(delta_end);
  m["continuation.stages"] = std::to_string(continuation_stages);
  switch (sigma_true.kind) {
    case SigmaTrueSpec::Kind::tanh_profile:
      m["sigma_true.kind"] = "tanh_profile";
      m["sigma_true.offset"] = fmt(sigma_true.offset);
      m["sigma_true.amplitude"] = fmt(sigma_true.amplitude);
      m["sigma_true.steepness"] = fmt(sigma_true.steepness);
      m["sigma_true.center"] = fmt(sigma_true.center);
      break;
    case SigmaTrueSpec::Kind::piecewise_constant: {
      m["sigma_true.kind"] = "piecewise_constant";
      std::string bp, vals;
      for (double b : sigma_true.breakpoints) {
        if (!bp.empty()) bp += ",";
        bp += fmt(b);
      }
      for (double v : sigma_true.values) {
        if (!vals.empty()) vals += ",";
        vals += fmt(v);
      }
      m["sigma_true.breakpoints"] = bp;
      m["sigma_true.values"] = vals;
      break;
    }
    case SigmaTrueSpec::Kind::constant:
      m["sigma_true.kind"] = "constant";
      m["sigma_true.value"] = fmt(sigma_true.value);
      break;
  }
  switch (flux.kind) {
    case FluxSpec::Kind::sin_burst:
      m["flux.kind"] = "sin_burst";
      m["flux.amplitude"] = fmt(flux.amplitude);
      m["flux.frequency"] = fmt(flux.frequency);
      m["flux.cutoff_time"] = fmt(flux.cutoff_time);
      break;
    case FluxSpec::Kind::constant:
      m["flux.kind"] = "constant";
      m["flux.value"] = fmt(flux.value);
      break;
  }
  m["data.space_refinement"] = std::to_string(space_refinement);
  m["data.time_refinement"] = std::to_string(time_refinement);
  m["noise.eta"] = fmt(noise.eta);
  m["noise.seed"] = std::to_string(noise.seed);
  m["newton.residual_tol"] = fmt(newton.residual_tol);
  m["newton.max_iters"] = std::to_string(newton.max_iters);
  m["newton.damping"] = newton.backtracking ? "backtracking" : "fixed";
  m["newton.alpha"] = fmt(newton.alpha);
  m["newton.shrink"] = fmt(newton.backtracking_shrink);
  m["newton.min_alpha"] = fmt(newton.min_alpha);
  m["krylov.rel_tol"] = fmt(krylov.rel_tol);
  m["krylov.max_iters"] = std::to_string(krylov.max_iters);
  m["krylov.restart"] = std::to_string(krylov.restart);
  m["solver.linear"] =
      linear_solver == LinearSolverKind::direct ? "direct" : "gmres_gs";
  m["measurements.sides"] =
      observe.left && observe.right ? "both" : (observe.left ? "left" : "right");
  m["output.dir"] = output_dir;
  return m;
}

SpaceGrid ExperimentConfig::solver_space_grid() const {
  return SpaceGrid::uniform(space_a, space_b, space_elements);
}
TimeGrid ExperimentConfig::solver_time_grid() const {
  return TimeGrid::uniform(time_final, time_steps);
}
SpaceGrid ExperimentConfig::data_space_grid() const {
  return SpaceGrid::uniform(space_a, space_b, space_elements * space_refinement);
}
TimeGrid ExperimentConfig::data_time_grid() const {
  return TimeGrid::uniform(time_final, time_steps * time_refinement);
}
ControlBounds ExperimentConfig::bounds() const {
  return ControlBounds(sigma_minus, sigma_plus);
}

ReconstructionProblem ExperimentConfig::problem(
    const BoundaryTrace& measurements) const {
  ReconstructionProblem p;
  p.equation = equation;
  p.space_grid = solver_space_grid();
  p.time_grid = solver_time_grid();
  p.bounds = bounds();
  p.schedule = ContinuationSchedule::geometric(delta_start, delta_end,
                                               continuation_stages);
  p.flux = flux.sample(p.time_grid);
  p.measurements = measurements;
  p.newton_cfg = newton;
  p.krylov_cfg = krylov;
  p.linear_solver = linear_solver;
  p.observe = observe;
  return p;
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back("# resolved configuration");
  for (const auto& [key, value] : cfg.resolved_entries()) {
    lines.push_back(key + " = " + value);
  }
  write_lines(path, lines);
}

struct Measurements {
  TimeGrid grid;
  BoundaryTrace trace;
};

Measurements read_measurements(const std::string& path) {
  const auto rows = read_csv(path, 3);
  const int n_steps = static_cast<int>(rows.size()) - 1;
  if (n_steps < 1) throw IoError("'" + path + "': need at least two time levels");
  const double T = rows.back()[0];
  if (!(T > 0.0)) throw IoError("'" + path + "': final time must be positive");
  Measurements m{TimeGrid::uniform(T, n_steps),
                 BoundaryTrace::zeros(n_steps + 1)};
  for (int n = 0; n <= n_steps; ++n) {
    if (std::abs(rows[n][0] - m.grid.times[n]) > 1e-9 * std::max(1.0, T)) {
      throw IoError("'" + path + "': time column is not the uniform grid");
    }
    m.trace.left[n] = rows[n][1];
    m.trace.right[n] = rows[n][2];
  }
  return m;
}

}  // namespace

int cmd_generate(const std::string& config_path, const std::string& out_dir,
                 std::optional<long long> seed_override) {
  try {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed_override) {
      cfg.noise.seed = static_cast<std::uint64_t>(*seed_override);
    }
    ensure_dir(cfg.output_dir);

    const SpaceGrid data_grid = cfg.data_space_grid();
    const TimeGrid data_tgrid = cfg.data_time_grid();
    const ElementField sigma_true = cfg.sigma_true.sample(data_grid);
    for (double s : sigma_true) {
      if (!(s > 0.0)) {
        throw ConfigError("config: sigma_true must be strictly positive everywhere");
      }
    }
    const BoundaryTrace flux = cfg.flux.sample(data_tgrid);
    BoundaryTrace trace =
        synthesize_data(cfg.equation, data_grid, data_tgrid, sigma_true, flux);
    trace = add_noise(trace, cfg.noise);

    std::vector<std::string> lines = {"# time,u_left,u_right"};
    for (int n = 0; n < data_tgrid.n_levels(); ++n) {
      lines.push_back(fmt(data_tgrid.times[n]) + "," + fmt(trace.left[n]) +
                      "," + fmt(trace.right[n]));
    }
    write_lines(cfg.output_dir + "/measurements.csv", lines);

    const SpaceGrid solver_grid = cfg.solver_space_grid();
    const ElementField sigma_solver = cfg.sigma_true.sample(solver_grid);
    lines = {"# x_element_center,sigma"};
    for (int e = 0; e < solver_grid.n_elements; ++e) {
      lines.push_back(fmt(solver_grid.element_center(e)) + "," +
                      fmt(sigma_solver[e]));
    }
    write_lines(cfg.output_dir + "/sigma_true.csv", lines);
    write_manifest(cfg.output_dir + "/manifest", cfg);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_reconstruct(const std::string& config_path,
                    const std::string& measurements_path,
                    const std::string& out_dir) {
  try {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    ensure_dir(cfg.output_dir);

    const Measurements data = read_measurements(measurements_path);
    const TimeGrid tgrid = cfg.solver_time_grid();
    const SpaceGrid grid = cfg.solver_space_grid();
    if (std::abs(data.grid.T - tgrid.T) > 1e-9 * tgrid.T) {
      throw ConfigError("measurements cover final time " + fmt(data.grid.T) +
                        " but the config asks for " + fmt(tgrid.T));
    }
    if (data.grid.n_steps % tgrid.n_steps != 0) {
      std::cerr << "note: measurement grid (" << data.grid.n_steps
                << " steps) is not a multiple of the solver grid ("
                << tgrid.n_steps << " steps); interpolating\n";
    } else if (data.grid.n_steps != tgrid.n_steps) {
      std::cerr << "note: interpolating measurements from " << data.grid.n_steps
                << " onto " << tgrid.n_steps << " time steps\n";
    }
    const BoundaryTrace measurements =
        interpolate_trace(data.trace, data.grid, tgrid);

    const ReconstructionProblem problem = cfg.problem(measurements);
    const ReconstructionResult result = continuation_solve(problem);

    const RegularizedHamiltonian reg(problem.bounds,
                                     problem.schedule.deltas.back());
    const ElementTrace products =
        cfg.equation == Equation::heat
            ? heat_gradient_products(result.heat, grid)
            : wave_gradient_products(result.wave, grid);

    for (const AvgMethod method :
         {AvgMethod::avg1, AvgMethod::avg2, AvgMethod::avg3}) {
      const ElementField avg =
          average_time_independent(products, tgrid, reg, method);
      const int idx = method == AvgMethod::avg1 ? 1
                      : method == AvgMethod::avg2 ? 2 : 3;
      std::vector<std::string> lines = {"# x_element_center,sigma"};
      for (int e = 0; e < grid.n_elements; ++e) {
        lines.push_back(fmt(grid.element_center(e)) + "," + fmt(avg[e]));
      }
      write_lines(cfg.output_dir + "/sigma_avg" + std::to_string(idx) + ".csv",
                  lines);
    }

    {
      // sigma_tilde lives on the scheme's pairing: level n+1 for heat,
      // the step midpoint for the wave
      std::vector<std::string> lines = {"# time,x_element_center,sigma_tilde"};
      for (int n = 0; n < tgrid.n_steps; ++n) {
        const double t = cfg.equation == Equation::heat
                             ? tgrid.times[n + 1]
                             : 0.5 * (tgrid.times[n] + tgrid.times[n + 1]);
        for (int e = 0; e < grid.n_elements; ++e) {
          lines.push_back(fmt(t) + "," + fmt(grid.element_center(e)) + "," +
                          fmt(result.sigma_tilde[n][e]));
        }
      }
      write_lines(cfg.output_dir + "/sigma_spacetime.csv", lines);
    }

    {
      std::vector<std::string> lines = {
          "# delta_stage,newton_iters,final_residual,objective"};
      for (const auto& s : result.stages) {
        lines.push_back(fmt(s.delta) + "," + std::to_string(s.newton_iters) +
                        "," + fmt(s.final_residual) + "," + fmt(s.objective));
      }
      write_lines(cfg.output_dir + "/diagnostics.csv", lines);
    }

    {
      const auto& u = cfg.equation == Equation::heat ? result.heat.u
                                                     : result.wave.u;
      std::vector<std::string> lines = {
          "# time,u_left,u_right,ustar_left,ustar_right"};
      for (int n = 0; n < tgrid.n_levels(); ++n) {
        lines.push_back(fmt(tgrid.times[n]) + "," + fmt(u[n].front()) + "," +
                        fmt(u[n].back()) + "," + fmt(measurements.left[n]) +
                        "," + fmt(measurements.right[n]));
      }
      write_lines(cfg.output_dir + "/fit.csv", lines);
    }

    for (const char* name : {"state_u.csv", "state_q.csv"}) {
      const bool is_u = std::string(name) == "state_u.csv";
      const auto& field = cfg.equation == Equation::heat
                              ? (is_u ? result.heat.u : result.heat.q)
                              : (is_u ? result.wave.u : result.wave.q);
      std::vector<std::string> lines = {"# time,x_node,value"};
      for (int n = 0; n < tgrid.n_levels(); ++n) {
        for (int i = 0; i < grid.n_nodes(); ++i) {
          lines.push_back(fmt(tgrid.times[n]) + "," +
                          fmt(grid.node_coords[i]) + "," + fmt(field[n][i]));
        }
      }
      write_lines(cfg.output_dir + "/" + name, lines);
    }

    if (!result.all_converged) {
      std::cerr << "warning: some continuation stages did not converge; see diagnostics.csv\n";
      return kExitNoConvergence;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_report(const std::string& dir) {
  try {
    // averages panel: x, true, avg1, avg2, avg3
    const auto sigma_true = read_csv(dir + "/sigma_true.csv", 2);
    const auto avg1 = read_csv(dir + "/sigma_avg1.csv", 2);
    const auto avg2 = read_csv(dir + "/sigma_avg2.csv", 2);
    const auto avg3 = read_csv(dir + "/sigma_avg3.csv", 2);
    if (avg1.size() != sigma_true.size() || avg2.size() != sigma_true.size() ||
        avg3.size() != sigma_true.size()) {
      throw IoError("averages and sigma_true.csv disagree on the element count");
    }
    std::vector<std::string> lines = {"# x sigma_true avg1 avg2 avg3"};
    for (size_t e = 0; e < sigma_true.size(); ++e) {
      lines.push_back(fmt(sigma_true[e][0]) + " " + fmt(sigma_true[e][1]) +
                      " " + fmt(avg1[e][1]) + " " + fmt(avg2[e][1]) + " " +
                      fmt(avg3[e][1]));
    }
    write_lines(dir + "/report_averages.dat", lines);

    // space-time fields as gnuplot blocks (blank line between time levels)
    const auto field_report = [&](const std::string& in_name,
                                  const std::string& out_name,
                                  const std::string& header) {
      const auto rows = read_csv(dir + "/" + in_name, 3);
      std::vector<std::string> out = {header};
      for (size_t r = 0; r < rows.size(); ++r) {
        if (r > 0 && rows[r][0] != rows[r - 1][0]) out.push_back("");
        out.push_back(fmt(rows[r][0]) + " " + fmt(rows[r][1]) + " " +
                      fmt(rows[r][2]));
      }
      write_lines(dir + "/" + out_name, out);
    };
    field_report("state_u.csv", "report_u_field.dat", "# time x u");
    field_report("state_q.csv", "report_q_field.dat", "# time x q");
    field_report("sigma_spacetime.csv", "report_sigma_field.dat",
                 "# time x sigma_tilde");

    {
      const auto diag = read_csv(dir + "/diagnostics.csv", 4);
      std::vector<std::string> out = {
          "# stage delta newton_iters final_residual objective"};
      for (size_t i = 0; i < diag.size(); ++i) {
        out.push_back(std::to_string(i) + " " + fmt(diag[i][0]) + " " +
                      fmt(diag[i][1]) + " " + fmt(diag[i][2]) + " " +
                      fmt(diag[i][3]));
      }
      write_lines(dir + "/report_objective.dat", out);
    }

    {
      const auto fit = read_csv(dir + "/fit.csv", 5);
      std::vector<std::string> out = {
          "# time u_left u_right ustar_left ustar_right"};
      for (const auto& row : fit) {
        out.push_back(fmt(row[0]) + " " + fmt(row[1]) + " " + fmt(row[2]) +
                      " " + fmt(row[3]) + " " + fmt(row[4]));
      }
      write_lines(dir + "/report_fit.dat", out);
    }
    return kExitOk;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace hamrec
