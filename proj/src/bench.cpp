#include "nsfem/bench.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nsfem {

using nlohmann::json;

std::string to_string(Scenario s) { return s == Scenario::Analytical ? "analytical" : "cavity2d"; }

std::optional<Scenario> parse_scenario(const std::string& name) {
  if (name == "analytical") return Scenario::Analytical;
  if (name == "cavity2d" || name == "cavity") return Scenario::Cavity2d;
  return std::nullopt;
}

Vec2 exact_velocity(double x, double y) { return {std::cos(x) * std::sin(y), -std::sin(x) * std::cos(y)}; }

double exact_pressure(double x, double y) { return -0.25 * (std::cos(2 * x) + std::cos(2 * y)) + x + y; }

VectorFunction forcing_from_exact(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("forcing_from_exact: nu must be positive");
  return [nu](double x, double y) {
    const double cx = std::cos(x), sx = std::sin(x), cy = std::cos(y), sy = std::sin(y);
    const Vec2 u{cx * sy, -sx * cy};
    // Each component of u is an eigenfunction of the Laplacian: lap u = -2u.
    const Vec2 viscous{2 * nu * u.x, 2 * nu * u.y};
    const Vec2 convection{u.x * (-sx * sy) + u.y * (cx * cy), u.x * (-cx * cy) + u.y * (sx * sy)};
    const Vec2 grad_p{0.5 * std::sin(2 * x) + 1.0, 0.5 * std::sin(2 * y) + 1.0};
    return Vec2{viscous.x + convection.x + grad_p.x, viscous.y + convection.y + grad_p.y};
  };
}

void BenchConfig::validate() const {
  for (double r : re) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("re values must be positive");
    if (scenario == Scenario::Cavity2d && r > kCavityReCap && !allow_high_re) {
      throw ConfigError("cavity2d Re above 2500 needs --allow-high-re");
    }
  }
  for (int n : mesh_n) {
    if (n < 1 || n > 256) throw ConfigError("mesh_n values must lie in [1, 256]");
  }
  for (double c : u0) {
    if (!std::isfinite(c)) throw ConfigError("u0 values must be finite");
  }
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(blowup > 0.0)) throw ConfigError("blowup must be positive");
  if (aa_depth < 0) throw ConfigError("aa_depth must be nonnegative");
  if (!(aa_beta > 0.0 && aa_beta <= 1.0)) throw ConfigError("aa_beta must lie in (0, 1]");
  if (order_tail < 4) throw ConfigError("order_tail must be at least 4");
}

namespace {

template <class T>
std::vector<T> scalar_or_array(const json& v, const char* key) {
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

template <class T>
T scalar(const json& v, const char* key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

}  // namespace

BenchConfig parse_config(const std::string& json_text, BenchConfig cfg) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") {
      const auto s = parse_scenario(scalar<std::string>(value, "scenario"));
      if (!s) throw ConfigError("unknown scenario '" + value.get<std::string>() + "'");
      cfg.scenario = *s;
    } else if (key == "re") {
      cfg.re = scalar_or_array<double>(value, "re");
    } else if (key == "mesh_n") {
      cfg.mesh_n = scalar_or_array<int>(value, "mesh_n");
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& name : scalar_or_array<std::string>(value, "methods")) {
        const auto m = parse_method(name);
        if (!m) throw ConfigError("unknown method '" + name + "'");
        cfg.methods.push_back(*m);
      }
    } else if (key == "tol") {
      cfg.tol = scalar<double>(value, "tol");
    } else if (key == "max_iter") {
      cfg.max_iter = scalar<int>(value, "max_iter");
    } else if (key == "blowup") {
      cfg.blowup = scalar<double>(value, "blowup");
    } else if (key == "aa_depth") {
      cfg.aa_depth = scalar<int>(value, "aa_depth");
    } else if (key == "aa_beta") {
      cfg.aa_beta = scalar<double>(value, "aa_beta");
    } else if (key == "u0") {
      cfg.u0 = scalar_or_array<double>(value, "u0");
    } else if (key == "order_tail") {
      cfg.order_tail = scalar<int>(value, "order_tail");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::shared_ptr<const MixedSpace> refined_space(int n) {
  auto mesh = std::make_shared<const Mesh>(barycenter_refine(uniform_square_mesh(n)));
  return std::make_shared<const MixedSpace>(mesh);
}

std::unique_ptr<NseProblem> make_problem(Scenario scenario, std::shared_ptr<const MixedSpace> space, double re) {
  if (!(re > 0.0)) throw std::invalid_argument("make_problem: Re must be positive");
  const double nu = 1.0 / re;
  if (scenario == Scenario::Analytical) {
    BCData bc = BCData::from_function(space, exact_velocity);
    return std::make_unique<NseProblem>(space, nu, forcing_from_exact(nu), std::move(bc));
  }
  std::array<VectorFunction, 4> lid{};
  lid[static_cast<int>(BoundaryTag::Top)] = [](double, double) { return Vec2{1.0, 0.0}; };
  BCData bc = BCData::from_tags(space, lid);
  std::vector<double> load(space->num_velocity_dofs(), 0.0);
  return std::make_unique<NseProblem>(space, nu, std::move(load), std::move(bc));
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

// Compact number for file names: 1000 -> "1000", 0.5 -> "0.5".
std::string tag_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string RunRecord::history_file_name() const {
  return to_string(scenario) + "_" + to_string(method) + "_re" + tag_number(re) + "_n" + std::to_string(mesh_n) +
         "_u0_" + tag_number(u0) + ".csv";
}

void write_history_csv(const ConvergenceHistory& history, std::ostream& out) {
  out << "iter,res_l2,res_h1,theta_aa,alpha_aa,step_size\n";
  for (const auto& r : history.records) {
    out << r.k << ',' << fmt(r.res_l2) << ',' << fmt(r.res_h1) << ',' << fmt_opt(r.theta) << ','
        << fmt_opt(r.alpha) << ',' << fmt_opt(r.step_size) << '\n';
  }
}

void emit_history_csv(const RunRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  write_history_csv(record.history, out);
}

void write_summary_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << "scenario,method,re,mesh_n,dofs,status,iters,final_res_l2,l2_err,order_fit,u0\n";
  for (const auto& r : records) {
    const std::optional<double> final_res =
        r.history.records.empty() ? std::nullopt : std::optional<double>(r.history.records.back().res_l2);
    out << to_string(r.scenario) << ',' << to_string(r.method) << ',' << tag_number(r.re) << ',' << r.mesh_n << ','
        << r.dofs() << ',' << to_string(r.history.status) << ',' << r.history.iterations << ','
        << fmt_opt(final_res) << ',' << fmt_opt(r.l2_error) << ',' << fmt_opt(r.order_fit) << ','
        << tag_number(r.u0) << '\n';
  }
}

void emit_summary(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  write_summary_csv(records, out);
}

std::vector<RunRecord> run_scenario(const BenchConfig& config, const std::filesystem::path& out_dir,
                                    std::ostream* log) {
  config.validate();
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  std::vector<RunRecord> records;
  if (config.methods.empty()) {
    if (!out_dir.empty()) emit_summary(records, out_dir / "summary.csv");
    return records;
  }
  for (int n : config.mesh_n) {
    const auto space = refined_space(n);
    for (double re : config.re) {
      if (log && config.scenario == Scenario::Cavity2d && re > kCavityReCap) {
        *log << "warning: cavity2d at Re=" << re << " is outside the regime where coarse-mesh runs are meaningful\n";
      }
      const auto problem = make_problem(config.scenario, space, re);
      for (double c : config.u0) {
        for (Method m : config.methods) {
          SolverConfig sc;
          sc.method = m;
          sc.tol = config.tol;
          sc.max_iterations = config.max_iter;
          sc.blowup = config.blowup;
          sc.aa_depth = config.aa_depth;
          sc.aa_beta = config.aa_beta;
          sc.u0 = c == 0.0 ? InitialGuess::zero() : InitialGuess::constant(c);

          RunRecord rec;
          rec.scenario = config.scenario;
          rec.method = m;
          rec.re = re;
          rec.mesh_n = n;
          rec.u0 = c;
          rec.velocity_dofs = space->num_velocity_dofs();
          rec.pressure_dofs = space->num_pressure_dofs();

          const auto t0 = std::chrono::steady_clock::now();
          SolveResult res = run_solver(sc, *problem, {});
          rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          rec.history = std::move(res.history);
          if (config.scenario == Scenario::Analytical) {
            rec.l2_error = l2_error(problem->velocity_field(std::move(res.velocity)), exact_velocity);
          }
          try {
            rec.order_fit = estimate_order(rec.history.residuals(ResidualNorm::L2), config.order_tail);
          } catch (const InsufficientDataError&) {
          }
          if (!out_dir.empty()) emit_history_csv(rec, out_dir / rec.history_file_name());
          if (log) {
            *log << to_string(rec.scenario) << ' ' << to_string(m) << " Re=" << re << " n=" << n << " u0=" << c
                 << ": " << to_string(rec.history.status) << " after " << rec.history.iterations << " iterations ("
                 << rec.wall_seconds << " s)\n";
          }
          records.push_back(std::move(rec));
        }
      }
    }
  }
  if (!out_dir.empty()) emit_summary(records, out_dir / "summary.csv");
  return records;
}

std::vector<double> read_history_residuals(const std::filesystem::path& path, ResidualNorm norm) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const std::string want = norm == ResidualNorm::L2 ? "res_l2" : "res_h1";
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == want) col = i;
  }
  if (col == header.size()) throw std::invalid_argument(path.string() + ": no " + want + " column");
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t i = 0; i <= col; ++i) {
      if (!std::getline(ss, cell, ',')) throw std::invalid_argument(path.string() + ": short row");
    }
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::invalid_argument(path.string() + ": bad number '" + cell + "'");
    }
  }
  return out;
}

}  // namespace nsfem
