#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsfem/nonlinear.hpp"

namespace nsfem {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Scenario { Analytical, Cavity2d };
std::string to_string(Scenario s);
std::optional<Scenario> parse_scenario(const std::string& name);

/// u = (cos x sin y, -sin x cos y), p = -(cos 2x + cos 2y)/4 + x + y.
Vec2 exact_velocity(double x, double y);
double exact_pressure(double x, double y);
/// f = -nu lap u + (u . grad) u + grad p for the exact pair above.
VectorFunction forcing_from_exact(double nu);

inline constexpr double kCavityReCap = 2500.0;

struct BenchConfig {
  Scenario scenario = Scenario::Analytical;
  std::vector<double> re{1000.0};
  std::vector<int> mesh_n{32};
  std::vector<Method> methods{Method::Picard, Method::Newton, Method::PicardNewton};
  double tol = 1e-8;
  int max_iter = 200;
  double blowup = 1e4;
  int aa_depth = 1;
  double aa_beta = 1.0;
  /// Interior constants c of the initial guess (c, 0).
  std::vector<double> u0{0.0};
  /// Residuals used by the order fit in the summary.
  int order_tail = 4;
  bool allow_high_re = false;

  /// Throws ConfigError.
  void validate() const;
};

/// Parse JSON text; keys not present keep their defaults, unknown keys are
/// rejected. Throws ConfigError.
BenchConfig parse_config(const std::string& json_text, BenchConfig base = {});
BenchConfig load_config(const std::filesystem::path& path);

/// Analytical: exact-solution forcing and boundary data. Cavity: f = 0 and the
/// lid (1, 0) on Top.
std::unique_ptr<NseProblem> make_problem(Scenario scenario, std::shared_ptr<const MixedSpace> space, double re);
std::shared_ptr<const MixedSpace> refined_space(int n);

struct RunRecord {
  Scenario scenario = Scenario::Analytical;
  Method method = Method::Picard;
  double re = 0.0;
  int mesh_n = 0;
  double u0 = 0.0;
  std::size_t velocity_dofs = 0;
  std::size_t pressure_dofs = 0;
  ConvergenceHistory history;
  double wall_seconds = 0.0;
  std::optional<double> l2_error;
  std::optional<double> order_fit;

  std::size_t dofs() const { return velocity_dofs + pressure_dofs; }
  std::string history_file_name() const;
};

/// Run every (mesh, Re, u0, method) combination. Writes one history CSV per
/// run and summary.csv into `out_dir` when it is non-empty. Progress lines go
/// to `log` if given.
std::vector<RunRecord> run_scenario(const BenchConfig& config, const std::filesystem::path& out_dir,
                                    std::ostream* log = nullptr);

void write_history_csv(const ConvergenceHistory& history, std::ostream& out);
void emit_history_csv(const RunRecord& record, const std::filesystem::path& path);
void write_summary_csv(const std::vector<RunRecord>& records, std::ostream& out);
void emit_summary(const std::vector<RunRecord>& records, const std::filesystem::path& path);

/// Residual column (res_l2 or res_h1) of a history CSV.
std::vector<double> read_history_residuals(const std::filesystem::path& path, ResidualNorm norm);

}  // namespace nsfem
