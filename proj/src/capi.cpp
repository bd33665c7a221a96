#include "nsfem/nsfem.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "nsfem/bench.hpp"

using namespace nsfem;

struct nsf_mesh {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const MixedSpace> space;
};

struct nsf_problem {
  Scenario scenario;
  std::shared_ptr<const MixedSpace> space;
  std::unique_ptr<NseProblem> problem;
};

struct nsf_result {
  std::shared_ptr<const MixedSpace> space;
  SolveResult solve;
  std::optional<double> l2_error;
};

namespace {

thread_local std::string g_last_error;

nsf_status fail(nsf_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Maps exceptions escaping the C++ core onto status codes.
template <class F>
nsf_status guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return fail(NSF_ERR_CONFIG, e.what());
  } catch (const SingularSystemError& e) {
    return fail(NSF_ERR_SINGULAR, e.what());
  } catch (const InsufficientDataError& e) {
    return fail(NSF_ERR_INSUFFICIENT_DATA, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(NSF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(NSF_ERR_IO, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(NSF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NSF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NSF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NSF_ERR_INTERNAL, "unknown error");
  }
}

#define NSF_REQUIRE(cond, msg) \
  do {                         \
    if (!(cond)) return fail(NSF_ERR_INVALID_ARGUMENT, msg); \
  } while (0)

std::optional<Method> to_method(nsf_method m) {
  switch (m) {
    case NSF_METHOD_PICARD: return Method::Picard;
    case NSF_METHOD_NEWTON: return Method::Newton;
    case NSF_METHOD_NEWTON_LINE_SEARCH: return Method::NewtonLineSearch;
    case NSF_METHOD_PICARD_NEWTON: return Method::PicardNewton;
    case NSF_METHOD_AA_PICARD_NEWTON: return Method::AAPicardNewton;
    case NSF_METHOD_AA_PICARD: return Method::AAPicard;
  }
  return std::nullopt;
}

}  // namespace

extern "C" {

const char* nsf_last_error(void) { return g_last_error.c_str(); }

const char* nsf_version(void) { return "0.1.0"; }

nsf_status nsf_mesh_create_unit_square(int n, int refine, nsf_mesh** out) {
  NSF_REQUIRE(out != nullptr, "out is NULL");
  *out = nullptr;
  NSF_REQUIRE(n >= 1, "n must be at least 1");
  return guarded([&] {
    auto h = std::make_unique<nsf_mesh>();
    Mesh base = uniform_square_mesh(n);
    h->mesh = std::make_shared<const Mesh>(refine ? barycenter_refine(base) : std::move(base));
    h->space = std::make_shared<const MixedSpace>(h->mesh);
    *out = h.release();
    return NSF_OK;
  });
}

void nsf_mesh_destroy(nsf_mesh* mesh) { delete mesh; }

nsf_status nsf_mesh_counts(const nsf_mesh* mesh, size_t* vertices, size_t* triangles, size_t* edges,
                           size_t* velocity_dofs, size_t* pressure_dofs) {
  NSF_REQUIRE(mesh != nullptr, "mesh is NULL");
  if (vertices) *vertices = mesh->mesh->num_vertices();
  if (triangles) *triangles = mesh->mesh->num_triangles();
  if (edges) *edges = mesh->mesh->num_edges();
  if (velocity_dofs) *velocity_dofs = mesh->space->num_velocity_dofs();
  if (pressure_dofs) *pressure_dofs = mesh->space->num_pressure_dofs();
  return NSF_OK;
}

nsf_status nsf_mesh_validate(const nsf_mesh* mesh, int* ok) {
  NSF_REQUIRE(mesh != nullptr && ok != nullptr, "NULL argument");
  return guarded([&] {
    const MeshReport report = validate_mesh(*mesh->mesh);
    *ok = report.ok() ? 1 : 0;
    if (!report.ok()) {
      std::string msg = "failed checks:";
      for (const auto& c : report.checks) {
        if (!c.passed) msg += " " + c.name;
      }
      g_last_error = msg;
    }
    return NSF_OK;
  });
}

nsf_status nsf_mesh_write(const nsf_mesh* mesh, const char* path) {
  NSF_REQUIRE(mesh != nullptr && path != nullptr, "NULL argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return fail(NSF_ERR_IO, std::string("cannot write ") + path);
    write_mesh_ascii(*mesh->mesh, out);
    return out ? NSF_OK : fail(NSF_ERR_IO, std::string("write failed: ") + path);
  });
}

nsf_status nsf_problem_create(const nsf_mesh* mesh, nsf_scenario scenario, double re, nsf_problem** out) {
  NSF_REQUIRE(out != nullptr, "out is NULL");
  *out = nullptr;
  NSF_REQUIRE(mesh != nullptr, "mesh is NULL");
  NSF_REQUIRE(scenario == NSF_SCENARIO_ANALYTICAL || scenario == NSF_SCENARIO_CAVITY2D, "unknown scenario");
  NSF_REQUIRE(re > 0.0, "Re must be positive");
  return guarded([&] {
    auto h = std::make_unique<nsf_problem>();
    h->scenario = scenario == NSF_SCENARIO_ANALYTICAL ? Scenario::Analytical : Scenario::Cavity2d;
    h->space = mesh->space;
    h->problem = make_problem(h->scenario, h->space, re);
    *out = h.release();
    return NSF_OK;
  });
}

void nsf_problem_destroy(nsf_problem* problem) { delete problem; }

void nsf_solver_options_default(nsf_solver_options* options) {
  if (!options) return;
  const SolverConfig d;
  options->method = NSF_METHOD_PICARD_NEWTON;
  options->tol = d.tol;
  options->gate = NSF_NORM_L2;
  options->max_iterations = d.max_iterations;
  options->blowup = d.blowup;
  options->aa_depth = d.aa_depth;
  options->aa_beta = d.aa_beta;
  options->u0_c = 0.0;
}

nsf_status nsf_solve(nsf_problem* problem, const nsf_solver_options* options, nsf_result** out) {
  NSF_REQUIRE(out != nullptr, "out is NULL");
  *out = nullptr;
  NSF_REQUIRE(problem != nullptr && options != nullptr, "NULL argument");
  const auto method = to_method(options->method);
  NSF_REQUIRE(method.has_value(), "unknown method");
  NSF_REQUIRE(options->gate == NSF_NORM_L2 || options->gate == NSF_NORM_H1, "unknown residual norm");
  return guarded([&] {
    SolverConfig cfg;
    cfg.method = *method;
    cfg.tol = options->tol;
    cfg.gate = options->gate == NSF_NORM_L2 ? ResidualNorm::L2 : ResidualNorm::H1;
    cfg.max_iterations = options->max_iterations;
    cfg.blowup = options->blowup;
    cfg.aa_depth = options->aa_depth;
    cfg.aa_beta = options->aa_beta;
    cfg.u0 = options->u0_c == 0.0 ? InitialGuess::zero() : InitialGuess::constant(options->u0_c);

    auto h = std::make_unique<nsf_result>();
    h->space = problem->space;
    h->solve = run_solver(cfg, *problem->problem);
    if (problem->scenario == Scenario::Analytical) {
      h->l2_error = l2_error(problem->problem->velocity_field(h->solve.velocity), exact_velocity);
    }
    *out = h.release();
    return NSF_OK;
  });
}

void nsf_result_destroy(nsf_result* result) { delete result; }

nsf_status nsf_result_termination(const nsf_result* result, nsf_termination* status, int* iterations) {
  NSF_REQUIRE(result != nullptr, "result is NULL");
  if (status) {
    switch (result->solve.history.status) {
      case Status::Converged: *status = NSF_TERM_CONVERGED; break;
      case Status::Failed: *status = NSF_TERM_FAILED; break;
      case Status::Blowup: *status = NSF_TERM_BLOWUP; break;
      case Status::SingularLinearization: *status = NSF_TERM_SINGULAR; break;
    }
  }
  if (iterations) *iterations = result->solve.history.iterations;
  return NSF_OK;
}

nsf_status nsf_result_residuals(const nsf_result* result, nsf_norm norm, double* buffer, size_t capacity,
                                size_t* count) {
  NSF_REQUIRE(result != nullptr, "result is NULL");
  NSF_REQUIRE(norm == NSF_NORM_L2 || norm == NSF_NORM_H1, "unknown residual norm");
  NSF_REQUIRE(buffer != nullptr || capacity == 0, "buffer is NULL");
  const auto r = result->solve.history.residuals(norm == NSF_NORM_L2 ? ResidualNorm::L2 : ResidualNorm::H1);
  for (size_t i = 0; i < r.size() && i < capacity; ++i) buffer[i] = r[i];
  if (count) *count = r.size();
  return NSF_OK;
}

nsf_status nsf_result_velocity_l2_error(const nsf_result* result, double* error) {
  NSF_REQUIRE(result != nullptr && error != nullptr, "NULL argument");
  NSF_REQUIRE(result->l2_error.has_value(), "no exact solution for this scenario");
  *error = *result->l2_error;
  return NSF_OK;
}

nsf_status nsf_result_write_history(const nsf_result* result, const char* path) {
  NSF_REQUIRE(result != nullptr && path != nullptr, "NULL argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return fail(NSF_ERR_IO, std::string("cannot write ") + path);
    write_history_csv(result->solve.history, out);
    return out ? NSF_OK : fail(NSF_ERR_IO, std::string("write failed: ") + path);
  });
}

nsf_status nsf_result_write_vtk(const nsf_result* result, const char* path) {
  NSF_REQUIRE(result != nullptr && path != nullptr, "NULL argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return fail(NSF_ERR_IO, std::string("cannot write ") + path);
    const FEField u(result->space, FieldKind::Velocity, result->solve.velocity);
    const FEField p(result->space, FieldKind::Pressure, result->solve.pressure);
    write_vtk(u, p, out);
    return out ? NSF_OK : fail(NSF_ERR_IO, std::string("write failed: ") + path);
  });
}

nsf_status nsf_estimate_order(const double* residuals, size_t count, int tail, double* order) {
  NSF_REQUIRE(order != nullptr, "order is NULL");
  NSF_REQUIRE(residuals != nullptr || count == 0, "residuals is NULL");
  return guarded([&] {
    *order = estimate_order(std::span<const double>(residuals, count), tail);
    return NSF_OK;
  });
}

nsf_status nsf_estimate_order_csv(const char* path, int tail, double* order) {
  NSF_REQUIRE(path != nullptr && order != nullptr, "NULL argument");
  std::vector<double> r;
  try {
    r = read_history_residuals(path, ResidualNorm::L2);
  } catch (const std::exception& e) {
    return fail(NSF_ERR_IO, e.what());
  }
  return nsf_estimate_order(r.data(), r.size(), tail, order);
}

nsf_status nsf_bench_run(const char* config_path, const char* overrides_json, const char* out_dir, int allow_high_re,
                         int verbose, size_t* runs) {
  return guarded([&] {
    BenchConfig cfg = config_path ? load_config(config_path) : BenchConfig{};
    if (overrides_json) cfg = parse_config(overrides_json, cfg);
    cfg.allow_high_re = allow_high_re != 0;
    const auto records = run_scenario(cfg, out_dir ? out_dir : "", verbose ? &std::cerr : nullptr);
    if (runs) *runs = records.size();
    return NSF_OK;
  });
}

}  // extern "C"
