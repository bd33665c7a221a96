/* C interface to the nsfem solver library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns an nsf_status; on failure nsf_last_error()
 * describes the problem (the message is per thread and valid until the next
 * failing call on that thread). Destroy functions accept NULL.
 */
#ifndef NSFEM_NSFEM_H
#define NSFEM_NSFEM_H

#include <stddef.h>

#if defined(_WIN32)
#define NSF_API __declspec(dllexport)
#else
#define NSF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  NSF_OK = 0,
  NSF_ERR_INVALID_ARGUMENT = 1,
  NSF_ERR_CONFIG = 2,
  NSF_ERR_SINGULAR = 3,
  NSF_ERR_IO = 4,
  NSF_ERR_INSUFFICIENT_DATA = 5,
  NSF_ERR_INTERNAL = 6
} nsf_status;

typedef enum { NSF_SCENARIO_ANALYTICAL = 0, NSF_SCENARIO_CAVITY2D = 1 } nsf_scenario;

typedef enum {
  NSF_METHOD_PICARD = 0,
  NSF_METHOD_NEWTON = 1,
  NSF_METHOD_NEWTON_LINE_SEARCH = 2,
  NSF_METHOD_PICARD_NEWTON = 3,
  NSF_METHOD_AA_PICARD_NEWTON = 4,
  NSF_METHOD_AA_PICARD = 5
} nsf_method;

typedef enum { NSF_NORM_L2 = 0, NSF_NORM_H1 = 1 } nsf_norm;

typedef enum {
  NSF_TERM_CONVERGED = 0,
  NSF_TERM_FAILED = 1, /* F: no convergence within max_iterations */
  NSF_TERM_BLOWUP = 2, /* B: residual above the blowup threshold */
  NSF_TERM_SINGULAR = 3
} nsf_termination;

typedef struct nsf_mesh nsf_mesh;
typedef struct nsf_problem nsf_problem;
typedef struct nsf_result nsf_result;

typedef struct {
  nsf_method method;
  double tol;
  nsf_norm gate;
  int max_iterations;
  double blowup;
  int aa_depth;
  double aa_beta;
  /* Initial guess (c, 0) in the interior, boundary data on the boundary. */
  double u0_c;
} nsf_solver_options;

NSF_API const char* nsf_last_error(void);
NSF_API const char* nsf_version(void);

/* Uniform n x n triangulation of the unit square, barycenter-refined when
 * `refine` is nonzero. */
NSF_API nsf_status nsf_mesh_create_unit_square(int n, int refine, nsf_mesh** out);
NSF_API void nsf_mesh_destroy(nsf_mesh* mesh);
/* Any output pointer may be NULL. Dof counts are for the P2 / P1dc pair. */
NSF_API nsf_status nsf_mesh_counts(const nsf_mesh* mesh, size_t* vertices, size_t* triangles, size_t* edges,
                                   size_t* velocity_dofs, size_t* pressure_dofs);
/* *ok is 1 when every mesh check passes. */
NSF_API nsf_status nsf_mesh_validate(const nsf_mesh* mesh, int* ok);
NSF_API nsf_status nsf_mesh_write(const nsf_mesh* mesh, const char* path);

/* The problem keeps its own reference to the mesh. Not safe for concurrent
 * nsf_solve calls on the same problem. */
NSF_API nsf_status nsf_problem_create(const nsf_mesh* mesh, nsf_scenario scenario, double re, nsf_problem** out);
NSF_API void nsf_problem_destroy(nsf_problem* problem);

NSF_API void nsf_solver_options_default(nsf_solver_options* options);
NSF_API nsf_status nsf_solve(nsf_problem* problem, const nsf_solver_options* options, nsf_result** out);

NSF_API void nsf_result_destroy(nsf_result* result);
NSF_API nsf_status nsf_result_termination(const nsf_result* result, nsf_termination* status, int* iterations);
/* Copies up to `capacity` residuals; *count receives the total available. */
NSF_API nsf_status nsf_result_residuals(const nsf_result* result, nsf_norm norm, double* buffer, size_t capacity,
                                        size_t* count);
/* Analytical scenario only. */
NSF_API nsf_status nsf_result_velocity_l2_error(const nsf_result* result, double* error);
NSF_API nsf_status nsf_result_write_history(const nsf_result* result, const char* path);
NSF_API nsf_status nsf_result_write_vtk(const nsf_result* result, const char* path);

NSF_API nsf_status nsf_estimate_order(const double* residuals, size_t count, int tail, double* order);
/* Reads the res_l2 column of a history CSV. */
NSF_API nsf_status nsf_estimate_order_csv(const char* path, int tail, double* order);

/* Runs a benchmark sweep. `config_path` may be NULL (defaults); the JSON
 * object `overrides_json` (may be NULL) is applied on top of the file.
 * Progress goes to stderr when `verbose` is nonzero. */
NSF_API nsf_status nsf_bench_run(const char* config_path, const char* overrides_json, const char* out_dir,
                                 int allow_high_re, int verbose, size_t* runs);

#ifdef __cplusplus
}
#endif

#endif
