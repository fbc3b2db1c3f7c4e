#ifndef MSLAB_MSLAB_H
#define MSLAB_MSLAB_H

/*
 * C interface to the magnetic Schrödinger lab.
 *
 * Every function returns an mslab_status. Objects are opaque handles
 * created and destroyed in pairs. A context records the message of the
 * last failure; strings returned through out-parameters are owned by the
 * library and must be released with mslab_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define MSLAB_API __attribute__((visibility("default")))
#else
#define MSLAB_API
#endif

typedef enum mslab_status {
  MSLAB_OK = 0,
  MSLAB_INVALID_ARGUMENT = 1,
  MSLAB_DEGENERATE = 2,
  MSLAB_NOT_CONVERGED = 3,
  MSLAB_TOO_LARGE = 4,
  MSLAB_NOT_INVERTIBLE = 5,
  MSLAB_IO = 6,
  MSLAB_PARSE = 7,
  MSLAB_BROKEN_INVARIANT = 8,
  MSLAB_INTERNAL = 9
} mslab_status;

typedef struct mslab_context mslab_context;
typedef struct mslab_operator mslab_operator;
typedef struct mslab_expr mslab_expr;

MSLAB_API const char* mslab_version(void);
MSLAB_API const char* mslab_status_name(mslab_status status);
MSLAB_API void mslab_string_free(char* s);

MSLAB_API mslab_status mslab_context_create(mslab_context** out);
MSLAB_API void mslab_context_destroy(mslab_context* ctx);
/* Message of the most recent failure on ctx; empty after a success. */
MSLAB_API const char* mslab_last_error(const mslab_context* ctx);

/* Parses and validates a JSON configuration without running it. */
MSLAB_API mslab_status mslab_validate_config(mslab_context* ctx, const char* config_json);

/*
 * Runs every experiment of the configuration. out_dir may be NULL, in which
 * case the configuration's output_dir is used. *exit_code receives 0 when all
 * experiments succeeded and 1 otherwise; the status reflects only failures
 * that prevented the run from starting (bad configuration, unwritable directory).
 */
MSLAB_API mslab_status mslab_run(mslab_context* ctx, const char* config_json, const char* out_dir,
                                 int* exit_code);

/* Verifies manifest hashes under dir and returns a JSON summary. */
MSLAB_API mslab_status mslab_report(mslab_context* ctx, const char* dir, char** summary_json);

/* Operator for a scenario given as JSON (a catalog name in quotes or an object). */
MSLAB_API mslab_status mslab_operator_create(mslab_context* ctx, int n, int N, double L,
                                             const char* scenario_json, mslab_operator** out);
MSLAB_API void mslab_operator_destroy(mslab_operator* op);
/* Number of grid points, the dimension of the operator. */
MSLAB_API size_t mslab_operator_dim(const mslab_operator* op);
/* in and out hold dim complex numbers as interleaved (re, im) pairs. */
MSLAB_API mslab_status mslab_operator_apply(mslab_context* ctx, const mslab_operator* op,
                                            const double* in, double* out);
/* parts receives kinetic, potential, shift and Re<Hu,u>. */
MSLAB_API mslab_status mslab_operator_energy(mslab_context* ctx, const mslab_operator* op,
                                             const double* u, double parts[4]);
/* |B| and m(., |B|) at the grid points; aux fails with MSLAB_INVALID_ARGUMENT when B vanishes. */
MSLAB_API mslab_status mslab_operator_field_strength(mslab_context* ctx, const mslab_operator* op,
                                                     double* abs_b);
MSLAB_API mslab_status mslab_operator_aux(mslab_context* ctx, const mslab_operator* op, double* m);

MSLAB_API mslab_status mslab_expr_parse(mslab_context* ctx, const char* text, int n, mslab_expr** out);
MSLAB_API void mslab_expr_destroy(mslab_expr* e);
MSLAB_API mslab_status mslab_expr_eval(mslab_context* ctx, const mslab_expr* e, const double* x,
                                       double* value);
MSLAB_API mslab_status mslab_expr_print(mslab_context* ctx, const mslab_expr* e, char** text);

/* Binary field files. dtype 0 is float64 and 1 is complex128 (interleaved). */
MSLAB_API mslab_status mslab_field_write(mslab_context* ctx, const char* path, int dtype, int n, int N,
                                         const double* values);
/* Reads the header only: dtype, dimension and points per axis. */
MSLAB_API mslab_status mslab_field_info(mslab_context* ctx, const char* path, int* dtype, int* n,
                                        int* N);
/* values must hold N^n (dtype 0) or 2 N^n (dtype 1) doubles. */
MSLAB_API mslab_status mslab_field_read(mslab_context* ctx, const char* path, double* values,
                                        size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
