/* SPDX-License-Identifier: Apache-2.0 */
#ifndef ICVI_H
#define ICVI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ICVI_API __declspec(dllexport)
#else
#define ICVI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum icvi_status {
  ICVI_OK = 0,
  ICVI_ERR_CONFIG = 1,    /* invalid parameter or option combination */
  ICVI_ERR_DATA = 2,      /* malformed or degenerate input */
  ICVI_ERR_DIMENSION = 3, /* sample length differs from the stream dimension */
  ICVI_ERR_STATE = 4,     /* call not valid in the object's current state */
  ICVI_ERR_NULL = 5,      /* required pointer argument was NULL */
  ICVI_ERR_INTERNAL = 6
} icvi_status;

ICVI_API const char* icvi_version(void);
ICVI_API const char* icvi_status_string(icvi_status status);
/* Message of the last failing call on this thread; "" if none. */
ICVI_API const char* icvi_last_error(void);
/* Frees strings returned through char** out-parameters. */
ICVI_API void icvi_string_free(char* s);

/* ---- centroid-level incremental indices -------------------------------- */

typedef struct icvi_evaluator icvi_evaluator;

/* `indices` is a comma-separated list of names: ch, i (or pbm), sil, ni,
   rcip, rh, xb, db, ps. */
ICVI_API icvi_status icvi_evaluator_create(size_t dim, const char* indices, double epsilon, icvi_evaluator** out);
ICVI_API void icvi_evaluator_destroy(icvi_evaluator* ev);
ICVI_API icvi_status icvi_evaluator_observe(icvi_evaluator* ev, const double* x, size_t dim, int64_t label);
/* *defined is set to 0 while the value is undefined (k < 2, degenerate geometry). */
ICVI_API icvi_status icvi_evaluator_value(const icvi_evaluator* ev, const char* index, double* value, int* defined);
ICVI_API icvi_status icvi_evaluator_cluster_count(const icvi_evaluator* ev, size_t* k);

/* ---- fuzzy SMART with incremental Conn_Index --------------------------- */

typedef struct icvi_smart icvi_smart;

typedef struct icvi_smart_step {
  size_t prototype;
  size_t cluster;
  int has_second;
  size_t second_prototype;
  int prototype_created;
  int cluster_created;
  double conn; /* Conn_Index after this presentation */
} icvi_smart_step;

ICVI_API icvi_status icvi_smart_create(size_t dim, double rho_a, double rho_b, double alpha, double beta,
                                       icvi_smart** out);
ICVI_API void icvi_smart_destroy(icvi_smart* net);
/* x must be normalized to [0, 1]. */
ICVI_API icvi_status icvi_smart_present(icvi_smart* net, const double* x, size_t dim, icvi_smart_step* step);
ICVI_API icvi_status icvi_smart_counts(const icvi_smart* net, size_t* prototypes, size_t* clusters);
/* Versioned JSON snapshot of both modules and the map. */
ICVI_API icvi_status icvi_smart_to_json(const icvi_smart* net, char** json);

/* ---- standalone Conn_Index --------------------------------------------- */

typedef struct icvi_conn icvi_conn;

ICVI_API icvi_status icvi_conn_create(icvi_conn** out);
ICVI_API void icvi_conn_destroy(icvi_conn* conn);
/* first/cluster may equal the current counts to create a prototype/cluster. */
ICVI_API icvi_status icvi_conn_observe(icvi_conn* conn, size_t first, int has_second, size_t second, size_t cluster);
ICVI_API icvi_status icvi_conn_value(const icvi_conn* conn, double* value);

/* ---- experiment harness ------------------------------------------------ */

/* Runs a JSON experiment config, writes its configured outputs and returns
   the summary document. */
ICVI_API icvi_status icvi_run_experiment(const char* config_json, char** summary_json);
/* Batch-vs-incremental Conn_Index sweep over the config's sweep_rho_a grid. */
ICVI_API icvi_status icvi_sweep_conn(const char* config_json, char** report_json);
/* Writes a generated dataset ("d4" or "r15") as labeled CSV. */
ICVI_API icvi_status icvi_generate_dataset(const char* name, uint64_t seed, int normalize, const char* path);
/* Batch CVIs of the labeled partition stored in a CSV (trailing label column). */
ICVI_API icvi_status icvi_batch_eval(const char* csv_path, int normalize, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* ICVI_H */
