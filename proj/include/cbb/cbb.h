/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The CBB Authors
 * SPDX-License-Identifier: Apache-2.0
 */

/* C interface to the solver.  All objects are opaque handles released with
 * their *_free function.  Functions returning cbb_status leave a message for
 * cbb_last_error() on failure (thread-local, valid until the next failing
 * call on the same thread).  Strings returned through char** are owned by the
 * caller and released with cbb_string_free. */

#ifndef CBB_CBB_H
#define CBB_CBB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CBB_API __declspec(dllexport)
#else
#define CBB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cbb_status {
  CBB_OK = 0,
  CBB_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad parameter value, contract violation */
  CBB_ERR_PARSE = 2,            /* malformed instance, configuration or certificate */
  CBB_ERR_SIZE = 3,             /* instance too large for exhaustive search */
  CBB_ERR_REFUSED = 4,          /* certificate does not belong to the instance */
  CBB_ERR_IO = 5,
  CBB_ERR_INTERNAL = 6
} cbb_status;

typedef struct cbb_model cbb_model;
typedef struct cbb_params cbb_params;
typedef struct cbb_certificate cbb_certificate;

CBB_API const char* cbb_version(void);
CBB_API const char* cbb_last_error(void);
CBB_API const char* cbb_status_name(cbb_status status);
CBB_API void cbb_string_free(char* s);

/* models */
CBB_API cbb_status cbb_model_parse(const char* text, cbb_model** out);
CBB_API cbb_status cbb_model_read_file(const char* path, cbb_model** out);
CBB_API cbb_status cbb_model_gen_square(size_t L, double sigma, uint64_t seed, cbb_model** out);
CBB_API cbb_status cbb_model_gen_triangular(size_t rows, size_t cols, double sigma, uint64_t seed,
                                            cbb_model** out);
CBB_API cbb_status cbb_model_gen_chimera(size_t L, double sigma, uint64_t seed, cbb_model** out);
CBB_API cbb_status cbb_model_gen_random(size_t n, double p, uint64_t seed, cbb_model** out);
CBB_API void cbb_model_free(cbb_model* model);

CBB_API size_t cbb_model_num_spins(const cbb_model* model);
CBB_API size_t cbb_model_num_couplings(const cbb_model* model);
CBB_API cbb_status cbb_model_serialize(const cbb_model* model, char** out);
CBB_API cbb_status cbb_model_digest(const cbb_model* model, char** out);
CBB_API cbb_status cbb_model_energy(const cbb_model* model, const int8_t* config, size_t n,
                                    double* out);
/* Size of the largest clique of the chordal extension. */
CBB_API cbb_status cbb_model_max_clique(const cbb_model* model, size_t* out);

/* configurations: "+-+-" or "1 -1 1 -1"; `*out` is allocated with length *n
 * and released with cbb_config_free */
CBB_API cbb_status cbb_config_parse(const char* text, int8_t** out, size_t* n);
CBB_API void cbb_config_free(int8_t* config);

/* exhaustive search; fills `config` (length num_spins) with the
 * lexicographically first minimizer */
CBB_API cbb_status cbb_brute_force(const cbb_model* model, double* energy, int8_t* config);

/* run parameters; keys are the snake_case names of the certificate's params
 * object (n_t, relaxation, branch_rule, gap_tolerance, max_nodes, time_limit,
 * oracle_leaf, cuts, max_cut_rounds, cuts_per_round, cut_tolerance,
 * sdp_feasibility, sdp_relative_gap, sdp_max_iterations, seed, trace, threads) */
CBB_API cbb_status cbb_params_create(cbb_params** out);
CBB_API void cbb_params_free(cbb_params* params);
CBB_API cbb_status cbb_params_set(cbb_params* params, const char* key, const char* value);
/* merges a JSON object of the same keys */
CBB_API cbb_status cbb_params_update_json(cbb_params* params, const char* json);
CBB_API cbb_status cbb_params_to_json(const cbb_params* params, char** out);

/* solving */
CBB_API cbb_status cbb_solve(const cbb_model* model, const cbb_params* params, cbb_certificate** out);
CBB_API void cbb_certificate_free(cbb_certificate* cert);
/* include_trace: 1 yes, 0 no, -1 as requested by the run parameters */
CBB_API cbb_status cbb_certificate_to_json(const cbb_certificate* cert, int include_trace, char** out);
CBB_API cbb_status cbb_certificate_from_json(const char* json, cbb_certificate** out);
/* "step,lower,upper" rows: global bounds after the root and each branching */
CBB_API cbb_status cbb_certificate_history_csv(const cbb_certificate* cert, char** out);
CBB_API int cbb_certificate_converged(const cbb_certificate* cert);
CBB_API double cbb_certificate_lower(const cbb_certificate* cert);
CBB_API double cbb_certificate_upper(const cbb_certificate* cert);
CBB_API double cbb_certificate_wall_time(const cbb_certificate* cert);
CBB_API size_t cbb_certificate_nodes(const cbb_certificate* cert);
CBB_API size_t cbb_certificate_branchings(const cbb_certificate* cert);
CBB_API size_t cbb_certificate_num_spins(const cbb_certificate* cert);
/* copies the certified configuration into `config` (num_spins entries) */
CBB_API cbb_status cbb_certificate_config(const cbb_certificate* cert, int8_t* config);

/* Compare an external configuration with `cert` (solved with `params` when
 * cert is null; params may be null for defaults).  Writes a JSON report. */
CBB_API cbb_status cbb_verify(const cbb_model* model, const int8_t* config, size_t n,
                              const cbb_certificate* cert, const cbb_params* params, char** report);

#ifdef __cplusplus
}
#endif

#endif /* CBB_CBB_H */
