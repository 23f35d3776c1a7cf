#ifndef DEEPONET_C_API_H
#define DEEPONET_C_API_H

/* C interface to the DeepONet laboratory: operator-learning networks, the
 * encoding/approximation/reconstruction error machinery, spectral lower
 * bounds, ground-truth PDE/ODE solvers and the config-driven experiment
 * runner. All functions return don_status; failure details are retrievable
 * via don_last_error(). Handles are opaque and freed with the matching
 * *_destroy function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DON_API __declspec(dllexport)
#else
#define DON_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum don_status {
  DON_OK = 0,
  DON_ERR_INVALID_ARG = 1,
  DON_ERR_NUMERICAL = 2,
  DON_ERR_IO = 3,
  DON_ERR_UNKNOWN = 4
} don_status;

typedef struct don_measure don_measure;
typedef struct don_fields don_fields;
typedef struct don_spectrum don_spectrum;
typedef struct don_operator don_operator;
typedef struct don_mlp don_mlp;
typedef struct don_gadget don_gadget;

DON_API const char* don_version(void);

/* Message describing the most recent failure on this thread. */
DON_API const char* don_last_error(void);

/* ---- measures on function space ---------------------------------------- */

/* spec_json: {"family":"gaussianKernel","ell":0.5,"dim":1,...} (see README) */
DON_API don_status don_measure_create(const char* spec_json, don_measure** out);
DON_API void don_measure_destroy(don_measure* m);

/* Draws `count` samples on the equispaced periodic grid with grid_n points
 * per axis. Streams are keyed by (seed, sample index). */
DON_API don_status don_measure_sample(const don_measure* m, uint64_t seed, int count, int grid_n,
                                      don_fields** out);

DON_API int don_fields_count(const don_fields* f);
DON_API int don_fields_value_count(const don_fields* f);
/* Borrowed pointer, valid while the batch lives. */
DON_API don_status don_fields_values(const don_fields* f, int index, const double** data,
                                     int* len);
DON_API void don_fields_destroy(don_fields* f);

/* ---- empirical covariance spectra --------------------------------------- */

DON_API don_status don_spectrum_compute(const don_fields* f, int p, don_spectrum** out);
DON_API int don_spectrum_count(const don_spectrum* s);
DON_API don_status don_spectrum_eigenvalues(const don_spectrum* s, const double** data, int* len);
/* sqrt(sum_{k>p} lambda_k), the spectral lower bound at truncation p. */
DON_API don_status don_spectrum_lower_bound(const don_spectrum* s, int p, double* out);
DON_API void don_spectrum_destroy(don_spectrum* s);

/* ---- ground-truth operators --------------------------------------------- */

/* op_json: {"kind":"pendulum"|"elliptic"|"allenCahn"|"burgers"|
 *           "integralFunctional", ...} */
DON_API don_status don_operator_create(const char* op_json, don_operator** out);
DON_API void don_operator_destroy(don_operator* op);
/* Applies G to each sample in the batch (samples must live on the operator's
 * input grid). */
DON_API don_status don_operator_apply(const don_operator* op, const don_fields* in,
                                      don_fields** out);

/* ---- networks ------------------------------------------------------------ */

DON_API don_status don_mlp_from_json(const char* checkpoint_json, don_mlp** out);
DON_API don_status don_mlp_to_json(const don_mlp* net, char** json_out);
DON_API don_status don_mlp_forward(const don_mlp* net, const double* x, int x_len, double* y,
                                   int y_len);
DON_API don_status don_mlp_size(const don_mlp* net, size_t* size_out, int* depth_out);
DON_API void don_mlp_destroy(don_mlp* net);

/* ReLU gadget constructions. kind: "shrink" | "indicator" | "cubic" |
 * "acEmulator"; params_json carries the construction parameters
 * (e.g. {"a":0,"b":1,"eps":0.01} or {"m":33,"n":10,"dt":0.05,"eps":1e-3}). */
DON_API don_status don_gadget_create(const char* kind, const char* params_json, don_gadget** out);
DON_API don_status don_gadget_eval(const don_gadget* g, const double* x, int x_len, double* y,
                                   int y_len);
DON_API don_status don_gadget_size(const don_gadget* g, size_t* size_out, int* depth_out);
DON_API void don_gadget_destroy(don_gadget* g);

/* ---- experiment runner ---------------------------------------------------- */

/* Runs one tool ("sample", "oracle", "encdec-error", "spectrum", "train",
 * "evaluate", "emulate", "experiment") described by config_json, writing its
 * outputs under out_dir. On success *manifest_json_out (if non-NULL) receives
 * the manifest; free it with don_string_free. */
DON_API don_status don_run_tool(const char* config_json, const char* out_dir, int threads,
                                char** manifest_json_out);

DON_API void don_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* DEEPONET_C_API_H */
