/*
 * C interface to the pgjr clustering engine.
 *
 * Every function returns a pgjr_status. On failure the message of the most
 * recent error on the calling thread is available from pgjr_last_error().
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function; passing NULL to a *_free function is a no-op.
 * Strings returned through char** out-parameters are released with
 * pgjr_string_free.
 */
#ifndef PGJR_PGJR_H
#define PGJR_PGJR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PGJR_BUILDING_LIBRARY)
#    define PGJR_API __declspec(dllexport)
#  else
#    define PGJR_API __declspec(dllimport)
#  endif
#else
#  define PGJR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as CLI exit codes. */
typedef enum pgjr_status {
  PGJR_OK = 0,
  PGJR_ERR_USAGE = 1,      /* bad arguments, config or shapes */
  PGJR_ERR_DATA = 2,       /* malformed, unreadable or unwritable files */
  PGJR_ERR_NUMERICAL = 3,  /* NaN, divergence, degenerate vectors */
  PGJR_ERR_GRADCHECK = 4,  /* finite-difference check above threshold */
  PGJR_ERR_INTERNAL = 5
} pgjr_status;

typedef struct pgjr_embeddings pgjr_embeddings;
typedef struct pgjr_config pgjr_config;
typedef struct pgjr_checkpoint pgjr_checkpoint;

PGJR_API const char* pgjr_version(void);
PGJR_API const char* pgjr_last_error(void);
PGJR_API void pgjr_string_free(char* s);

/* Caps worker threads; 0 restores the default (PGJR_THREADS or hardware). */
PGJR_API pgjr_status pgjr_set_threads(unsigned threads);

/* ---- embeddings ---------------------------------------------------------- */

PGJR_API pgjr_status pgjr_embeddings_load(const char* path, pgjr_embeddings** out);
/* labels may be NULL (all unknown). data holds n*views*dim floats,
 * sample-major then view-major. */
PGJR_API pgjr_status pgjr_embeddings_create(uint32_t n, uint32_t views, uint32_t dim,
                                            const int32_t* labels, const float* data,
                                            pgjr_embeddings** out);
PGJR_API pgjr_status pgjr_embeddings_save(const pgjr_embeddings* e, const char* path);
PGJR_API pgjr_status pgjr_embeddings_info(const pgjr_embeddings* e, uint32_t* n, uint32_t* views,
                                          uint32_t* dim, int* has_labels);
PGJR_API void pgjr_embeddings_free(pgjr_embeddings* e);

/* ---- configuration -------------------------------------------------------- */

/* json may be NULL or "" for all defaults. Unknown keys are rejected. */
PGJR_API pgjr_status pgjr_config_parse(const char* json, pgjr_config** out);
PGJR_API pgjr_status pgjr_config_load(const char* path, pgjr_config** out);
/* Canonical JSON with every field. */
PGJR_API pgjr_status pgjr_config_to_json(const pgjr_config* cfg, char** json_out);
PGJR_API void pgjr_config_free(pgjr_config* cfg);

/* ---- training and evaluation --------------------------------------------- */

/* Trains up to the configured epoch count, starting from resume when given.
 * When out_dir is not NULL, writes report.json, losses.csv, timing.json and
 * checkpoint.bin there. ckpt_out and report_json_out may be NULL. */
PGJR_API pgjr_status pgjr_train(const pgjr_config* cfg, const pgjr_embeddings* data,
                                const pgjr_checkpoint* resume, const char* out_dir,
                                pgjr_checkpoint** ckpt_out, char** report_json_out);

PGJR_API pgjr_status pgjr_checkpoint_load(const char* path, pgjr_checkpoint** out);
PGJR_API pgjr_status pgjr_checkpoint_save(const pgjr_checkpoint* ckpt, const char* path);
PGJR_API pgjr_status pgjr_checkpoint_epoch(const pgjr_checkpoint* ckpt, uint32_t* epoch);
PGJR_API void pgjr_checkpoint_free(pgjr_checkpoint* ckpt);

/* Forward pass over view 0, k-means, metrics. JSON with acc/nmi/ari when
 * labels are present and silhouette always. */
PGJR_API pgjr_status pgjr_evaluate(const pgjr_checkpoint* ckpt, const pgjr_embeddings* data,
                                   char** json_out);

/* k-means on view 0 of the embeddings themselves. */
PGJR_API pgjr_status pgjr_kmeans_raw(const pgjr_embeddings* data, uint32_t k, uint32_t restarts,
                                     uint64_t seed, int normalize, char** json_out);

/* Finite-difference suite. break_component (may be NULL) negates one
 * component's analytic gradient. Returns PGJR_ERR_GRADCHECK when any
 * component exceeds threshold; table_out is filled either way. */
PGJR_API pgjr_status pgjr_gradcheck(uint32_t trials, uint64_t seed, double threshold,
                                    const char* break_component, char** table_out);

PGJR_API pgjr_status pgjr_export_projection(const pgjr_checkpoint* ckpt,
                                            const pgjr_embeddings* data, const char* out_path);
PGJR_API pgjr_status pgjr_knn_report(const pgjr_checkpoint* ckpt, const pgjr_embeddings* data,
                                     uint32_t k, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* PGJR_PGJR_H */
