#ifndef AETAS_H
#define AETAS_H

/* C interface to the aetas drift pipeline. Every object is an opaque handle;
 * every fallible call returns a status code and leaves a message retrievable
 * with aetas_last_error() on the calling thread. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as process exit codes. */
typedef enum aetas_status {
  AETAS_OK = 0,
  AETAS_ERR = 1,         /* unexpected internal failure */
  AETAS_ERR_CONFIG = 2,  /* bad configuration, arguments, or spec file */
  AETAS_ERR_DATA = 3,    /* missing or invalid data, stale upstream stage */
  AETAS_ERR_NUMERIC = 4  /* numeric breakdown (degenerate input, no convergence) */
} aetas_status;

/* Library version as "major.minor.patch". Static storage, never NULL. */
const char* aetas_version(void);

/* Message from the most recent failing call on this thread. Empty string
 * when nothing failed yet; never NULL. Valid until the next failing call. */
const char* aetas_last_error(void);

/* ---- staged pipeline ---- */

typedef struct aetas_pipeline aetas_pipeline;

/* Opens a pipeline from an INI config file. output_dir overrides the
 * configured output directory when non-NULL; seed overrides the training
 * seed when non-NULL. On success *out owns the handle until
 * aetas_pipeline_close. */
aetas_status aetas_pipeline_open(const char* config_path, const char* output_dir,
                                 const uint64_t* seed, aetas_pipeline** out);

/* Brings one named stage (ingest, bin, train, align, drift, axes, stability,
 * stats, report) up to date. *executed (optional) is set to 1 when the stage
 * actually ran and 0 when it was already fresh. Fails with AETAS_ERR_DATA
 * when an upstream stage is stale. */
aetas_status aetas_pipeline_run_stage(aetas_pipeline* p, const char* stage,
                                      int* executed);

/* Runs every stale stage in dependency order. *n_executed (optional)
 * receives the number of stages that ran. */
aetas_status aetas_pipeline_run_all(aetas_pipeline* p, int* n_executed);

/* NULL-safe. */
void aetas_pipeline_close(aetas_pipeline* p);

/* ---- synthetic corpus ---- */

/* Writes corpus.jsonl and ground_truth.json under out_dir. spec_path is a
 * JSON spec file, or NULL for the built-in three-topic default. */
aetas_status aetas_synth_generate(const char* spec_path, const char* out_dir);

/* ---- trained embedding spaces ---- */

typedef struct aetas_space aetas_space;

/* Loads a space from its .vec file (the .meta.json sidecar must sit next
 * to it). */
aetas_status aetas_space_load(const char* vec_path, aetas_space** out);
void aetas_space_free(aetas_space* s);

int aetas_space_dim(const aetas_space* s);
size_t aetas_space_vocab_size(const aetas_space* s);
/* Bin label the space was trained on. Owned by the space. */
const char* aetas_space_label(const aetas_space* s);
/* 1 when the word is in the vocabulary, else 0. */
int aetas_space_contains(const aetas_space* s, const char* word);

typedef struct aetas_neighbor_list aetas_neighbor_list;

/* Top-k cosine neighbors of word, query excluded, descending score.
 * Requires k < vocabulary size. */
aetas_status aetas_space_neighbors(const aetas_space* s, const char* word,
                                   size_t k, aetas_neighbor_list** out);

size_t aetas_neighbor_count(const aetas_neighbor_list* l);
/* Word at rank i (0-based). Owned by the list. */
const char* aetas_neighbor_word(const aetas_neighbor_list* l, size_t i);
double aetas_neighbor_score(const aetas_neighbor_list* l, size_t i);
void aetas_neighbor_list_free(aetas_neighbor_list* l);

/* 1 - cosine similarity of word between two (already aligned) spaces. */
aetas_status aetas_cosine_drift(const aetas_space* a, const aetas_space* b,
                                const char* word, double* out);

#ifdef __cplusplus
}
#endif

#endif /* AETAS_H */
