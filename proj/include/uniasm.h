/* C interface to the uniasm binary-code-similarity toolkit.
 *
 * Every function that can fail returns an int status: 0 success, 1 validation
 * error (bad input, malformed file), 2 runtime fault (I/O, numerics). On
 * failure uniasm_last_error() describes the problem for the calling thread.
 * Objects returned through out-parameters are owned by the caller and must be
 * released with the matching _free function; strings with uniasm_string_free.
 */
#ifndef UNIASM_H
#define UNIASM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define UNIASM_OK 0
#define UNIASM_ERR_VALIDATION 1
#define UNIASM_ERR_RUNTIME 2

typedef struct uniasm_corpus uniasm_corpus;
typedef struct uniasm_vocab uniasm_vocab;
typedef struct uniasm_dataset uniasm_dataset;
typedef struct uniasm_model uniasm_model;
typedef struct uniasm_pool uniasm_pool;

const char* uniasm_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* uniasm_last_error(void);

void uniasm_string_free(char* s);

/* 16-hex-digit fingerprint of a file's bytes. */
int uniasm_file_fingerprint(const char* path, char** hex_out);

/* ---- corpus ---- */

/* Loads a JSONL corpus of disassembled functions. */
int uniasm_corpus_load(const char* path, uniasm_corpus** out);
void uniasm_corpus_free(uniasm_corpus* c);
uint64_t uniasm_corpus_size(const uniasm_corpus* c);

/* Counts, instruction-length buckets, per-variant totals; JSON object. */
int uniasm_corpus_stats_json(const uniasm_corpus* c, char** json_out);

/* ---- vocabulary ---- */

/* tokenizer_mode: "full-i" | "half-i" | "piece-i";
 * serialization: "linear" | "random-walk" | "longest-walk". */
int uniasm_vocab_build(const uniasm_corpus* c, const char* tokenizer_mode,
                       const char* serialization, uint64_t seed, uint64_t cap,
                       uniasm_vocab** out);
int uniasm_vocab_save(const uniasm_vocab* v, const char* path);
int uniasm_vocab_load(const char* path, uniasm_vocab** out);
void uniasm_vocab_free(uniasm_vocab* v);
uint64_t uniasm_vocab_size(const uniasm_vocab* v);

/* ---- dataset ---- */

int uniasm_dataset_build(const uniasm_corpus* c, const uniasm_vocab* v,
                         const char* tokenizer_mode, const char* serialization, uint64_t max_sl,
                         uint64_t min_instructions, uint64_t seed, uniasm_dataset** out);
/* Unit-aware shuffle and split: a pair and its swap stay together. */
int uniasm_dataset_split(const uniasm_dataset* d, double train_ratio, uint64_t seed,
                         uniasm_dataset** train_out, uniasm_dataset** validation_out);
/* vocab_hash goes into the file header (see uniasm_file_fingerprint). */
int uniasm_dataset_save(const uniasm_dataset* d, const char* path, const char* vocab_hash);
int uniasm_dataset_load(const char* path, uniasm_dataset** out);
void uniasm_dataset_free(uniasm_dataset* d);
uint64_t uniasm_dataset_size(const uniasm_dataset* d);
int uniasm_dataset_header_json(const uniasm_dataset* d, char** json_out);

/* ---- model ---- */

int uniasm_model_init(uint32_t layers, uint32_t heads, uint32_t hidden, uint32_t intermediate,
                      uint32_t max_sl, uint32_t vocab, uint64_t seed, uniasm_model** out);
int uniasm_model_load(const char* path, uniasm_model** out);
int uniasm_model_save(const uniasm_model* m, const char* path);
void uniasm_model_free(uniasm_model* m);
int uniasm_model_config_json(const uniasm_model* m, char** json_out);

/* ---- training ---- */

/* config_json keys: batch, lr, warmup, max_steps, checkpoint_every, seed,
 * tasks (array of "alg"/"sfp"/"mlm"), mlm_rate. Missing keys take defaults.
 * Writes config.json, metrics.jsonl and checkpoints under run_dir; returns
 * {"steps", "final_loss", "final_checkpoint"} via outcome_json_out. */
int uniasm_train(uniasm_model* m, const uniasm_dataset* train_data, const char* config_json,
                 const char* run_dir, char** outcome_json_out);

/* ---- embedding pools ---- */

int uniasm_embed(const uniasm_model* m, const uniasm_corpus* c, const uniasm_vocab* v,
                 const char* tokenizer_mode, const char* serialization, uint64_t seed,
                 uniasm_pool** out);
int uniasm_pool_save(const uniasm_pool* p, const char* path);
int uniasm_pool_load(const char* path, uniasm_pool** out);
void uniasm_pool_free(uniasm_pool* p);
uint64_t uniasm_pool_size(const uniasm_pool* p);
int uniasm_pool_export_tsv(const uniasm_pool* p, const char* path);

/* ---- search and evaluation ---- */

/* Per query one JSON line: its label and the top-k hits with cosine scores. */
int uniasm_search_topk(const uniasm_pool* queries, const uniasm_pool* targets, uint64_t k,
                       char** jsonl_out);

/* task: "xcom-<opt>" | "xopt-<compiler>-<opt>-<opt>" | "xobf-<obf>-<opt>".
 * Builds source/target pools out of corpus_pool, evaluates Recall@k for each
 * k in ks; returns a JSON report with per-query ranks. */
int uniasm_eval_task(const uniasm_pool* corpus_pool, const char* task, const uint32_t* ks,
                     size_t ks_len, char** json_out);

/* Mean over queries of (own variants found in top-k) / (variant count). */
int uniasm_eval_vuln(const uniasm_pool* queries, const uniasm_pool* targets, uint64_t k,
                     double* recall_out);

#ifdef __cplusplus
}
#endif

#endif /* UNIASM_H */
