#ifndef MINLAB_H
#define MINLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MinlabStatus {
  MINLAB_STATUS_OK = 0,
  MINLAB_STATUS_NULL_POINTER = 1,
  MINLAB_STATUS_INVALID_ARGUMENT = 2,
  MINLAB_STATUS_CAP_EXCEEDED = 3,
  MINLAB_STATUS_NOT_MARKOV = 4,
  MINLAB_STATUS_EMPTY_SAMPLE = 5,
  MINLAB_STATUS_PARSE = 6,
  MINLAB_STATUS_INTERNAL = 7,
} MinlabStatus;

typedef struct MinlabDag MinlabDag;

typedef struct MinlabLearner MinlabLearner;

typedef struct MinlabSample MinlabSample;

typedef struct MinlabTable MinlabTable;

// Flags describing a (graph, distribution) pair.
typedef struct MinlabStateClass {
  bool markov;
  bool faithful;
  bool minimal;
  bool u_minimal;
  bool quasi_faithful;
} MinlabStateClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failing call on this thread; empty after a
// success. Valid until the next call on the same thread.
const char *minlab_last_error(void);

// Frees a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void minlab_string_free(char *s);

// Number of labelled DAGs on `k` variables.
//
// # Safety
// `out` must be valid for writes.
enum MinlabStatus minlab_dag_count(size_t k, size_t *out);

// Number of Markov-equivalence classes on `k` variables.
//
// # Safety
// `out` must be valid for writes.
enum MinlabStatus minlab_class_count(size_t k, size_t *out);

// Builds a DAG from `n_edges` (parent, child) pairs stored flat in `edges`.
//
// # Safety
// `edges` must point to `2 * n_edges` values; `out` must be valid for writes.
enum MinlabStatus minlab_dag_new(size_t k,
                                 const size_t *edges,
                                 size_t n_edges,
                                 struct MinlabDag **out);

// # Safety
// `dag` must come from [`minlab_dag_new`] and not have been freed.
void minlab_dag_free(struct MinlabDag *dag);

// Whether `U ⟂ V | W` is entailed by `dag`.
//
// # Safety
// `dag` must be a live handle; `out` must be valid for writes.
enum MinlabStatus minlab_d_separated(const struct MinlabDag *dag,
                                     uint32_t u,
                                     uint32_t v,
                                     uint32_t w,
                                     bool *out);

// A joint table over variables with the given cardinalities; `probs` is in
// mixed-radix order with the last variable varying fastest.
//
// # Safety
// `cards` must point to `k` values and `probs` to `n_probs` values; `out`
// must be valid for writes.
enum MinlabStatus minlab_table_new(const size_t *cards,
                                   size_t k,
                                   const double *probs,
                                   size_t n_probs,
                                   struct MinlabTable **out);

// Parses a table from JSON `{"cards": [...], "probs": [...]}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be valid for writes.
enum MinlabStatus minlab_table_from_json(const char *json, struct MinlabTable **out);

// Serializes a table to JSON; free the result with [`minlab_string_free`].
//
// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum MinlabStatus minlab_table_to_json(const struct MinlabTable *table, char **out);

// # Safety
// `table` must come from this library and not have been freed.
void minlab_table_free(struct MinlabTable *table);

// Total variation distance between two tables of the same shape.
//
// # Safety
// Both handles must be live; `out` must be valid for writes.
enum MinlabStatus minlab_tv_distance(const struct MinlabTable *a,
                                     const struct MinlabTable *b,
                                     double *out);

// The L1 distance of `table` from satisfying `U ⟂ V | W`.
//
// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum MinlabStatus minlab_l1_stat(const struct MinlabTable *table,
                                 uint32_t u,
                                 uint32_t v,
                                 uint32_t w,
                                 double *out);

// Whether `U ⟂ V | W` holds exactly (up to the default tolerance).
//
// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum MinlabStatus minlab_ci_holds(const struct MinlabTable *table,
                                  uint32_t u,
                                  uint32_t v,
                                  uint32_t w,
                                  bool *out);

// Classifies the state `(dag, table)`; all flags are false when the graph is
// not Markov to the table.
//
// # Safety
// Both handles must be live; `out` must be valid for writes.
enum MinlabStatus minlab_classify(const struct MinlabDag *dag,
                                  const struct MinlabTable *table,
                                  struct MinlabStateClass *out);

// Draws `n` IID observations from `table` with a fixed seed.
//
// # Safety
// `table` must be a live handle; `out` must be valid for writes.
enum MinlabStatus minlab_sample_draw(const struct MinlabTable *table,
                                     size_t n,
                                     uint64_t seed,
                                     struct MinlabSample **out);

// Number of observations in a sample.
//
// # Safety
// `sample` must be a live handle; `out` must be valid for writes.
enum MinlabStatus minlab_sample_len(const struct MinlabSample *sample, size_t *out);

// # Safety
// `sample` must come from this library and not have been freed.
void minlab_sample_free(struct MinlabSample *sample);

// A learner over `k` variables. `preferred_class < 0` selects the default
// hypothesis order; otherwise the order preferring that class id.
//
// # Safety
// `out` must be valid for writes.
enum MinlabStatus minlab_learner_new(size_t k,
                                     int64_t preferred_class,
                                     double threshold_constant,
                                     struct MinlabLearner **out);

// Learns a class id from a sample.
//
// # Safety
// Both handles must be live; `out` must be valid for writes.
enum MinlabStatus minlab_learner_learn(const struct MinlabLearner *learner,
                                       const struct MinlabSample *sample,
                                       size_t *class_id);

// # Safety
// `learner` must come from this library and not have been freed.
void minlab_learner_free(struct MinlabLearner *learner);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINLAB_H */
