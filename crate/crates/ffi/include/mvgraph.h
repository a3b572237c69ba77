#ifndef MVGRAPH_H
#define MVGRAPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MvgStatus {
  MVG_STATUS_OK = 0,
  MVG_STATUS_NULL_ARGUMENT = 1,
  MVG_STATUS_INVALID_UTF8 = 2,
  MVG_STATUS_SYNTAX = 3,
  MVG_STATUS_VALIDATION = 4,
  MVG_STATUS_UNKNOWN_VERSION = 5,
  MVG_STATUS_ANALYSIS = 6,
  MVG_STATUS_PANIC = 7,
} MvgStatus;

typedef enum MvgMode {
  MVG_MODE_MVM = 0,
  MVG_MODE_SVM = 1,
} MvgMode;

typedef enum MvgLcp {
  MVG_LCP_ALL = 0,
  MVG_LCP_SINGLE = 1,
} MvgLcp;

// Violation patterns typed over one corpus' type graph.
typedef struct MvgConstraints MvgConstraints;

// A parsed, validated versioning. The multi-version model is built on first use.
typedef struct MvgCorpus MvgCorpus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses and validates a corpus document. On success `*out` receives a
// handle to release with [`mvg_corpus_free`].
//
// # Safety
// `data` must point to `len` readable bytes and `out` must be writable.
enum MvgStatus mvg_corpus_parse(const uint8_t *data, size_t len, struct MvgCorpus **out);

// # Safety
// `corpus` must be null or a handle from [`mvg_corpus_parse`] not yet freed.
void mvg_corpus_free(struct MvgCorpus *corpus);

// Number of versions in the corpus, or 0 for a null handle.
//
// # Safety
// `corpus` must be null or a live corpus handle.
size_t mvg_corpus_version_count(const struct MvgCorpus *corpus);

// Canonical corpus document.
//
// # Safety
// `corpus` must be a live corpus handle and `out` writable.
enum MvgStatus mvg_corpus_write(const struct MvgCorpus *corpus, char **out);

// Parses a constraint document against the corpus' type graph.
//
// # Safety
// `corpus` must be a live corpus handle, `data` must point to `len`
// readable bytes and `out` must be writable.
enum MvgStatus mvg_constraints_parse(const struct MvgCorpus *corpus,
                                     const uint8_t *data,
                                     size_t len,
                                     struct MvgConstraints **out);

// # Safety
// `constraints` must be null or a handle from [`mvg_constraints_parse`] not yet freed.
void mvg_constraints_free(struct MvgConstraints *constraints);

// Violations in every version as a JSON array.
//
// # Safety
// Handles must be live and `out` writable.
enum MvgStatus mvg_check(const struct MvgCorpus *corpus,
                         const struct MvgConstraints *constraints,
                         enum MvgMode mode,
                         char **out);

// Insert-delete conflicts for every mergeable version pair as a JSON array.
//
// # Safety
// `corpus` must be live and `out` writable.
enum MvgStatus mvg_conflicts(const struct MvgCorpus *corpus,
                             enum MvgMode mode,
                             enum MvgLcp lcp,
                             char **out);

// Violations in the deletion-favouring merges as a JSON array.
//
// # Safety
// Handles must be live and `out` writable.
enum MvgStatus mvg_merge_check(const struct MvgCorpus *corpus,
                               const struct MvgConstraints *constraints,
                               enum MvgMode mode,
                               enum MvgLcp lcp,
                               char **out);

// One version, extracted from the multi-version model, as JSON.
//
// # Safety
// `corpus` must be live, `version` a NUL-terminated string and `out` writable.
enum MvgStatus mvg_project(const struct MvgCorpus *corpus, const char *version, char **out);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void mvg_string_free(char *s);

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *mvg_last_error(void);

// Library version as a static NUL-terminated string.
const char *mvg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MVGRAPH_H */
