#ifndef COEXT_H
#define COEXT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum CoextStatus {
  COEXT_STATUS_OK = 0,
  COEXT_STATUS_NULL_POINTER = 1,
  COEXT_STATUS_INVALID_UTF8 = 2,
  COEXT_STATUS_PARSE = 3,
  COEXT_STATUS_OUT_OF_RANGE = 4,
  COEXT_STATUS_EVAL = 5,
  COEXT_STATUS_CHECK = 6,
  COEXT_STATUS_PANIC = 7,
} CoextStatus;

/**
 * How [`coext_formula_translate`] rewrites a formula.
 */
typedef enum CoextTranslation {
  /**
   * ZFA into the raw language
   */
  COEXT_TRANSLATION_ZFA = 0,
  /**
   * ZFA into the starred language
   */
  COEXT_TRANSLATION_ZFA_STARRED = 1,
  /**
   * relativized to pure sets
   */
  COEXT_TRANSLATION_PURE = 2,
  /**
   * starred predicates expanded
   */
  COEXT_TRANSLATION_EXPAND = 3,
} CoextTranslation;

/**
 * Opaque formula.
 */
typedef struct CoextFormula CoextFormula;

/**
 * Opaque check report.
 */
typedef struct CoextReport CoextReport;

/**
 * Opaque membership structure.
 */
typedef struct CoextStructure CoextStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message from the latest call on this thread if it failed, or NULL.
 * The pointer stays valid until the next call on this thread; do not free it.
 */
const char *coext_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void coext_string_free(char *s);

/**
 * A structure with `n` nodes and no edges.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CoextStatus coext_structure_new(size_t n, struct CoextStructure **out);

/**
 * Parses the text format (`nodes N`, `mem Z X`, `label X name`).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CoextStatus coext_structure_parse(const char *text, struct CoextStructure **out);

/**
 * The rank-`rank` hereditarily finite sets (`rank ≤ 4`).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CoextStatus coext_structure_hf(size_t rank, struct CoextStructure **out);

/**
 * Rank-3 hereditarily finite sets with two doppelgängers of the empty set
 * and one of its singleton, closed under the axiom witnesses when `closed`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CoextStatus coext_structure_standard_family(bool closed, struct CoextStructure **out);

/**
 * Releases a structure. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void coext_structure_free(struct CoextStructure *s);

/**
 * Adds the edge `member ∈ container`.
 *
 * # Safety
 * `s` must be a valid handle.
 */
enum CoextStatus coext_structure_add_edge(struct CoextStructure *s,
                                          size_t member,
                                          size_t container);

/**
 * Number of nodes; 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a valid handle.
 */
size_t coext_structure_len(const struct CoextStructure *s);

/**
 * Whether the extension of `x` is closed under co-extensionality.
 *
 * # Safety
 * `s` must be a valid handle and `out` a valid pointer.
 */
enum CoextStatus coext_structure_is_set(const struct CoextStructure *s, size_t x, bool *out);

/**
 * Whether `x` and `y` have the same members.
 *
 * # Safety
 * `s` must be a valid handle and `out` a valid pointer.
 */
enum CoextStatus coext_structure_coext(const struct CoextStructure *s,
                                       size_t x,
                                       size_t y,
                                       bool *out);

/**
 * Whether `z ∈* x`.
 *
 * # Safety
 * `s` must be a valid handle and `out` a valid pointer.
 */
enum CoextStatus coext_structure_memstar(const struct CoextStructure *s,
                                         size_t z,
                                         size_t x,
                                         bool *out);

/**
 * The extensional quotient as a new structure.
 *
 * # Safety
 * `s` must be a valid handle and `out` a valid pointer.
 */
enum CoextStatus coext_structure_quotient(const struct CoextStructure *s,
                                          struct CoextStructure **out);

/**
 * The structure in the text format.
 *
 * # Safety
 * `s` must be a valid handle and `out` a valid pointer.
 */
enum CoextStatus coext_structure_to_string(const struct CoextStructure *s, char **out);

/**
 * Parses a formula.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CoextStatus coext_formula_parse(const char *text, struct CoextFormula **out);

/**
 * Releases a formula. NULL is ignored.
 *
 * # Safety
 * `f` must come from this library and not be freed twice.
 */
void coext_formula_free(struct CoextFormula *f);

/**
 * The formula as text.
 *
 * # Safety
 * `f` must be a valid handle and `out` a valid pointer.
 */
enum CoextStatus coext_formula_to_string(const struct CoextFormula *f, char **out);

/**
 * Translates a formula into a new handle.
 *
 * # Safety
 * `f` must be a valid handle and `out` a valid pointer.
 */
enum CoextStatus coext_formula_translate(const struct CoextFormula *f,
                                         enum CoextTranslation mode,
                                         struct CoextFormula **out);

/**
 * Evaluates `f` under `assignment` (such as `"x=0,y=2"`, may be empty).
 *
 * # Safety
 * Handles must be valid, `assignment` NUL-terminated and `out` valid.
 */
enum CoextStatus coext_eval(const struct CoextStructure *s,
                            const struct CoextFormula *f,
                            const char *assignment,
                            bool *out);

/**
 * Evaluates the universal closure of `f`.
 *
 * # Safety
 * Handles must be valid and `out` valid.
 */
enum CoextStatus coext_eval_all(const struct CoextStructure *s,
                                const struct CoextFormula *f,
                                bool *out);

/**
 * Checks a parameter-free axiom (`"pairing*"`, `"weak-ext"`, ...) with
 * parameters of rank at most `max_rank`, or all nodes when `max_rank < 0`.
 *
 * # Safety
 * `s` must be a valid handle, `name` NUL-terminated and `out` valid.
 */
enum CoextStatus coext_check_axiom(const struct CoextStructure *s,
                                   const char *name,
                                   int64_t max_rank,
                                   struct CoextReport **out);

/**
 * Checks a schema (`"lemma1"`, ...) over its default corpus of the given
 * depth (at most 3).
 *
 * # Safety
 * `s` must be a valid handle, `tag` NUL-terminated and `out` valid.
 */
enum CoextStatus coext_check_schema(const struct CoextStructure *s,
                                    const char *tag,
                                    size_t depth,
                                    struct CoextReport **out);

/**
 * Whether the report has no failures; false for NULL.
 *
 * # Safety
 * `r` must be NULL or a valid handle.
 */
bool coext_report_passed(const struct CoextReport *r);

/**
 * Number of examined instances whose antecedent held; 0 for NULL.
 *
 * # Safety
 * `r` must be NULL or a valid handle.
 */
uint64_t coext_report_realized(const struct CoextReport *r);

/**
 * The human-readable report, or the counterexample record with `records`.
 *
 * # Safety
 * `r` must be a valid handle and `out` a valid pointer.
 */
enum CoextStatus coext_report_to_string(const struct CoextReport *r, bool records, char **out);

/**
 * Releases a report. NULL is ignored.
 *
 * # Safety
 * `r` must come from this library and not be freed twice.
 */
void coext_report_free(struct CoextReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COEXT_H */
