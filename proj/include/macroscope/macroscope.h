#ifndef MACROSCOPE_MACROSCOPE_H
#define MACROSCOPE_MACROSCOPE_H

/*
 * C interface to the macroscope simulator: allotment structures,
 * simultaneous-message blackboard protocols, exhaustive verification and
 * minimum-cost protocol search.
 *
 * Every function returns an mcs_status (MCS_OK == 0 on success). On failure
 * a description is available from mcs_last_error() on the calling thread.
 * Handles are opaque; each *_create / producing call must be paired with the
 * matching *_destroy. Indices and player ids are 1-based; discrete input
 * values are 0-based (a D-ary alphabet is {0..D-1}).
 *
 * Functions that fill a caller buffer with text take (buf, len, needed):
 * `needed` receives the size including the terminating NUL, and when `len`
 * is too small MCS_ERR_BUFFER_TOO_SMALL is returned with nothing written.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MACROSCOPE_BUILDING_LIBRARY)
#    define MCS_API __declspec(dllexport)
#  else
#    define MCS_API __declspec(dllimport)
#  endif
#else
#  define MCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcs_status {
  MCS_OK = 0,
  MCS_ERR_NULL_POINTER = -1,
  MCS_ERR_INVALID_ARGUMENT = -2,
  MCS_ERR_COVERING = -3,
  MCS_ERR_MISMATCH = -4,
  MCS_ERR_CEILING = -5,
  MCS_ERR_OVERFLOW = -6,
  MCS_ERR_PROTOCOL = -7,
  MCS_ERR_PARSE = -8,
  MCS_ERR_BUFFER_TOO_SMALL = -9,
  MCS_ERR_NOT_FOUND = -10,
  MCS_ERR_INTERNAL = -99
} mcs_status;

typedef enum mcs_function {
  MCS_PARITY = 0,
  MCS_CONSTANCY = 1,
  MCS_BSF = 2,
  MCS_AVERAGE = 3
} mcs_function;

typedef enum mcs_blindness {
  MCS_SINGLE_BLIND = 0,
  MCS_DOUBLE_BLIND = 1
} mcs_blindness;

typedef enum mcs_protocol {
  MCS_SB_GENERIC = 0,
  MCS_DB_GENERIC = 1,
  MCS_SB_CONSTANCY = 2,
  MCS_DB_CONSTANCY = 3,
  MCS_DB_BSF = 4,
  MCS_SB_BSF = 5,
  MCS_SB_AVERAGE = 6
} mcs_protocol;

#define MCS_PROTOCOL_COUNT 7

typedef struct mcs_structure_struct* mcs_structure_t;
typedef struct mcs_macroscope_struct* mcs_macroscope_t;
typedef struct mcs_run_struct* mcs_run_t;
typedef struct mcs_verify_struct* mcs_verify_t;
typedef struct mcs_search_struct* mcs_search_t;

MCS_API const char* mcs_status_string(int status);
MCS_API const char* mcs_last_error(void);
MCS_API const char* mcs_version(void);

/* ---- allotment structures ---- */

/* `indices` holds the k sets back to back; set_sizes[i] entries belong to
 * player i+1. Covering is not required here. */
MCS_API int mcs_structure_create(mcs_structure_t* out, uint32_t n, uint32_t k,
                                 const uint32_t* set_sizes, const uint32_t* indices);
/* kind: partition | nof | even_cyclic | random_covering. set_size is m for
 * even_cyclic and ignored otherwise; seed drives random_covering. */
MCS_API int mcs_structure_generate(mcs_structure_t* out, const char* kind, uint32_t n, uint32_t k,
                                   uint32_t set_size, uint64_t seed);
/* {"n": int, "k": int, "sets": [[int,...],...]} */
MCS_API int mcs_structure_from_json(mcs_structure_t* out, const char* json);
MCS_API int mcs_structure_destroy(mcs_structure_t s);

MCS_API int mcs_structure_n(mcs_structure_t s, uint32_t* n);
MCS_API int mcs_structure_k(mcs_structure_t s, uint32_t* k);
MCS_API int mcs_structure_set(mcs_structure_t s, uint32_t player, uint32_t* buf, size_t len,
                              size_t* count);
MCS_API int mcs_structure_is_covering(mcs_structure_t s, int* covering);
/* *is_even = 0 and *c = 0 when the structure is not even. */
MCS_API int mcs_structure_evenness(mcs_structure_t s, int* is_even, uint32_t* c);
MCS_API int mcs_structure_component_count(mcs_structure_t s, uint32_t* r);
/* MCS_ERR_COVERING for an uncovered index. */
MCS_API int mcs_structure_responsible_player(mcs_structure_t s, uint32_t index, uint32_t* player);
MCS_API int mcs_structure_multiplicity(mcs_structure_t s, uint32_t index, uint32_t* count);
/* 16 hex digits plus NUL. */
MCS_API int mcs_structure_digest(mcs_structure_t s, char* buf, size_t len, size_t* needed);
MCS_API int mcs_structure_to_json(mcs_structure_t s, char* buf, size_t len, size_t* needed);

/* ---- macroscopes ---- */

/* alphabet is D for constancy (ignored otherwise); epsilon is used by
 * average only. Rejects uncovered structures (MCS_ERR_COVERING). */
MCS_API int mcs_macroscope_create(mcs_macroscope_t* out, mcs_structure_t s, mcs_function f,
                                  uint32_t alphabet, double epsilon, mcs_blindness b);
MCS_API int mcs_macroscope_destroy(mcs_macroscope_t m);

/* ---- protocols ---- */

MCS_API int mcs_protocol_from_name(const char* name, mcs_protocol* out);
MCS_API const char* mcs_protocol_name(mcs_protocol p);
MCS_API int mcs_protocol_blindness(mcs_protocol p, mcs_blindness* b);
MCS_API int mcs_protocol_supports(mcs_protocol p, mcs_function f, int* supported);
/* MCS_ERR_NOT_FOUND for double-blind averaging. */
MCS_API int mcs_default_protocol(mcs_function f, mcs_blindness b, mcs_protocol* out);
MCS_API int mcs_theoretical_bound(mcs_protocol p, mcs_macroscope_t m, uint64_t* bits);

/* ---- single runs ---- */

MCS_API int mcs_run_discrete(mcs_run_t* out, mcs_protocol p, mcs_macroscope_t m,
                             const uint32_t* values, size_t n);
MCS_API int mcs_run_real(mcs_run_t* out, mcs_protocol p, mcs_macroscope_t m, const double* values,
                         size_t n);
MCS_API int mcs_run_destroy(mcs_run_t r);

MCS_API int mcs_run_cost_bits(mcs_run_t r, uint64_t* bits);
MCS_API int mcs_run_bound_bits(mcs_run_t r, uint64_t* bits);
MCS_API int mcs_run_correct(mcs_run_t r, int* correct);
MCS_API int mcs_run_oracle(mcs_run_t r, double* value);
MCS_API int mcs_run_max_abs_error(mcs_run_t r, double* error);
MCS_API int mcs_run_output(mcs_run_t r, uint32_t player, double* value);
/* The player's blackboard entry as '0'/'1' characters. */
MCS_API int mcs_run_message(mcs_run_t r, uint32_t player, char* buf, size_t len, size_t* needed);

/* ---- exhaustive verification ---- */

/* ceiling == 0 selects the default of 2^20 inputs. */
MCS_API int mcs_verify(mcs_verify_t* out, mcs_protocol p, mcs_macroscope_t m, uint64_t ceiling);
MCS_API int mcs_verify_destroy(mcs_verify_t v);
MCS_API int mcs_verify_inputs(mcs_verify_t v, uint64_t* inputs);
MCS_API int mcs_verify_failures(mcs_verify_t v, uint64_t* failures);
MCS_API int mcs_verify_cost_mismatches(mcs_verify_t v, uint64_t* mismatches);
MCS_API int mcs_verify_bound_bits(mcs_verify_t v, uint64_t* bits);
MCS_API int mcs_verify_passed(mcs_verify_t v, int* passed);
/* Text of the i-th listed failure: "input=<values> player=<p> got=<v> expected=<v>". */
MCS_API int mcs_verify_failure_text(mcs_verify_t v, size_t i, char* buf, size_t len, size_t* needed);

/* ---- minimum-cost search ---- */

/* ceiling == 0 selects the default of 2^32 correctness checks. */
MCS_API int mcs_search(mcs_search_t* out, mcs_function f, uint32_t alphabet, mcs_structure_t s,
                       mcs_blindness b, uint32_t budget, uint64_t ceiling);
MCS_API int mcs_search_destroy(mcs_search_t r);
MCS_API int mcs_search_found(mcs_search_t r, int* found);
/* MCS_ERR_NOT_FOUND when no protocol fits the budget. */
MCS_API int mcs_search_min_cost(mcs_search_t r, uint32_t* cost);
MCS_API int mcs_search_explored(mcs_search_t r, uint64_t* explored);
MCS_API int mcs_search_witness_text(mcs_search_t r, char* buf, size_t len, size_t* needed);
/* Replays the witness through exhaustive verification on the target. */
MCS_API int mcs_search_verify_witness(mcs_search_t r, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* MACROSCOPE_MACROSCOPE_H */
