#ifndef CODESTAT_H
#define CODESTAT_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Numeric spoiling kinds, passed to [`cs_numeric_spoil`] as integers.
typedef enum CsSpoilKind {
  // `[n, k, d] → [n+1, k, d]`.
  CS_SPOIL_KIND_PAD = 0,
  // `[n, k, d] → [n−1, k, d−1]`.
  CS_SPOIL_KIND_PUNCTURE = 1,
  // `[n, k, d] → [n−1, k′, d]`.
  CS_SPOIL_KIND_SHORTEN = 2,
} CsSpoilKind;

// Status codes; the non-zero values match the CLI exit codes where they
// overlap.
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INPUT = 2,
  CS_STATUS_PRECONDITION = 3,
  CS_STATUS_NON_CONVERGENCE = 4,
  CS_STATUS_PANIC = 5,
} CsStatus;

// Opaque code handle.
typedef struct CsCode CsCode;

// Parameters of a code. `d` is 0 and `delta` is NaN when the code has
// fewer than two words.
typedef struct CsCodeParams {
  uint32_t q;
  size_t n;
  size_t size;
  size_t d;
  double k_real;
  uint32_t k_floor;
  // `k_floor / n` as a reduced fraction.
  int64_t rate_num;
  int64_t rate_den;
  double rate;
  double delta;
} CsCodeParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a code from `count` words of length `n`, stored row-major in
// `digits` (`count · n` bytes, each below `q`).
//
// # Safety
// `digits` must point to `count · n` readable bytes and `out` must be
// writable.
enum CsStatus cs_code_new(uint32_t q,
                          size_t n,
                          const uint8_t *digits,
                          size_t count,
                          struct CsCode **out);

// Parses `{"q": .., "n": .., "words": [..]}`.
//
// # Safety
// `json` must be a nul-terminated string and `out` writable.
enum CsStatus cs_code_from_json(const char *json, struct CsCode **out);

// Releases a code. Null is ignored.
//
// # Safety
// `code` must come from this library and not be used afterwards.
void cs_code_free(struct CsCode *code);

// # Safety
// `code` must be a live handle and `out` writable.
enum CsStatus cs_code_params(const struct CsCode *code, struct CsCodeParams *out);

// Copies the words, row-major, into `digits`, which holds `capacity`
// bytes. Needs `capacity ≥ size · n`.
//
// # Safety
// `digits` must point to `capacity` writable bytes.
enum CsStatus cs_code_words(const struct CsCode *code, uint8_t *digits, size_t capacity);

// The `[q, k, q−k+1]` Reed–Solomon code over the prime field `F_q`.
//
// # Safety
// `out` must be writable.
enum CsStatus cs_reed_solomon(uint32_t q, size_t k, struct CsCode **out);

// The span of a `k × n` generator matrix over the prime field `F_q`,
// stored row-major in `rows`.
//
// # Safety
// `rows` must point to `k · n` readable values and `out` be writable.
enum CsStatus cs_linear_code(uint32_t q,
                             size_t k,
                             size_t n,
                             const uint32_t *rows,
                             struct CsCode **out);

// Applies a numeric spoiling (a `CsSpoilKind` value) and returns the new
// code.
//
// # Safety
// `code` must be a live handle and `out` writable.
enum CsStatus cs_numeric_spoil(const struct CsCode *code, int32_t kind, struct CsCode **out);

// `Z(β)`. `series_terms = 0` uses the closed form, otherwise the series
// truncated after that many terms. Divergence sets `*divergent` and leaves
// `*value` at infinity.
//
// # Safety
// `code` must be a live handle; `value` and `divergent` writable.
enum CsStatus cs_partition_function(const struct CsCode *code,
                                    double beta,
                                    size_t series_terms,
                                    double *value,
                                    bool *divergent);

// The unique `β` with `Σ e^{−β λ_i} = 1`.
//
// # Safety
// `lambda` must point to `len` readable values and `out` be writable.
enum CsStatus cs_critical_beta(const double *lambda, size_t len, double *out);

// KMS state value on the pair of codeword sequences given as indices into
// the code's word list.
//
// # Safety
// `w` and `w_prime` must point to `w_len` and `w_prime_len` readable
// indices; `code` must be live and `out` writable.
enum CsStatus cs_kms_state_value(const struct CsCode *code,
                                 double beta,
                                 const size_t *w,
                                 size_t w_len,
                                 const size_t *w_prime,
                                 size_t w_prime_len,
                                 double *out);

// `1/#C`.
//
// # Safety
// `code` must be live and `out` writable.
enum CsStatus cs_radon_nikodym_constant(const struct CsCode *code, double *out);

// Box-counting estimate `log_q(#C^depth) / (depth · n)`.
//
// # Safety
// `code` must be live and `out` writable.
enum CsStatus cs_box_count_dimension(const struct CsCode *code, uint32_t depth, double *out);

// Largest `#(C∩π)` for each `ℓ = 0..=n`, written to `max_counts`
// (capacity `n + 1`). Also reports `d` and whether the threshold property
// holds.
//
// # Safety
// `max_counts` must hold `capacity` writable values; `d` and `holds`
// writable.
enum CsStatus cs_threshold_scan(const struct CsCode *code,
                                uint64_t seed,
                                size_t *max_counts,
                                size_t capacity,
                                size_t *d,
                                bool *holds);

// The `s` with `Σ r_i^s = 1` for ratios in `(0, 1)`.
//
// # Safety
// `ratios` must point to `len` readable values and `out` be writable.
enum CsStatus cs_similarity_dimension(const double *ratios, size_t len, double *out);

// Message for the last failure on this thread, or null. Free it with
// [`cs_string_free`].
char *cs_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from [`cs_last_error_message`] and not be used afterwards.
void cs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CODESTAT_H */
