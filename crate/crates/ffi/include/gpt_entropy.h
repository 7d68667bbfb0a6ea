#ifndef GPT_ENTROPY_H
#define GPT_ENTROPY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GptStatus {
  GPT_STATUS_OK = 0,
  GPT_STATUS_NULL_POINTER = 1,
  GPT_STATUS_INVALID_UTF8 = 2,
  GPT_STATUS_PARSE = 3,
  GPT_STATUS_INVALID_STATE = 4,
  GPT_STATUS_SIGNALLING = 5,
  GPT_STATUS_GUARD_EXCEEDED = 6,
  GPT_STATUS_UNSUPPORTED = 7,
  GPT_STATUS_INVALID_ARGUMENT = 8,
  GPT_STATUS_PANIC = 9,
} GptStatus;

// Opaque handle to a validated state.
typedef struct GptState GptState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a JSON state. On success `*out` owns a new handle.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GptStatus gpt_state_from_json(const char *json, struct GptState **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `handle` must come from `gpt_state_from_json` and not be freed twice.
void gpt_state_free(struct GptState *handle);

// Number of subsystems of the state, or 0 for a null handle.
//
// # Safety
// `handle` must be null or a live handle.
size_t gpt_state_subsystems(const struct GptState *handle);

// Measurement entropy of the whole state, in bits.
//
// # Safety
// `handle` must be a live handle and `out` a valid pointer.
enum GptStatus gpt_hhat(const struct GptState *handle, double *out);

// Measurement entropy of the marginal on `subsystems`.
//
// # Safety
// `subsystems` must point to `len` indices; `out` must be valid.
enum GptStatus gpt_hhat_of(const struct GptState *handle,
                           const size_t *subsystems,
                           size_t len,
                           double *out);

// Conditional entropy of A given B; `plus` selects the measured form.
//
// # Safety
// `a` and `b` must point to `a_len` and `b_len` indices; `out` must be valid.
enum GptStatus gpt_conditional(const struct GptState *handle,
                               const size_t *a,
                               size_t a_len,
                               const size_t *b,
                               size_t b_len,
                               bool plus,
                               double *out);

// Mutual information between A and B; `plus` selects the measured form.
//
// # Safety
// `a` and `b` must point to `a_len` and `b_len` indices; `out` must be valid.
enum GptStatus gpt_mutual(const struct GptState *handle,
                          const size_t *a,
                          size_t a_len,
                          const size_t *b,
                          size_t b_len,
                          bool plus,
                          double *out);

// Decomposition entropy, in bits.
//
// # Safety
// `handle` must be a live handle and `out` a valid pointer.
enum GptStatus gpt_decomposition_entropy(const struct GptState *handle, double *out);

// CHSH value of a bipartite binary box.
//
// # Safety
// `handle` must be a live handle and `out` a valid pointer.
enum GptStatus gpt_chsh(const struct GptState *handle, double *out);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`). Returns the full message length
// excluding the terminator.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t gpt_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GPT_ENTROPY_H */
