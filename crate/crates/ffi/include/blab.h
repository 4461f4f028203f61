#ifndef BLAB_H
#define BLAB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum BlabStatus {
  BLAB_STATUS_OK = 0,
  BLAB_STATUS_NULL_POINTER = 1,
  BLAB_STATUS_INVALID_ARGUMENT = 2,
  BLAB_STATUS_GROUP_MISMATCH = 3,
  BLAB_STATUS_BUDGET = 4,
  BLAB_STATUS_PARSE = 5,
  BLAB_STATUS_NOT_REGULAR = 6,
  BLAB_STATUS_INTERNAL = 7,
  BLAB_STATUS_BUFFER_TOO_SMALL = 8,
} BlabStatus;

// A finite abelian group.
typedef struct BlabGroup BlabGroup;

// A subset of a group.
typedef struct BlabSet BlabSet;

// A Bourgain system.
typedef struct BlabSystem BlabSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a group literal such as `Z12`, `Z4xZ6` or `F3^2`.
//
// # Safety
// `literal` must be a NUL-terminated string and `out` writable.
enum BlabStatus blab_group_parse(const char *literal, struct BlabGroup **out);

// # Safety
// `group` must be a live handle and `out` writable.
enum BlabStatus blab_group_cardinality(const struct BlabGroup *group, size_t *out);

// # Safety
// `group` must be null or a handle not yet freed.
void blab_group_free(struct BlabGroup *group);

// A set from flat element indices.
//
// # Safety
// `indices` must point to `len` readable values (or be null when `len` is 0).
enum BlabStatus blab_set_new(const struct BlabGroup *group,
                             const size_t *indices,
                             size_t len,
                             struct BlabSet **out);

// # Safety
// `set` must be a live handle and `out` writable.
enum BlabStatus blab_set_len(const struct BlabSet *set, size_t *out);

// Copies the sorted element indices into `buf`. `out_len` always receives
// the set size; if `capacity` is smaller nothing is copied and
// `BufferTooSmall` is returned.
//
// # Safety
// `buf` must have room for `capacity` values.
enum BlabStatus blab_set_indices(const struct BlabSet *set,
                                 size_t *buf,
                                 size_t capacity,
                                 size_t *out_len);

// # Safety
// `set` must be null or a handle not yet freed.
void blab_set_free(struct BlabSet *set);

// `A + B`, or the restricted sumset when `restricted` is true.
//
// # Safety
// Both sets must be live handles and `out` writable.
enum BlabStatus blab_sumset(const struct BlabSet *a,
                            const struct BlabSet *b,
                            bool restricted,
                            struct BlabSet **out);

// Number of pairs `(x, y)` with `x − y, x, x + y` in the set, and those with `y ≠ 0`.
//
// # Safety
// `set` must be a live handle; outputs writable.
enum BlabStatus blab_count_ap3(const struct BlabSet *set, uint64_t *total, uint64_t *nontrivial);

// `|A + A| / |A|` as a reduced fraction.
//
// # Safety
// `set` must be a live handle; outputs writable.
enum BlabStatus blab_doubling_constant(const struct BlabSet *set, uint64_t *numer, uint64_t *denom);

// Parses a system descriptor such as `bohr(g=Z16; freqs=1,5; delta=0.2)`.
//
// # Safety
// `descriptor` must be a NUL-terminated string and `out` writable.
enum BlabStatus blab_system_parse(const char *descriptor, struct BlabSystem **out);

// The set at radius `rho`.
//
// # Safety
// `system` must be a live handle and `out` writable.
enum BlabStatus blab_system_materialize(const struct BlabSystem *system,
                                        double rho,
                                        struct BlabSet **out);

// # Safety
// `system` must be a live handle and `out` writable.
enum BlabStatus blab_system_density(const struct BlabSystem *system, double *out);

// # Safety
// `system` must be a live handle and `out` writable.
enum BlabStatus blab_system_dimension(const struct BlabSystem *system, double *out);

// # Safety
// `system` must be a live handle and `out` writable.
enum BlabStatus blab_system_is_regular(const struct BlabSystem *system, bool *out);

// A regular dilate `λS` with `λ ∈ [1/2, 1)`.
//
// # Safety
// `system` must be a live handle; outputs writable.
enum BlabStatus blab_system_regular_dilate(const struct BlabSystem *system,
                                           double *lambda,
                                           struct BlabSystem **out);

// # Safety
// `system` must be null or a handle not yet freed.
void blab_system_free(struct BlabSystem *system);

// Runs the density-increment iteration and returns its text trace.
// A null `system` means the whole group. `mode` is 0 for practical
// constants and 1 for the exact ones. Release the string with
// [`blab_string_free`].
//
// # Safety
// `set` must be a live handle, `system` null or live, `out` writable.
enum BlabStatus blab_trace(const struct BlabSet *set,
                           const struct BlabSystem *system,
                           uint32_t mode,
                           size_t budget,
                           char **out);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void blab_string_free(char *s);

// Message for the most recent failure on this thread, empty after a
// success. Valid until the next call into the library on the same thread.
const char *blab_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLAB_H */
