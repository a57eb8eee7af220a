#ifndef EMTOR_H
#define EMTOR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EmtorStatus {
  EMTOR_STATUS_OK = 0,
  EMTOR_STATUS_NULL_POINTER = 1,
  EMTOR_STATUS_INVALID_UTF8 = 2,
  EMTOR_STATUS_INVALID_INPUT = 3,
  EMTOR_STATUS_COMPUTE_FAILED = 4,
  EMTOR_STATUS_PANIC = 5,
} EmtorStatus;

// A rational fan.
typedef struct EmtorFan EmtorFan;

// A validated graded module over a polynomial ring.
typedef struct EmtorModule EmtorModule;

// A bigraded Tor table.
typedef struct EmtorTor EmtorTor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call on this thread.
const char *emtor_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void emtor_string_free(char *s);

// Parses and validates a module from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string and `out_module` a valid pointer.
enum EmtorStatus emtor_module_from_json(const char *json, struct EmtorModule **out_module);

// # Safety
// `m` must be null or a handle from [`emtor_module_from_json`] not yet freed.
void emtor_module_free(struct EmtorModule *m);

// Tor of the module against Q through degree `bound`, by the Koszul complex.
//
// # Safety
// `m` must be a live module handle and `out_tor` a valid pointer.
enum EmtorStatus emtor_koszul_tor(const struct EmtorModule *m,
                                  uintptr_t bound,
                                  struct EmtorTor **out_tor);

// # Safety
// `t` must be null or a live Tor handle.
void emtor_tor_free(struct EmtorTor *t);

// Dimension of Tor in homological degree `p` and internal degree `q`.
//
// # Safety
// `t` must be a live Tor handle and `out_dim` a valid pointer.
enum EmtorStatus emtor_tor_dim(const struct EmtorTor *t,
                               uintptr_t p,
                               uintptr_t q,
                               uintptr_t *out_dim);

// Largest internal degree up to which the table is exact.
//
// # Safety
// `t` must be a live Tor handle and `out_q` a valid pointer.
enum EmtorStatus emtor_tor_trusted_q(const struct EmtorTor *t, uintptr_t *out_q);

// JSON form of the table; release with [`emtor_string_free`].
//
// # Safety
// `t` must be a live Tor handle and `out_json` a valid pointer.
enum EmtorStatus emtor_tor_to_json(const struct EmtorTor *t, char **out_json);

// Parses a single fan (not a family) from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string and `out_fan` a valid pointer.
enum EmtorStatus emtor_fan_from_json(const char *json, struct EmtorFan **out_fan);

// # Safety
// `f` must be null or a live fan handle.
void emtor_fan_free(struct EmtorFan *f);

// # Safety
// `f` must be a live fan handle and `out_smooth` a valid pointer.
enum EmtorStatus emtor_fan_is_smooth(const struct EmtorFan *f, bool *out_smooth);

// Weighted cohomology of the toric variety through degree `bound`, as JSON.
//
// # Safety
// `f` must be a live fan handle and `out_json` a valid pointer.
enum EmtorStatus emtor_toric_cohomology_json(const struct EmtorFan *f,
                                             uintptr_t bound,
                                             char **out_json);

// Weighted cohomology of a catalog group such as `SL:3`, as JSON.
//
// # Safety
// `spec` must be a NUL-terminated string and `out_json` a valid pointer.
enum EmtorStatus emtor_group_cohomology_json(const char *spec, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EMTOR_H */
