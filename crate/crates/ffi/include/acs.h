#ifndef ACS_H
#define ACS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Which form [`acs_evaluate`] builds.
 */
typedef enum AcsFormKind {
  /*
   `ch_p` of the first connection.
   */
  ACS_FORM_KIND_CH = 0,
  /*
   `cs_p` of the whole list.
   */
  ACS_FORM_KIND_CS = 1,
  /*
   The transgression residual of the list, identically zero when correct.
   */
  ACS_FORM_KIND_TRANSGRESSION = 2,
} AcsFormKind;

/*
 Result codes. `ACS_STATUS_OK` is zero; everything else is an error except
 `ACS_STATUS_CHECK_FAILED`, which reports a computed negative verdict.
 */
typedef enum AcsStatus {
  ACS_STATUS_OK = 0,
  ACS_STATUS_CHECK_FAILED = 1,
  ACS_STATUS_NULL_POINTER = 2,
  ACS_STATUS_INVALID_UTF8 = 3,
  ACS_STATUS_INVALID_ARGUMENT = 4,
  ACS_STATUS_SCHEMA = 5,
  ACS_STATUS_AXIOM_FAILURE = 6,
  ACS_STATUS_MATH = 7,
  ACS_STATUS_IO = 8,
  ACS_STATUS_PANIC = 9,
} AcsStatus;

/*
 A validated (or, on request, unvalidated) fixture.
 */
typedef struct AcsFixture AcsFixture;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 The message of the last failed call on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *acs_last_error(void);

/*
 Library version as a static string.
 */
const char *acs_version(void);

/*
 Parses a fixture from JSON text. With `checked` nonzero the algebroid and
 connection axioms are verified first and a violation returns
 `ACS_STATUS_AXIOM_FAILURE`.

 # Safety
 `json` must be a nul-terminated string and `out` a writable pointer.
 */
enum AcsStatus acs_fixture_from_json(const char *json, int32_t checked, struct AcsFixture **out);

/*
 Reads a fixture file.

 # Safety
 `path` must be a nul-terminated string and `out` a writable pointer.
 */
enum AcsStatus acs_fixture_load(const char *path, int32_t checked, struct AcsFixture **out);

/*
 One of the built-in fixtures (`so3`, `chart2`, ...).

 # Safety
 `name` must be a nul-terminated string and `out` a writable pointer.
 */
enum AcsStatus acs_fixture_builtin(const char *name, struct AcsFixture **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `fx` must come from one of the constructors and not be freed twice.
 */
void acs_fixture_free(struct AcsFixture *fx);

/*
 The fixture serialized back to JSON.

 # Safety
 `fx` must be a live handle and `out` a writable pointer.
 */
enum AcsStatus acs_fixture_json(const struct AcsFixture *fx, char **out);

/*
 Runs the full verification suite and writes the JSONL report to `out`.
 Returns `ACS_STATUS_CHECK_FAILED` when any check fails; the report is written
 either way.

 # Safety
 `fx` must be a live handle and `out` a writable pointer.
 */
enum AcsStatus acs_verify(const struct AcsFixture *fx,
                          uint64_t seed,
                          uint32_t samples,
                          uint32_t p_max,
                          uint32_t k_max,
                          char **out);

/*
 Betti numbers and cochain dimensions of a point fixture, as JSON.

 # Safety
 `fx` must be a live handle and `out` a writable pointer.
 */
enum AcsStatus acs_cohomology(const struct AcsFixture *fx, char **out);

/*
 Evaluates `ch_p`, `cs_p` or the transgression residual of the
 comma-separated `connections` on `count` seeded random tuples. The JSON
 result lists each tuple with its exact value. For `ACS_FORM_KIND_TRANSGRESSION`
 a nonzero residual returns `ACS_STATUS_CHECK_FAILED`.

 # Safety
 `fx` must be a live handle, `connections` a nul-terminated string and
 `out` a writable pointer.
 */
enum AcsStatus acs_evaluate(const struct AcsFixture *fx,
                            enum AcsFormKind kind,
                            const char *connections,
                            uint32_t p,
                            uint32_t count,
                            uint64_t seed,
                            char **out);

/*
 Frees a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void acs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACS_H */
