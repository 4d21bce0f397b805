#ifndef WBK_H
#define WBK_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Pass as `n` to request a result in ℚ(n) rather than at a fixed rank.
#define WBK_RANK_GENERIC 0

typedef enum WbkFormat {
  WBK_FORMAT_JSON = 0,
  WBK_FORMAT_LATEX = 1,
  WBK_FORMAT_MARKDOWN = 2,
} WbkFormat;

typedef enum WbkStatus {
  WBK_STATUS_OK = 0,
  // A verification ran and at least one check failed.
  WBK_STATUS_VERIFY_FAILED = 1,
  // Malformed argument: bad name, range or UTF-8.
  WBK_STATUS_INVALID_ARGUMENT = 2,
  // The computation itself failed (rank out of range, inconsistent data).
  WBK_STATUS_DOMAIN = 3,
  WBK_STATUS_NULL_POINTER = 4,
  WBK_STATUS_PANIC = 5,
} WbkStatus;

// Opaque identity database.
typedef struct WbkDatabase WbkDatabase;

// Opaque verification report.
typedef struct WbkReport WbkReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next failing call on the same thread; do not free.
const char *wbk_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void wbk_string_free(char *s);

// # Safety
// `out` must be valid for writes.
enum WbkStatus wbk_database_builtin(struct WbkDatabase **out);

// Loads a database from its JSON text.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be valid for writes.
enum WbkStatus wbk_database_from_json(const char *json, struct WbkDatabase **out);

// # Safety
// `db` must be null or a handle from this library, not yet freed.
void wbk_database_free(struct WbkDatabase *db);

// Number of identities, or 0 for a null handle.
//
// # Safety
// `db` must be null or a live handle.
size_t wbk_database_len(const struct WbkDatabase *db);

// Dimension of a bundle given by alias or `Sym^k H * R`, as a decimal
// string at rank `n`, or as a polynomial in `n` for [`WBK_RANK_GENERIC`].
//
// # Safety
// `bundle` must be a nul-terminated string; `out` must be valid for writes.
enum WbkStatus wbk_bundle_dim(const char *bundle, int64_t n, char **out);

// Minimal eigenvalue of `Δ` on `Sym^k H Λ^{a,b}_0 E` as a multiple of
// `scal`, e.g. `(n+1)/(2*n*(n+2))`.
//
// # Safety
// `out` must be valid for writes.
enum WbkStatus wbk_minimal_eigenvalue(uint32_t k, uint32_t a, uint32_t b, int64_t n, char **out);

// Re-derives identity `id` and returns its coefficient listing.
//
// # Safety
// `db` must be a live handle, `id` a nul-terminated string, `out` valid for
// writes.
enum WbkStatus wbk_derive(const struct WbkDatabase *db, const char *id, int64_t n, char **out);

// Verifies the identities `ids[0..len]` (every identity when `len` is 0)
// over `n_lo..=n_hi`. The report is produced even when checks fail, in
// which case the status is [`WbkStatus::VerifyFailed`].
//
// # Safety
// `db` must be a live handle; `ids` must point to `len` nul-terminated
// strings (it may be null when `len` is 0); `out` must be valid for writes.
enum WbkStatus wbk_verify(const struct WbkDatabase *db,
                          const char *const *ids,
                          size_t len,
                          int64_t n_lo,
                          int64_t n_hi,
                          struct WbkReport **out);

// # Safety
// `report` must be null or a handle from this library, not yet freed.
void wbk_report_free(struct WbkReport *report);

// Number of identity checks in the report, or 0 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
size_t wbk_report_len(const struct WbkReport *report);

// # Safety
// `report` must be null or a live handle.
bool wbk_report_all_pass(const struct WbkReport *report);

// # Safety
// `report` must be a live handle; `out` must be valid for writes.
enum WbkStatus wbk_report_render(const struct WbkReport *report, enum WbkFormat format, char **out);

// Stability verdict for spectral input given as JSON; the result is JSON
// with a `report` object and, when computable, `index_i1`.
//
// # Safety
// `input` must be a nul-terminated string; `out` must be valid for writes.
enum WbkStatus wbk_classify(const char *input, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WBK_H */
