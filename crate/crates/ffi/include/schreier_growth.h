#ifndef SCHREIER_GROWTH_H
#define SCHREIER_GROWTH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes of every fallible entry point.
 */
typedef enum SgStatus {
  SgOk = 0,
  SgErrNull = 1,
  SgErrUtf8 = 2,
  SgErrInvalid = 3,
  SgErrCap = 4,
  SgErrTrivial = 5,
  SgErrBuffer = 6,
} SgStatus;

/**
 * Opaque growth table handle.
 */
typedef struct SgGrowthTable SgGrowthTable;

/**
 * A level, vertex displacement and level diameter certifying the
 * eighth-of-diameter displacement.
 */
typedef struct SgDisplacement {
  uint32_t level;
  uint32_t displacement;
  uint32_t diameter;
} SgDisplacement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sg_version(void);

/**
 * Applies a Grigorchuk word (letters `a..d`, rightmost acts first) to a
 * binary vertex, writing the image into `out`.
 *
 * # Safety
 * `word` and `point` must be valid NUL-terminated strings; `out` must have
 * room for `out_len` bytes.
 */
enum SgStatus sg_grigorchuk_act(const char *word, const char *point, char *out, uintptr_t out_len);

/**
 * Word problem: 1 if the word acts trivially, 0 if not, negative on error.
 *
 * # Safety
 * `word` must be a valid NUL-terminated string.
 */
int32_t sg_grigorchuk_is_trivial(const char *word);

/**
 * Searches levels up to `level_cap` for a displacement witness.
 *
 * # Safety
 * `word` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SgStatus sg_grigorchuk_displacement(const char *word,
                                         uint32_t level_cap,
                                         struct SgDisplacement *out);

/**
 * Exhaustive growth over the Grigorchuk level graphs up to `max_level`.
 *
 * # Safety
 * `out` must be a valid pointer; the handle must be freed with
 * [`sg_growth_table_free`].
 */
enum SgStatus sg_growth_grigorchuk(uint32_t max_level, uint32_t n_max, struct SgGrowthTable **out);

/**
 * Growth of `(Z/pZ) ≀ Z^d` on the union of the `X_m`, `m <= m_max`.
 *
 * # Safety
 * `out` must be a valid pointer; free the handle with
 * [`sg_growth_table_free`].
 */
enum SgStatus sg_growth_lamplighter(uint64_t p,
                                    uint8_t d,
                                    uint64_t m_max,
                                    uint32_t n_max,
                                    struct SgGrowthTable **out);

/**
 * Growth of `H_2` on the two-rayed star, sampled from a basepoint ladder.
 *
 * # Safety
 * `out` must be a valid pointer; free the handle with
 * [`sg_growth_table_free`].
 */
enum SgStatus sg_growth_houghton_star(uint32_t n_max, struct SgGrowthTable **out);

/**
 * Exhaustive growth of the lamplighter coset space `X_m` alone.
 *
 * # Safety
 * `out` must be a valid pointer; free the handle with
 * [`sg_growth_table_free`].
 */
enum SgStatus sg_growth_coset_space(uint64_t p,
                                    uint8_t d,
                                    uint64_t m,
                                    uint32_t n_max,
                                    struct SgGrowthTable **out);

/**
 * Largest radius the table covers; `UINT32_MAX` on a null handle.
 *
 * # Safety
 * `table` must be a live handle from this library or null.
 */
uint32_t sg_growth_table_max_radius(const struct SgGrowthTable *table);

/**
 * `vol(n)`, or 0 when `n` is out of range or the handle is null.
 *
 * # Safety
 * `table` must be a live handle from this library or null.
 */
uint64_t sg_growth_table_get(const struct SgGrowthTable *table, uint32_t n);

/**
 * Log-log slope of the table over `[lo, hi]`.
 *
 * # Safety
 * `table` must be a live handle; `slope` and `stderr_out` valid pointers.
 */
enum SgStatus sg_growth_table_fit(const struct SgGrowthTable *table,
                                  uint32_t lo,
                                  uint32_t hi,
                                  double *slope,
                                  double *stderr_out);

/**
 * CSV rendering (`n,vol` header) of the table as a freshly allocated
 * string; release it with [`sg_string_free`].
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum SgStatus sg_growth_table_csv(const struct SgGrowthTable *table, char **out);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void sg_string_free(char *s);

/**
 * Frees a growth table handle.
 *
 * # Safety
 * `table` must come from this library and not be freed twice.
 */
void sg_growth_table_free(struct SgGrowthTable *table);

/**
 * Number of distinct images of the marked pair under the `γ` products with
 * indices up to `n`; 0 on failure.
 */
uint64_t sg_houghton_pair_lower_bound(uint32_t n);

/**
 * Diameter of the lamplighter coset space `X_m`; 0 on failure.
 */
uint32_t sg_coset_space_diameter(uint64_t p, uint8_t d, uint64_t m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHREIER_GROWTH_H */
