/* Ground-truth fixture for ABI layout and call dispatch.
 *
 * Reporter functions expose the compiler's own sizeof / _Alignof /
 * offsetof values at run time, so tests never hardcode platform numbers.
 * Every callable here has a trivially mirrorable definition: no UB for
 * any input the test suite generates (signed negation is expressed as
 * bitwise NOT, unsigned arithmetic wraps by definition).
 */

#include <stddef.h>
#include <stdint.h>
#include <string.h>

#define EXPORT __attribute__((visibility("default")))

/* ---- fixture types ---- */

struct ffib_point { double x; double y; };
struct ffib_mixed { int8_t c; int32_t d; };
struct ffib_single { int8_t a; };
struct ffib_ladder { int8_t a; int8_t b; int16_t c; int32_t d; int64_t e; };
struct ffib_inner { int16_t a; int8_t b; };
struct ffib_outer { int8_t x; struct ffib_inner y; double z; };
union ffib_scalar_pair { int32_t i; float f; };
union ffib_wide_pair { int8_t b; double x; };
struct ffib_tagged { union ffib_wide_pair u; int8_t t; };
union ffib_point_or_int { struct ffib_point p; int32_t i; };
struct ffib_counted { int32_t n; double vals[3]; };
struct ffib_spread { float f; int64_t q; int16_t h; };

/* ---- layout reporters ---- */

#define SIZE_REPORTER(name, type) \
    EXPORT uint64_t ffib_sizeof_##name(void) { return sizeof(type); } \
    EXPORT uint64_t ffib_alignof_##name(void) { return _Alignof(type); }
#define OFFSET_REPORTER(name, type, field) \
    EXPORT uint64_t ffib_offsetof_##name##_##field(void) { return offsetof(type, field); }

SIZE_REPORTER(point, struct ffib_point)
OFFSET_REPORTER(point, struct ffib_point, x)
OFFSET_REPORTER(point, struct ffib_point, y)

SIZE_REPORTER(mixed, struct ffib_mixed)
OFFSET_REPORTER(mixed, struct ffib_mixed, c)
OFFSET_REPORTER(mixed, struct ffib_mixed, d)

SIZE_REPORTER(single, struct ffib_single)
OFFSET_REPORTER(single, struct ffib_single, a)

SIZE_REPORTER(ladder, struct ffib_ladder)
OFFSET_REPORTER(ladder, struct ffib_ladder, a)
OFFSET_REPORTER(ladder, struct ffib_ladder, b)
OFFSET_REPORTER(ladder, struct ffib_ladder, c)
OFFSET_REPORTER(ladder, struct ffib_ladder, d)
OFFSET_REPORTER(ladder, struct ffib_ladder, e)

SIZE_REPORTER(inner, struct ffib_inner)
OFFSET_REPORTER(inner, struct ffib_inner, a)
OFFSET_REPORTER(inner, struct ffib_inner, b)

SIZE_REPORTER(outer, struct ffib_outer)
OFFSET_REPORTER(outer, struct ffib_outer, x)
OFFSET_REPORTER(outer, struct ffib_outer, y)
OFFSET_REPORTER(outer, struct ffib_outer, z)

SIZE_REPORTER(scalar_pair, union ffib_scalar_pair)
SIZE_REPORTER(wide_pair, union ffib_wide_pair)

SIZE_REPORTER(tagged, struct ffib_tagged)
OFFSET_REPORTER(tagged, struct ffib_tagged, u)
OFFSET_REPORTER(tagged, struct ffib_tagged, t)

SIZE_REPORTER(point_or_int, union ffib_point_or_int)

SIZE_REPORTER(counted, struct ffib_counted)
OFFSET_REPORTER(counted, struct ffib_counted, n)
OFFSET_REPORTER(counted, struct ffib_counted, vals)

SIZE_REPORTER(spread, struct ffib_spread)
OFFSET_REPORTER(spread, struct ffib_spread, f)
OFFSET_REPORTER(spread, struct ffib_spread, q)
OFFSET_REPORTER(spread, struct ffib_spread, h)

/* ---- callable fixtures with pure host mirrors ---- */

EXPORT int32_t ffib_add_i32(int32_t a, int32_t b) { return (int32_t)((uint32_t)a + (uint32_t)b); }

EXPORT double ffib_sum_f64(const double *xs, int32_t len)
{
    double total = 0.0;
    for (int32_t i = 0; i < len; i++)
        total += xs[i];
    return total;
}

EXPORT void ffib_fill_seq(double *out, int32_t len)
{
    for (int32_t i = 0; i < len; i++)
        out[i] = (double)i;
}

EXPORT uint64_t ffib_strlen(const char *s) { return (uint64_t)strlen(s); }

EXPORT double ffib_point_norm2(const struct ffib_point *p)
{
    return p->x * p->x + p->y * p->y;
}

EXPORT double ffib_point_get_y(const struct ffib_point *p) { return p->y; }

EXPORT int32_t ffib_mixed_get_d(const struct ffib_mixed *m) { return m->d; }

EXPORT int8_t  ffib_not_i8(int8_t v)   { return (int8_t)~v; }
EXPORT int16_t ffib_not_i16(int16_t v) { return (int16_t)~v; }
EXPORT int32_t ffib_not_i32(int32_t v) { return (int32_t)~v; }
EXPORT int64_t ffib_not_i64(int64_t v) { return (int64_t)~v; }

EXPORT uint8_t  ffib_xor_u8(uint8_t a, uint8_t b)    { return (uint8_t)(a ^ b); }
EXPORT uint16_t ffib_xor_u16(uint16_t a, uint16_t b) { return (uint16_t)(a ^ b); }
EXPORT uint32_t ffib_xor_u32(uint32_t a, uint32_t b) { return a ^ b; }
EXPORT uint64_t ffib_xor_u64(uint64_t a, uint64_t b) { return a ^ b; }

EXPORT float  ffib_add_f32(float a, float b)   { return a + b; }
EXPORT double ffib_add_f64(double a, double b) { return a + b; }

/* ---- mutable global ---- */

EXPORT int32_t ffib_counter = 0;

EXPORT int32_t ffib_bump(void) { return ++ffib_counter; }
