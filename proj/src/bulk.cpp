#include "qpt/bulk.hpp"

#include <cmath>

#include "qpt/arith.hpp"

namespace qpt {

std::vector<uint32_t> bulk_class_numbers_imag(i64 Y) {
    std::vector<uint32_t> h(Y + 1, 0);
    // reduced forms (a,b,c): b^2 - 4ac = -t, |b| <= a <= c, b >= 0 when
    // |b| = a or a = c
    for (i64 a = 1; 3 * a * a <= Y; ++a) {
        for (i64 b = 0; b <= a; ++b) {
            if (4 * a * a - b * b > Y) continue;  // smallest t at c = a
            for (i64 c = a;; ++c) {
                i64 t = 4 * a * c - b * b;
                if (t > Y) break;
                if (b == 0 || b == a || a == c)
                    h[t] += 1;
                else
                    h[t] += 2;
            }
        }
    }
    std::vector<bool> fm = fundamental_mask(Y, -1);
    for (i64 t = 0; t <= Y; ++t)
        if (!fm[t]) h[t] = 0;
    return h;
}

std::vector<double> bulk_hr_real(i64 Y) {
    std::vector<double> hr(Y + 1, 0.0);
    std::vector<double> sq(Y + 1, 0.0);
    for (i64 t = 1; t <= Y; ++t) sq[t] = std::sqrt((double)t);
    // reduced indefinite (a,b,c), ac < 0: with A=|a|, C=|c| the reduction
    // condition is exactly b > |A - C|, and both sign patterns occur.
    // b-range at (A,C) is nonempty iff (A+C)^2 + 2|A-C| + 1 <= Y.
    for (i64 A = 1; A * A + 4 * A <= Y; ++A) {
        for (i64 C = 1; 4 * A * C < Y; ++C) {
            i64 b0 = (A > C ? A - C : C - A) + 1;
            if (b0 * b0 + 4 * A * C > Y) {
                if (C >= A) break;
                continue;
            }
            i64 bmax = isqrt64(Y - 4 * A * C);
            for (i64 b = b0; b <= bmax; ++b) {
                i64 D = b * b + 4 * A * C;
                hr[D] += 2.0 * std::log((sq[D] + (double)b) / (sq[D] - (double)b));
            }
        }
    }
    std::vector<bool> fm = fundamental_mask(Y, +1);
    for (i64 t = 0; t <= Y; ++t) hr[t] = fm[t] ? hr[t] * 0.25 : 0.0;
    return hr;
}

std::vector<double> bulk_L1(i64 Y, int sign) {
    std::vector<double> L(Y + 1, 0.0);
    if (sign < 0) {
        std::vector<uint32_t> h = bulk_class_numbers_imag(Y);
        for (i64 t = 3; t <= Y; ++t) {
            if (!h[t]) continue;
            int w = t == 3 ? 6 : (t == 4 ? 4 : 2);
            L[t] = 2.0 * M_PI * (double)h[t] / ((double)w * std::sqrt((double)t));
        }
    } else {
        std::vector<double> hr = bulk_hr_real(Y);
        for (i64 t = 5; t <= Y; ++t)
            if (hr[t] != 0.0) L[t] = 2.0 * hr[t] / std::sqrt((double)t);
    }
    return L;
}

}  // namespace qpt
