#ifndef QPT_INTX_HPP
#define QPT_INTX_HPP

// Exact integer/rational layer plus the interval scalar used for all
// real-number comparisons that gate enumeration or height tests.

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <quadmath.h>

namespace qpt {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using f128 = __float128;

using Int = mpz_class;
using Rat = mpq_class;

inline Rat rat(i64 num, i64 den = 1) {
    Rat r{Int(num), Int(den)};
    r.canonicalize();
    return r;
}

i64 isqrt64(i64 n);            // floor(sqrt(n)), n >= 0
bool is_square(i64 n, i64* root = nullptr);
i64 gcd64(i64 a, i64 b);
int valuation(i64 n, i64 p);

// Deterministic primality: trial division below 10^6, Miller-Rabin with the
// 12 fixed 64-bit witnesses above.
bool is_prime(u64 n);

struct PrimePower {
    i64 p;
    int e;
};
// Trial division + Pollard rho fallback; sorted by p.
std::vector<PrimePower> factor(i64 n);
i64 squarefree_core(i64 n);    // n / (largest square divisor), sign kept
bool is_squarefree(i64 n);
int moebius(i64 n);

std::string f128_to_string(f128 x, int digits = 30);
f128 f128_from_string(const std::string& s);

// Directed-rounding-free interval: mid +/- rad with conservative inflation
// per operation.  Enough for boundary-slack protocols; not a replacement for
// exact arithmetic where the spec demands exactness.
struct Iv {
    f128 mid = 0;
    f128 rad = 0;

    Iv() = default;
    Iv(f128 m) : mid(m), rad(0) {}
    Iv(f128 m, f128 r) : mid(m), rad(r) {}
    static Iv exact(const Rat& q);
    static Iv from_double(double d) { return Iv((f128)d); }

    f128 lo() const { return mid - rad; }
    f128 hi() const { return mid + rad; }
    double mid_d() const { return (double)mid; }

    bool certainly_lt(const Iv& o) const { return hi() < o.lo(); }
    bool certainly_gt(const Iv& o) const { return lo() > o.hi(); }
    // overlap within +/- slack of the other interval
    bool within(const Iv& o, f128 slack) const {
        return fabsq(mid - o.mid) <= rad + o.rad + slack;
    }
};

Iv operator+(const Iv& a, const Iv& b);
Iv operator-(const Iv& a, const Iv& b);
Iv operator*(const Iv& a, const Iv& b);
Iv operator/(const Iv& a, const Iv& b);
Iv iv_abs(const Iv& a);
Iv iv_max(const Iv& a, const Iv& b);
Iv iv_sqrt(const Iv& a);
Iv iv_log(const Iv& a);
Iv iv_exp(const Iv& a);
Iv iv_pow_int(const Iv& a, int k);
Iv iv_pow(const Iv& a, f128 e);      // a > 0
Iv iv_pi();

// tri-state comparison against a threshold with declared slack
enum class Cmp { Below, Above, Boundary };
Cmp iv_cmp(const Iv& x, const Iv& thresh, f128 slack);

}  // namespace qpt

#endif
