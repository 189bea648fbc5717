#include "qpt/intx.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace qpt {

i64 isqrt64(i64 n) {
    if (n < 0) throw std::invalid_argument("isqrt64: negative");
    if (n == 0) return 0;
    i64 r = (i64)std::sqrt((double)n);
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool is_square(i64 n, i64* root) {
    if (n < 0) return false;
    i64 r = isqrt64(n);
    if (r * r == n) {
        if (root) *root = r;
        return true;
    }
    return false;
}

i64 gcd64(i64 a, i64 b) { return std::gcd(a, b); }

int valuation(i64 n, i64 p) {
    if (n == 0) throw std::invalid_argument("valuation of 0");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

static u64 mulmod_u64(u64 a, u64 b, u64 m) { return (u64)((unsigned __int128)a * b % m); }

static u64 powmod_u64(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    if (n < 1000000) {
        for (u64 d = 41; d * d <= n; d += 2)
            if (n % d == 0) return false;
        return true;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

static u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    u64 x = 2, y = 2, c = 1, d = 1;
    auto f = [&](u64 v) { return (mulmod_u64(v, v, n) + c) % n; };
    while (true) {
        x = 2, y = 2, d = 1;
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            u64 diff = x > y ? x - y : y - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
        ++c;
    }
}

static void factor_rec(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

std::vector<PrimePower> factor(i64 n) {
    if (n == 0) throw std::invalid_argument("factor(0)");
    u64 m = (u64)(n < 0 ? -n : n);
    std::vector<u64> ps;
    for (u64 d : {2ull, 3ull, 5ull}) {
        while (m % d == 0) {
            ps.push_back(d);
            m /= d;
        }
    }
    // wheel over 7,11,13,... up to 10^6, then rho
    for (u64 d = 7; d <= 1000000 && d * d <= m; d += 2) {
        while (m % d == 0) {
            ps.push_back(d);
            m /= d;
        }
    }
    if (m > 1) factor_rec(m, ps);
    std::sort(ps.begin(), ps.end());
    std::vector<PrimePower> out;
    for (u64 p : ps) {
        if (!out.empty() && out.back().p == (i64)p)
            out.back().e++;
        else
            out.push_back({(i64)p, 1});
    }
    return out;
}

i64 squarefree_core(i64 n) {
    if (n == 0) return 0;
    i64 core = n < 0 ? -1 : 1;
    for (auto& pe : factor(n))
        if (pe.e % 2) core *= pe.p;
    return core;
}

bool is_squarefree(i64 n) {
    if (n == 0) return false;
    for (auto& pe : factor(n))
        if (pe.e > 1) return false;
    return true;
}

int moebius(i64 n) {
    if (n <= 0) throw std::invalid_argument("moebius: n must be positive");
    int m = 1;
    for (auto& pe : factor(n)) {
        if (pe.e > 1) return 0;
        m = -m;
    }
    return m;
}

std::string f128_to_string(f128 x, int digits) {
    char buf[128];
    char fmt[16];
    std::snprintf(fmt, sizeof fmt, "%%.%dQe", digits);
    quadmath_snprintf(buf, sizeof buf, fmt, x);
    return buf;
}

f128 f128_from_string(const std::string& s) { return strtoflt128(s.c_str(), nullptr); }

// ---- intervals -------------------------------------------------------------

static const f128 EPS_ULP = (f128)1e-31L;

static Iv inflate(f128 mid, f128 rad) {
    return Iv(mid, rad + fabsq(mid) * EPS_ULP + (f128)1e-4930L);
}

Iv Iv::exact(const Rat& q) {
    // split to keep the conversion error tiny even for huge numerators
    f128 num = strtoflt128(q.get_num().get_str().c_str(), nullptr);
    f128 den = strtoflt128(q.get_den().get_str().c_str(), nullptr);
    return inflate(num / den, fabsq(num / den) * (f128)3e-34L);
}

Iv operator+(const Iv& a, const Iv& b) { return inflate(a.mid + b.mid, a.rad + b.rad); }
Iv operator-(const Iv& a, const Iv& b) { return inflate(a.mid - b.mid, a.rad + b.rad); }
Iv operator*(const Iv& a, const Iv& b) {
    return inflate(a.mid * b.mid, fabsq(a.mid) * b.rad + fabsq(b.mid) * a.rad + a.rad * b.rad);
}
Iv operator/(const Iv& a, const Iv& b) {
    f128 bl = fabsq(b.mid) - b.rad;
    if (bl <= 0) throw std::runtime_error("interval division straddles zero");
    f128 m = a.mid / b.mid;
    f128 r = (a.rad + fabsq(m) * b.rad) / bl;
    return inflate(m, r);
}
Iv iv_abs(const Iv& a) {
    f128 m = fabsq(a.mid);
    return Iv(m, a.rad);
}
Iv iv_max(const Iv& a, const Iv& b) {
    if (a.lo() >= b.hi()) return a;
    if (b.lo() >= a.hi()) return b;
    f128 hi = a.hi() > b.hi() ? a.hi() : b.hi();
    f128 lo = a.lo() > b.lo() ? a.lo() : b.lo();
    return Iv((hi + lo) / 2, (hi - lo) / 2);
}
Iv iv_sqrt(const Iv& a) {
    if (a.lo() < 0 && a.mid >= 0) {
        f128 hi = sqrtq(a.hi() > 0 ? a.hi() : 0);
        return Iv(hi / 2, hi / 2);
    }
    f128 m = sqrtq(a.mid);
    f128 r = a.rad / (2 * (m > 0 ? m : (f128)1e-4000L));
    return inflate(m, r);
}
Iv iv_log(const Iv& a) {
    f128 lo = a.lo();
    if (lo <= 0) throw std::runtime_error("iv_log: nonpositive");
    return inflate(logq(a.mid), a.rad / lo);
}
Iv iv_exp(const Iv& a) {
    f128 m = expq(a.mid);
    return inflate(m, m * (expq(a.rad) - 1));
}
Iv iv_pow_int(const Iv& a, int k) {
    if (k == 0) return Iv((f128)1);
    Iv r = a;
    bool inv = k < 0;
    int n = inv ? -k : k;
    Iv acc((f128)1);
    while (n) {
        if (n & 1) acc = acc * r;
        r = r * r;
        n >>= 1;
    }
    if (inv) acc = Iv((f128)1) / acc;
    return acc;
}
Iv iv_pow(const Iv& a, f128 e) { return iv_exp(Iv(e) * iv_log(a)); }
Iv iv_pi() { return Iv(M_PIq, (f128)1e-33L); }

Cmp iv_cmp(const Iv& x, const Iv& thresh, f128 slack) {
    if (x.hi() < thresh.lo() - slack) return Cmp::Below;
    if (x.lo() > thresh.hi() + slack) return Cmp::Above;
    return Cmp::Boundary;
}

}  // namespace qpt
