#include "qpt/quadfield.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <mpfr.h>

namespace qpt {

LocalClass local_class(i64 D, i64 v) {
    LocalClass lc;
    if (v == 0) {  // infinity: R x R vs C
        lc.kind = D > 0 ? LocalClass::Split : LocalClass::Inert;
        lc.cls = 0;
        lc.delta = rat(1, 2);
        return lc;
    }
    i64 p = v;
    if (p != 2) {
        int chi = kronecker(D, p);
        if (chi == 1) {
            lc.kind = LocalClass::Split;
            lc.delta = rat(1, 2);
        } else if (chi == -1) {
            lc.kind = LocalClass::Inert;
            lc.delta = rat(1, 2);
        } else {
            lc.kind = LocalClass::Ramified;
            // two ramified classes Q_p(sqrt(p u)): split by QR-ness of u
            i64 u = D / p;
            lc.cls = kronecker(u % p, p) == 1 ? 0 : 1;
            lc.delta = rat(1, 2 * p);
        }
        return lc;
    }
    // p = 2.  Odd discriminants are unramified; even ones fall into the six
    // wildly ramified square classes of Q_2^x.
    if (D % 2 != 0) {
        i64 m8 = ((D % 8) + 8) % 8;
        lc.kind = m8 == 1 ? LocalClass::Split : LocalClass::Inert;
        lc.delta = rat(1, 2);
        return lc;
    }
    lc.kind = LocalClass::Ramified;
    i64 m = D / 4;
    if (((m % 2) + 2) % 2 == 1) {
        i64 m8 = ((m % 8) + 8) % 8;       // 3 or 7
        lc.cls = m8 == 3 ? 1 : 2;
        lc.delta = rat(1, 8);             // |Delta_2|_2 = 1/4
    } else {
        i64 mm8 = (((m / 2) % 8) + 8) % 8;  // 1,3,5,7
        lc.cls = 3 + (int)((mm8 - 1) / 2);
        lc.delta = rat(1, 16);            // |Delta_2|_2 = 1/8
    }
    return lc;
}

// non-member hook used by arith.cpp
LocalClass local_class_of(i64 D, i64 v) { return local_class(D, v); }

Int class_number_imaginary(i64 D) {
    if (D >= 0 || !is_fundamental_disc(D)) throw std::invalid_argument("need fundamental D < 0");
    i64 absD = -D;
    Int h = 0;
    for (i64 a = 1; 3 * a * a <= absD; ++a) {
        // b == D (mod 2), 0 <= b <= a; signed duplicates counted explicitly
        for (i64 b = (D % 2 == 0) ? 0 : 1; b <= a; b += 2) {
            i64 num = b * b - D;  // = 4ac
            if (num % (4 * a) != 0) continue;
            i64 c = num / (4 * a);
            if (c < a) continue;
            if (b == 0 || b == a || a == c)
                h += 1;           // only b >= 0 representative
            else
                h += 2;           // +-b
        }
    }
    return h;
}

Iv real_hr_identity(i64 D) {
    if (D <= 0 || !is_fundamental_disc(D)) throw std::invalid_argument("need fundamental D > 0");
    Iv sum((f128)0);
    f128 sq = sqrtq((f128)D);
    for (i64 A = 1; 4 * A <= D - 1; ++A) {
        for (i64 C = A; 4 * A * C <= D - 1; ++C) {
            i64 rest = D - 4 * A * C;
            i64 b0 = (A > C ? A - C : C - A) + 1;
            if ((b0 & 1) != (D & 1)) ++b0;
            for (i64 b = b0; b * b <= rest; b += 2) {
                if (b * b + 4 * A * C != D) continue;
                f128 term = logq((sq + (f128)b) / (sq - (f128)b));
                int mult = (A == C) ? 2 : 4;  // (A,C) vs (C,A), a = +-
                sum = sum + Iv(term * mult, term * mult * (f128)1e-31L);
            }
        }
    }
    return sum * Iv((f128)0.25L);
}

namespace {

struct MpfrReal {
    mpfr_t x;
    MpfrReal(mpfr_prec_t prec = 256) { mpfr_init2(x, prec); }
    ~MpfrReal() { mpfr_clear(x); }
};

Iv mpfr_to_iv(mpfr_t x) {
    // extract ~36 digits as two long double chunks
    long double hi = mpfr_get_ld(x, MPFR_RNDN);
    MpfrReal t;
    mpfr_set_ld(t.x, hi, MPFR_RNDN);
    mpfr_sub(t.x, x, t.x, MPFR_RNDN);
    long double lo = mpfr_get_ld(t.x, MPFR_RNDN);
    f128 m = (f128)hi + (f128)lo;
    return Iv(m, fabsq(m) * (f128)1e-31L + (f128)1e-60L);
}

// log((x + y sqrt(D))/2) at 256-bit precision
Iv log_unit(const Int& x, const Int& y, i64 D) {
    MpfrReal s, t, u;
    mpfr_set_si(s.x, D, MPFR_RNDN);
    mpfr_sqrt(s.x, s.x, MPFR_RNDN);
    mpfr_set_z(t.x, y.get_mpz_t(), MPFR_RNDN);
    mpfr_mul(t.x, t.x, s.x, MPFR_RNDN);
    mpfr_set_z(u.x, x.get_mpz_t(), MPFR_RNDN);
    mpfr_add(t.x, t.x, u.x, MPFR_RNDN);
    mpfr_div_ui(t.x, t.x, 2, MPFR_RNDN);
    mpfr_log(t.x, t.x, MPFR_RNDN);
    return mpfr_to_iv(t.x);
}

}  // namespace

QuadField fundamental_unit(i64 D) {
    if (D <= 0 || !is_fundamental_disc(D)) throw std::invalid_argument("need fundamental D > 0");
    QuadField qf;
    qf.disc = FundDisc{D};
    // continued fraction of (b + sqrt(D))/2, b = D mod 2; the matrix product
    // over the first recurring cycle of states (P,Q) is the automorph, whose
    // lower row evaluates to the fundamental unit.
    i64 s = isqrt64(D);
    i64 b = D % 2;
    i64 P = b, Q = 2;
    std::map<std::pair<i64, i64>, int> seen;
    std::vector<std::pair<i64, i64>> states;
    std::vector<i64> quots;
    int start = -1;
    for (int i = 0;; ++i) {
        auto key = std::make_pair(P, Q);
        auto it = seen.find(key);
        if (it != seen.end()) {
            start = it->second;
            break;
        }
        seen[key] = i;
        states.push_back(key);
        i64 a = (P + s) / Q;  // Q > 0 throughout for this expansion
        quots.push_back(a);
        i64 Pn = a * Q - P;
        i64 Qn = (D - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
        if (i > 4 * (int)std::sqrt((double)D) + 64) throw std::runtime_error("CF period overflow");
    }
    // automorph over the cycle start .. end-1
    Int m11 = 1, m12 = 0, m21 = 0, m22 = 1;
    for (size_t i = start; i < quots.size(); ++i) {
        Int a = quots[i];
        Int n11 = a * m11 + m21, n12 = a * m12 + m22;
        m21 = m11;
        m22 = m12;
        m11 = n11;
        m12 = n12;
    }
    auto [Pk, Qk] = states[start];
    // automorph: alpha = (m11 alpha + m21)/(m12 alpha + m22); the unit is the
    // denominator evaluated at alpha_k = (Pk + sqrt(D))/Qk
    Int num_rat = m12 * Pk + m22 * Qk;  // rational part * Qk
    Int num_irr = m12;                  // sqrt(D) part * Qk
    // represent as (x + y sqrt(D))/2: x = 2*num_rat/Qk, y = 2*num_irr/Qk
    Int x2 = 2 * num_rat, y2 = 2 * num_irr;
    if (x2 % Qk != 0 || y2 % Qk != 0) throw std::runtime_error("unit not in the order");
    qf.fu_x = x2 / Qk;
    qf.fu_y = y2 / Qk;
    Int norm4 = qf.fu_x * qf.fu_x - D * qf.fu_y * qf.fu_y;
    if (norm4 != 4 && norm4 != -4) throw std::runtime_error("automorph is not a unit");
    qf.fu_norm = norm4 == 4 ? 1 : -1;
    qf.reg = log_unit(qf.fu_x, qf.fu_y, D);
    qf.w = 2;
    return qf;
}

// character sum with the certified PV tail  |sum_{n>N} chi(n)/n^s| bound
static Iv l_chi_series(i64 D, int s, double eps) {
    i64 q = D < 0 ? -D : D;
    double A = std::sqrt((double)q) * std::log((double)q);
    if (A < 1) A = 1;
    i64 N;
    if (s == 1)
        N = (i64)(2 * A / (eps * 0.5)) + 10;
    else
        N = (i64)std::sqrt(2 * A / (eps * 0.5)) + 10;  // Abel: tail <= 2A/(N+1)^2
    if (N > (i64)2e9) throw std::runtime_error("l_chi_series: series infeasible at this eps");
    // chi is completely multiplicative: chi[n] = chi[n/p] * chi[p]
    std::vector<int32_t> spf = spf_sieve(N);
    std::vector<signed char> chi(N + 1, 0);
    chi[1] = 1;
    long double sum = 1.0L;
    for (i64 n = 2; n <= N; ++n) {
        i64 p = spf[n];
        chi[n] = (n == p) ? (signed char)kronecker(D, p) : (signed char)(chi[n / p] * chi[p]);
        if (chi[n] != 0) {
            long double t = (long double)chi[n] / (s == 1 ? (long double)n : (long double)n * n);
            sum += t;
        }
    }
    double tail = s == 1 ? 2 * A / (double)(N + 1) : 2 * A / ((double)(N + 1) * (N + 1));
    double rnderr = (double)N * 1e-18;
    return Iv((f128)sum, (f128)(tail + rnderr));
}

// closed forms through exact class data (used below the series threshold)
static Iv l_chi_closed(i64 D) {
    if (D < 0) {
        Int h = class_number_imaginary(D);
        int w = D == -3 ? 6 : (D == -4 ? 4 : 2);
        Iv pi = iv_pi();
        return Iv((f128)2) * pi * Iv::exact(Rat(h)) / (Iv((f128)w) * iv_sqrt(Iv((f128)(-D))));
    }
    QuadField u = fundamental_unit(D);
    Iv hr = real_hr_identity(D);  // = h * reg
    return Iv((f128)2) * hr / iv_sqrt(Iv((f128)D));
}

Iv l_chi(i64 D, int s, double eps) {
    if (!is_fundamental_disc(D)) throw std::invalid_argument("l_chi: not fundamental");
    if (s != 1 && s != 2) throw std::invalid_argument("l_chi: s must be 1 or 2");
    if (s == 1) {
        i64 q = D < 0 ? -D : D;
        double A = std::sqrt((double)q) * std::log((double)q);
        if (2 * A / (eps * 0.5) > 2e7) return l_chi_closed(D);
        return l_chi_series(D, 1, eps);
    }
    return l_chi_series(D, 2, eps);
}

QuadField build_quadfield(i64 D) {
    if (!is_fundamental_disc(D)) throw std::invalid_argument("not a fundamental discriminant");
    if (D < 0) {
        QuadField qf;
        qf.disc = FundDisc{D};
        qf.h = class_number_imaginary(D);
        qf.w = D == -3 ? 6 : (D == -4 ? 4 : 2);
        qf.reg = Iv((f128)0);
        Iv pi = iv_pi();
        qf.L1 = Iv((f128)2) * pi * Iv::exact(Rat(qf.h)) / (Iv((f128)qf.w) * iv_sqrt(Iv((f128)(-D))));
        return qf;
    }
    QuadField qf = fundamental_unit(D);
    // analytic class number: h = sqrt(D) L(1,chi) / (2 reg), certified isolation
    double gap = 2.0 * (double)qf.reg.mid / std::sqrt((double)D);
    Iv L = l_chi(D, 1, gap / 4);
    Iv h_iv = iv_sqrt(Iv((f128)D)) * L / (Iv((f128)2) * qf.reg);
    long long hr = llroundq(h_iv.mid);
    if (!(fabsq(h_iv.mid - (f128)hr) + h_iv.rad < (f128)0.375L) || hr < 1)
        throw std::runtime_error("class number not isolated at certified precision");
    qf.h = (long)hr;
    qf.L1 = Iv((f128)2) * Iv::exact(Rat(qf.h)) * qf.reg / iv_sqrt(Iv((f128)D));
    return qf;
}

// ---- cache ------------------------------------------------------------------

namespace {
std::map<i64, QuadField> g_cache;
std::mutex g_cache_mu;
}  // namespace

const QuadField& quadfield(i64 D) {
    std::lock_guard<std::mutex> lock(g_cache_mu);
    auto it = g_cache.find(D);
    if (it != g_cache.end()) return it->second;
    QuadField qf = build_quadfield(D);
    return g_cache.emplace(D, std::move(qf)).first->second;
}

void quadfield_cache_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    std::lock_guard<std::mutex> lock(g_cache_mu);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'd') continue;  // header
        std::istringstream ss(line);
        std::string tok;
        QuadField qf;
        std::getline(ss, tok, ',');
        qf.disc.value = std::stoll(tok);
        std::getline(ss, tok, ',');
        qf.h = Int(tok);
        std::getline(ss, tok, ',');
        qf.reg = Iv(f128_from_string(tok), (f128)1e-25L);
        std::getline(ss, tok, ',');
        qf.w = std::stoi(tok);
        std::getline(ss, tok, ',');
        qf.L1 = Iv(f128_from_string(tok), (f128)1e-25L);
        if (qf.disc.value > 0) {
            QuadField u = fundamental_unit(qf.disc.value);
            qf.fu_x = u.fu_x;
            qf.fu_y = u.fu_y;
            qf.fu_norm = u.fu_norm;
        }
        g_cache.emplace(qf.disc.value, std::move(qf));
    }
}

void quadfield_cache_save(const std::string& path) {
    std::ofstream out(path);
    out << "disc,h,reg,w,L1\n";
    std::lock_guard<std::mutex> lock(g_cache_mu);
    for (auto& [d, qf] : g_cache) {
        out << d << ',' << qf.h.get_str() << ',' << f128_to_string(qf.reg.mid, 30) << ',' << qf.w
            << ',' << f128_to_string(qf.L1.mid, 30) << '\n';
    }
}

}  // namespace qpt
