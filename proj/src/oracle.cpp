#include "qpt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace qpt {

namespace {

// ---- mod-p structural prefilter -------------------------------------------------
//
// For p coprime to 2 d Delta and not dividing disc(f), the factorization type
// of an irreducible V4-quartic f with splitting field M mod p is forced by
// the Frobenius: four linears when p splits completely in M, two distinct
// irreducible quadratics otherwise.  The table marks every coefficient tuple
// mod p that is consistent with this (tuples with leading coefficient 0 or
// repeated factors are allowed unconditionally to stay sound).

struct PTable {
    i64 p;
    std::vector<bool> allow;  // index ((((a4*p+a3)*p+a2)*p+a1)*p+a0)
    double fraction;
};

void mark(std::vector<bool>& allow, i64 p, i64 a4, i64 a3, i64 a2, i64 a1, i64 a0) {
    allow[((((a4 * p + a3) * p + a2) * p + a1) * p + a0)] = true;
}

// coefficients of a4 * (monic poly given by coeff vector), reduced mod p
void mark_scaled(std::vector<bool>& allow, i64 p, const std::array<i64, 5>& monic) {
    for (i64 a4 = 1; a4 < p; ++a4)
        mark(allow, p, (a4 * monic[4]) % p, (a4 * monic[3]) % p, (a4 * monic[2]) % p,
             (a4 * monic[1]) % p, (a4 * monic[0]) % p);
}

std::array<i64, 5> mul_quads(i64 p, i64 u1, i64 v1, i64 u2, i64 v2) {
    // (x^2 + u1 x + v1)(x^2 + u2 x + v2) mod p
    std::array<i64, 5> c{};
    c[4] = 1;
    c[3] = (u1 + u2) % p;
    c[2] = (v1 + v2 + u1 * u2) % p;
    c[1] = (u1 * v2 + u2 * v1) % p;
    c[0] = (v1 * v2) % p;
    return c;
}

PTable build_table(i64 p, bool split_type) {
    PTable T;
    T.p = p;
    T.allow.assign((size_t)(p * p * p * p * p), false);
    // leading coefficient 0 mod p: always allowed
    for (i64 a3 = 0; a3 < p; ++a3)
        for (i64 a2 = 0; a2 < p; ++a2)
            for (i64 a1 = 0; a1 < p; ++a1)
                for (i64 a0 = 0; a0 < p; ++a0) mark(T.allow, p, 0, a3, a2, a1, a0);
    // repeated factor (disc = 0 mod p): (x - r)^2 * arbitrary quadratic
    for (i64 r = 0; r < p; ++r)
        for (i64 u = 0; u < p; ++u)
            for (i64 v = 0; v < p; ++v) {
                i64 s = (2 * r) % p, q = (r * r) % p;
                // (x^2 - s x + q)(x^2 + u x + v), with -s mod p
                mark_scaled(T.allow, p, mul_quads(p, (p - s) % p, q, u, v));
            }
    // (irreducible quadratic)^2 also has disc = 0
    for (i64 u = 0; u < p; ++u)
        for (i64 v = 0; v < p; ++v) {
            i64 disc = ((u * u - 4 * v) % p + p) % p;
            if (kronecker(disc, p) == -1) mark_scaled(T.allow, p, mul_quads(p, u, v, u, v));
        }
    if (split_type) {
        // four linear factors
        for (i64 r1 = 0; r1 < p; ++r1)
            for (i64 r2 = r1; r2 < p; ++r2)
                for (i64 r3 = r2; r3 < p; ++r3)
                    for (i64 r4 = r3; r4 < p; ++r4) {
                        std::array<i64, 5> c{};
                        c[4] = 1;
                        i64 e1 = (r1 + r2 + r3 + r4) % p;
                        i64 e2 = (r1 * r2 + r1 * r3 + r1 * r4 + r2 * r3 + r2 * r4 + r3 * r4) % p;
                        i64 e3 = (r1 * r2 * r3 + r1 * r2 * r4 + r1 * r3 * r4 + r2 * r3 * r4) % p;
                        i64 e4 = (((r1 * r2) % p) * ((r3 * r4) % p)) % p;
                        c[3] = (p - e1 % p) % p;
                        c[2] = ((e2 % p) + p) % p;
                        c[1] = (p - e3 % p) % p;
                        c[0] = ((e4 % p) + p) % p;
                        mark_scaled(T.allow, p, c);
                    }
    } else {
        // two distinct irreducible quadratics
        std::vector<std::pair<i64, i64>> irr;
        for (i64 u = 0; u < p; ++u)
            for (i64 v = 0; v < p; ++v) {
                i64 disc = ((u * u - 4 * v) % p + p) % p;
                if (kronecker(disc, p) == -1) irr.push_back({u, v});
            }
        for (size_t i = 0; i < irr.size(); ++i)
            for (size_t j = i + 1; j < irr.size(); ++j)
                mark_scaled(T.allow, p,
                            mul_quads(p, irr[i].first, irr[i].second, irr[j].first, irr[j].second));
    }
    i64 cnt = 0;
    for (bool b : T.allow) cnt += b;
    T.fraction = (double)cnt / (double)T.allow.size();
    return T;
}

// ---- exact helpers ---------------------------------------------------------------

bool is_square_i128(i128 n, i128* root = nullptr) {
    if (n < 0) return false;
    auto r = (i128)std::sqrt((double)n);
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    if (r * r == n) {
        if (root) *root = r;
        return true;
    }
    return false;
}

i128 disc_quartic(i64 a, i64 b, i64 c, i64 d, i64 e) {
    auto A = (i128)a, B = (i128)b, C = (i128)c, D = (i128)d, E = (i128)e;
    return 256 * A * A * A * E * E * E - 192 * A * A * B * D * E * E -
           128 * A * A * C * C * E * E + 144 * A * A * C * D * D * E - 27 * A * A * D * D * D * D +
           144 * A * B * B * C * E * E - 6 * A * B * B * D * D * E - 80 * A * B * C * C * D * E +
           18 * A * B * C * D * D * D + 16 * A * C * C * C * C * E - 4 * A * C * C * C * D * D -
           27 * B * B * B * B * E * E + 18 * B * B * B * C * D * E - 4 * B * B * B * D * D * D -
           4 * B * B * C * C * C * E + B * B * C * C * D * D;
}

// integer roots of the monic cubic y^3 + c2 y^2 + c1 y + c0 (all three must
// be integral for acceptance); numeric localization + exact verification
bool cubic_integer_roots(i128 c2, i128 c1, i128 c0, i64 out[3]) {
    double p2 = (double)c2, p1 = (double)c1, p0 = (double)c0;
    // depressed cubic t^3 + pt + q, y = t - p2/3
    double sh = p2 / 3.0;
    double P = p1 - p2 * p2 / 3.0;
    double Q = p0 - p1 * p2 / 3.0 + 2.0 * p2 * p2 * p2 / 27.0;
    double disc = -4 * P * P * P - 27 * Q * Q;
    double roots[3];
    int nr = 0;
    if (disc >= -1e-6 * (std::abs(P * P * P) + Q * Q + 1)) {
        double m = 2 * std::sqrt(std::max(0.0, -P / 3));
        double arg = (m < 1e-300) ? 0.0 : std::clamp(3 * Q / (P * m), -1.0, 1.0);
        double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) roots[nr++] = m * std::cos(theta - 2 * M_PI * k / 3) - sh;
    } else {
        return false;  // one real root only: cannot have 3 integer roots
    }
    auto eval = [&](i128 y) { return ((y + c2) * y + c1) * y + c0; };
    int found = 0;
    i64 got[3];
    for (int k = 0; k < nr; ++k) {
        i64 base = (i64)std::llround(roots[k]);
        bool ok = false;
        for (i64 cand = base - 2; cand <= base + 2 && !ok; ++cand) {
            if (eval(cand) == 0) {
                bool dup = false;
                for (int t = 0; t < found; ++t)
                    if (got[t] == cand) dup = true;
                if (!dup) {
                    got[found++] = cand;
                    ok = true;
                }
            }
        }
        if (!ok) return false;
    }
    if (found != 3) return false;
    for (int t = 0; t < 3; ++t) out[t] = got[t];
    return true;
}

double mahler_quartic(i64 a4, const i128 S[3], double e0_scaled, int orbit, double p3d,
                      double p2d, double p1d, double p0d) {
    // roots of the monic integer model: e0 + (s1 sqrt(S1) + s2 sqrt(S2) +
    // orbit*s1*s2 sqrt(S3))/4, then divided by a4 for the original f
    std::complex<double> sq[3];
    for (int i = 0; i < 3; ++i) {
        double v = (double)S[i];
        sq[i] = v >= 0 ? std::complex<double>(std::sqrt(v), 0)
                       : std::complex<double>(0, std::sqrt(-v));
    }
    double best_resid = 1e300;
    double best_mahler = 0;
    for (int orb : {1, -1}) {
        if (orbit != 0 && orb != orbit) continue;
        double resid = 0, mah = std::abs((double)a4);
        for (int s1 : {1, -1})
            for (int s2 : {1, -1}) {
                std::complex<double> root =
                    e0_scaled + ((double)s1 * sq[0] + (double)s2 * sq[1] +
                                 (double)(orb * s1 * s2) * sq[2]) /
                                    4.0;
                // residual of the monic model g = x^4 + p3 x^3 + ...
                std::complex<double> g =
                    (((root + p3d) * root + p2d) * root + p1d) * root + p0d;
                resid += std::abs(g);
                mah *= std::max(1.0, std::abs(root) / (double)a4);
            }
        if (resid < best_resid) {
            best_resid = resid;
            best_mahler = mah;
        }
    }
    return best_mahler;
}

}  // namespace

i64 OracleResult::count_at(double Y, i64* boundary, double slack) const {
    i64 c = 0, b = 0;
    for (const OraclePoint& P : polys) {
        double cut = std::pow(Y, (double)P.degree);
        if (std::abs(P.mahler - cut) <= slack * cut) {
            ++b;
            continue;
        }
        if (P.mahler < cut) c += P.degree;
    }
    if (boundary) *boundary = b;
    return c;
}

OracleResult oracle_enumerate(i64 d, i64 delta, double Ymax) {
    OracleResult R;
    i64 core_d = squarefree_core(d);
    i64 core_D = squarefree_core(delta);
    i64 core_dD = squarefree_core(core_d * core_D);
    if (core_d == core_D) throw std::invalid_argument("oracle: fields coincide");

    // ---- degree 2: minimal polynomials generating K or Q(sqrt d Delta) ----
    {
        double B2 = std::pow(Ymax, 2.0) * (1 + 1e-9);
        i64 Amax = (i64)B2;
        for (i64 A = 1; A <= Amax; ++A)
            for (i64 B = -(i64)(2 * B2); B <= (i64)(2 * B2); ++B)
                for (i64 C = -Amax; C <= Amax; ++C) {
                    if (C == 0) continue;  // root 0: reducible
                    if (gcd64(gcd64(A, std::abs(B)), std::abs(C)) != 1) continue;
                    i64 disc = B * B - 4 * A * C;
                    if (disc == 0 || is_square(disc)) continue;  // reducible or square
                    i64 core = squarefree_core(disc);
                    if (core != core_D && core != core_dD) continue;
                    // Mahler: A * prod max(1, |root|)
                    double m;
                    if (disc < 0) {
                        double mod2 = (double)C / (double)A;  // |root|^2 = C/A
                        m = (double)A * std::max(1.0, mod2);
                    } else {
                        double sq = std::sqrt((double)disc);
                        double r1 = (-(double)B + sq) / (2 * A), r2 = (-(double)B - sq) / (2 * A);
                        m = (double)A * std::max(1.0, std::abs(r1)) * std::max(1.0, std::abs(r2));
                    }
                    if (m > B2 * (1 + 1e-6)) continue;
                    R.polys.push_back({2, m, false});
                }
    }

    // ---- degree 4: V4 quartics with splitting field M ----
    double B4d = std::pow(Ymax, 4.0) * (1 + 1e-9);
    i64 B4 = (i64)B4d;
    // structural tables at up to 3 usable primes
    std::vector<PTable> tables;
    for (i64 p : {23, 19, 17, 13, 11, 7, 5, 3}) {
        if ((2 * core_d * core_D) % p == 0) continue;
        bool split = kronecker(disc_of_sqrt(core_d).value, p) == 1 &&
                     kronecker(disc_of_sqrt(core_D).value, p) == 1;
        tables.push_back(build_table(p, split));
        if (tables.size() == 3) break;
    }
    std::sort(tables.begin(), tables.end(),
              [](const PTable& x, const PTable& y) { return x.fraction < y.fraction; });

    std::array<i64, 3> targets{core_d, core_D, core_dD};
    std::sort(targets.begin(), targets.end());

    i64 lim3 = 4 * B4, lim2 = 6 * B4, lim1 = 4 * B4, lim0 = B4;
    for (i64 a4 = 1; a4 <= B4; ++a4) {
        for (i64 a3 = -lim3; a3 <= lim3; ++a3) {
            for (i64 a2 = -lim2; a2 <= lim2; ++a2) {
                // per-table partial indices
                i64 base[3];
                for (size_t t = 0; t < tables.size(); ++t) {
                    i64 p = tables[t].p;
                    i64 m4 = a4 % p, m3 = ((a3 % p) + p) % p, m2 = ((a2 % p) + p) % p;
                    base[t] = ((m4 * p + m3) * p + m2) * p;
                }
                for (i64 a1 = -lim1; a1 <= lim1; ++a1) {
                    i64 base2[3];
                    for (size_t t = 0; t < tables.size(); ++t) {
                        i64 p = tables[t].p;
                        base2[t] = (base[t] + ((a1 % p) + p) % p) * p;
                    }
                    for (i64 a0 = -lim0; a0 <= lim0; ++a0) {
                        ++R.candidates_scanned;
                        if (a0 == 0) continue;
                        bool pass = true;
                        for (size_t t = 0; t < tables.size() && pass; ++t) {
                            i64 p = tables[t].p;
                            i64 m0 = ((a0 % p) + p) % p;
                            if (!tables[t].allow[(size_t)(base2[t] + m0)]) pass = false;
                        }
                        if (!pass) continue;
                        ++R.survived_tables;
                        if (gcd64(gcd64(gcd64(a4, std::abs(a3)), std::abs(a2)),
                                  gcd64(std::abs(a1), std::abs(a0))) != 1)
                            continue;
                        // V4 subset of A4: square nonzero discriminant
                        i128 disc = disc_quartic(a4, a3, a2, a1, a0);
                        if (disc == 0 || !is_square_i128(disc)) continue;
                        // monic integer model g = a4^3 f(x/a4)
                        i128 p3 = a3, p2 = (i128)a4 * a2, p1 = (i128)a4 * a4 * a1,
                             p0 = (i128)a4 * a4 * (i128)a4 * a0;
                        // resolvent cubic y^3 - p2 y^2 + (p1 p3 - 4 p0) y
                        //                 - (p1^2 + p0 p3^2 - 4 p0 p2)
                        i64 roots[3];
                        if (!cubic_integer_roots(-p2, p1 * p3 - 4 * p0,
                                                 -(p1 * p1 + p0 * p3 * p3 - 4 * p0 * p2), roots))
                            continue;
                        // subfield cores from S(y) = p3^2 - 4 p2 + 4 y,
                        // falling back to y^2 - 4 p0 when S vanishes
                        std::array<i64, 3> cores;
                        i128 Svals[3];
                        bool ok = true;
                        for (int k = 0; k < 3 && ok; ++k) {
                            i128 S = p3 * p3 - 4 * p2 + 4 * (i128)roots[k];
                            Svals[k] = S;
                            i128 probe = S != 0 ? S : (i128)roots[k] * roots[k] - 4 * p0;
                            if (probe == 0) {
                                ok = false;
                                break;
                            }
                            // squarefree core of probe (fits i64 after removing
                            // the square part; probe is bounded by ~1e14 here)
                            if (probe > (i128)4e17 || probe < -(i128)4e17) {
                                ok = false;
                                break;
                            }
                            cores[k] = squarefree_core((i64)probe);
                            if (cores[k] == 1) ok = false;  // rational split: reducible
                        }
                        if (!ok) continue;
                        std::array<i64, 3> sorted = cores;
                        std::sort(sorted.begin(), sorted.end());
                        if (sorted != targets) continue;
                        // Mahler measure of f via the explicit V4 roots
                        double m = mahler_quartic(a4, Svals, -(double)p3 / 4.0, 0,
                                                  (double)p3, (double)p2, (double)p1, (double)p0);
                        if (m > B4d * (1 + 1e-6)) continue;
                        R.polys.push_back({4, m, false});
                    }
                }
            }
        }
    }
    return R;
}

BruteReport count_Z_bruteforce(i64 d, i64 delta, double Y) {
    OracleResult R = oracle_enumerate(d, delta, Y);
    BruteReport rep;
    rep.count = R.count_at(Y, &rep.boundary);
    for (auto& P : R.polys) {
        double cut = std::pow(Y, (double)P.degree);
        if (P.mahler < cut * (1 - 1e-6)) (P.degree == 4 ? rep.quartics : rep.quadratics)++;
    }
    return rep;
}

}  // namespace qpt
