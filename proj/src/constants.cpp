#include "qpt/constants.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "qpt/bulk.hpp"

namespace qpt {

i64 count_Xd_mod_p(i64 d, i64 p) {
    i64 dm = ((d % p) + p) % p;
    // affine cone: sum over (x,y) of #{(z,w): zw = x^2 - d y^2}
    i64 r0 = 0;  // pairs with x^2 - d y^2 = 0
    for (i64 x = 0; x < p; ++x)
        for (i64 y = 0; y < p; ++y)
            if ((x * x - dm * y * y) % p == 0) ++r0;
    i64 naff = r0 * (2 * p - 1) + (p * p - r0) * (p - 1);
    return (naff - 1) / (p - 1);
}

i64 count_Xd_mod_p2(i64 d, i64 p) {
    if (p > 31) throw std::invalid_argument("count_Xd_mod_p2: p too large for brute force");
    i64 q = p * p;
    // F_{p^2} = F_p[t]/(t^2 - n), n a non-residue (p odd); for p = 2 use
    // t^2 + t + 1
    i64 n = 0;
    if (p > 2) {
        for (i64 c = 2; c < p; ++c)
            if (kronecker(c, p) == -1) {
                n = c;
                break;
            }
    }
    auto mul = [&](std::pair<i64, i64> a, std::pair<i64, i64> b) {
        if (p == 2) {  // t^2 = t + 1
            i64 ac = a.first * b.first % 2, bd = a.second * b.second % 2;
            i64 cross = (a.first * b.second + a.second * b.first) % 2;
            return std::make_pair((ac + bd) % 2, (cross + bd) % 2);
        }
        i64 re = (a.first * b.first + n % p * a.second % p * b.second) % p;
        i64 im = (a.first * b.second + a.second * b.first) % p;
        return std::make_pair(re, im);
    };
    auto sub = [&](std::pair<i64, i64> a, std::pair<i64, i64> b) {
        return std::make_pair(((a.first - b.first) % p + p) % p,
                              ((a.second - b.second) % p + p) % p);
    };
    std::pair<i64, i64> dd{((d % p) + p) % p, 0};
    // r(v) = #{(z,w): zw = v}: q-1 if v != 0 else 2q-1
    i64 r0 = 0;
    for (i64 x0 = 0; x0 < p; ++x0)
        for (i64 x1 = 0; x1 < p; ++x1)
            for (i64 y0 = 0; y0 < p; ++y0)
                for (i64 y1 = 0; y1 < p; ++y1) {
                    auto x = std::make_pair(x0, x1), y = std::make_pair(y0, y1);
                    auto v = sub(mul(x, x), mul(dd, mul(y, y)));
                    if (v.first == 0 && v.second == 0) ++r0;
                }
    i64 naff = r0 * (2 * q - 1) + (q * q - r0) * (q - 1);
    return (naff - 1) / (q - 1);
}

EulerLocal euler_local(i64 d, i64 p) {
    EulerLocal E;
    E.p = p;
    i64 discL = disc_of_sqrt(squarefree_core(d)).value;
    E.chi_L_p = kronecker(discL, p);
    Rat pr = rat(p);
    Rat p2 = pr * pr, p4 = p2 * p2;
    bool good = p != 2 && d % p != 0;
    if (good) {
        if (E.chi_L_p == 1)
            E.w_p = Rat((pr + 1) * (pr + 1)) / p2;
        else
            E.w_p = (p2 + 1) / p2;
        E.w_p2 = Rat((p2 + 1) * (p2 + 1)) / p4;
        Rat x = rat(1, p);
        if (E.chi_L_p == 1) {
            E.lambda_p = 1 / Rat((1 - x) * (1 - x));
            E.lambda_bar_p = 1 / Rat((1 + x) * (1 + x));
        } else {
            E.lambda_p = 1 / (1 - x * x);
            E.lambda_bar_p = E.lambda_p;
        }
    } else {
        // ramified / bad: raw counts, rank-1 inertia-invariant factor
        E.w_p = Rat(count_Xd_mod_p(d, p)) / p2;
        E.w_p2 = p <= 31 ? Rat(count_Xd_mod_p2(d, p)) / p4 : Rat(0);
        Rat x = rat(1, p);
        E.lambda_p = 1 / (1 - x);
        E.lambda_bar_p = 1 / (1 + x);
    }
    E.f_p = E.w_p / E.lambda_p;
    E.f_p2 = E.w_p2 / (E.lambda_p * E.lambda_bar_p);
    E.F_p = (E.f_p * E.f_p + E.f_p2) / 2;
    E.G_p = (E.f_p * E.f_p - E.f_p2) / 2;
    E.R_p = E.F_p == 0 ? Rat(0) : E.G_p / E.F_p;
    E.g_p = (E.f_p * E.f_p + E.f_p2) == 0 ? Rat(0) : 2 * E.f_p / (E.f_p * E.f_p + E.f_p2);
    E.wtilde_p = E.w_p / pr + (E.w_p * E.w_p + E.w_p2) / 2;
    E.lamtilde_p = E.lambda_p / (1 - rat(1, p));
    return E;
}

Int psi_coeff(i64 d, i64 n) {
    if (n < 1) throw std::invalid_argument("psi_coeff: n >= 1");
    i64 core = squarefree_core(d);
    Int out = 1;
    for (auto& pe : factor(n)) {
        if (pe.p == 2 || core % pe.p == 0)
            throw std::invalid_argument("psi_coeff: n must avoid the bad places");
        int chi = kronecker(disc_of_sqrt(core).value, pe.p);
        if (chi == 1)
            out *= pe.e + 1;
        else if (chi == -1)
            out *= (pe.e % 2 == 0) ? 1 : 0;
        if (out == 0) return 0;
    }
    return out;
}

Rat truncated_L(i64 d, i64 delta, i64 Z, bool* excluded_flag) {
    i64 core = squarefree_core(d);
    if (excluded_flag) *excluded_flag = squarefree_core(delta) == core;
    Rat sum = 0;
    for (i64 n = 1; n <= Z; ++n) {
        if (n % 2 == 0) continue;
        bool bad = false;
        for (auto& pe : factor(n))
            if (core % pe.p == 0) bad = true;
        if (bad) continue;
        int chi = kronecker(delta, n);
        if (chi == 0) continue;
        Int psi = psi_coeff(d, n);
        if (psi == 0) continue;
        sum += Rat(chi) * Rat(psi) / Rat((long)n);
    }
    return sum;
}

// ---- Tamagawa summation ------------------------------------------------------------

double tamagawa_good_euler_product(i64 d, i64 pmax) {
    i64 core = squarefree_core(d);
    double prod = 1;
    for (i64 p : primes_up_to(pmax)) {
        if (p == 2 || core % p == 0) continue;
        EulerLocal E = euler_local(d, p);
        prod *= Rat(E.wtilde_p / E.lamtilde_p).get_d();
    }
    return prod;
}

double tamagawa_residue_factor(i64 d) {
    // lim (s-1) zeta_S(s) L_S(s, chi_L) over S = {oo, 2} u {p | d}
    i64 core = squarefree_core(d);
    i64 discL = disc_of_sqrt(core).value;
    double out = (double)quadfield(discL).L1.mid;
    out *= 0.5 * (1.0 - kronecker(discL, 2) / 2.0);
    for (auto& pe : factor(std::abs(core))) {
        if (pe.p == 2) continue;
        out *= 1.0 - 1.0 / (double)pe.p;  // chi_L(p) = 0 at ramified p
    }
    return out;
}

TamagawaSum tamagawa_sum(i64 d, double Y, const std::vector<double>& trace_points,
                         bool keep_table, i64 l2_prime_bound) {
    i64 core = squarefree_core(d);
    i64 discL = disc_of_sqrt(core).value;
    i64 Yi = (i64)Y;
    i64 tbl_max = 4 * std::abs(core) * Yi + 16;
    std::vector<double> L1p = bulk_L1(tbl_max, +1);
    std::vector<double> L1m = bulk_L1(tbl_max, -1);
    double L1_L = (double)quadfield(discL).L1.mid;

    // L(2, chi) Euler products: per-prime residue tables
    std::vector<i64> ps = primes_up_to(l2_prime_bound);
    std::vector<std::vector<signed char>> qr(ps.size());
    for (size_t i = 0; i < ps.size(); ++i) {
        i64 p = ps[i];
        qr[i].assign(p, 0);
        if (p == 2) continue;
        for (i64 r = 1; r < p; ++r) qr[i][r] = (signed char)kronecker(r, p);
    }
    auto L2 = [&](i64 D) {
        double prod = 1;
        for (size_t i = 0; i < ps.size(); ++i) {
            i64 p = ps[i];
            int chi;
            if (p == 2) {
                if (D % 2 == 0)
                    chi = 0;
                else
                    chi = (((D % 8) + 8) % 8 == 1) ? 1 : -1;
            } else {
                i64 r = ((D % p) + p) % p;
                chi = r == 0 ? 0 : qr[i][r];
            }
            if (chi) prod /= 1.0 - (double)chi / ((double)p * p);
        }
        return prod;
    };
    double zeta2 = M_PI * M_PI / 6.0;
    double L2_L = L2(discL);

    std::vector<bool> fplus = fundamental_mask(Yi, +1);
    std::vector<bool> fminus = fundamental_mask(Yi, -1);
    std::vector<double> sorted_traces = trace_points;
    std::sort(sorted_traces.begin(), sorted_traces.end());
    size_t ti = 0;

    TamagawaSum out;
    for (i64 t = 3; t <= Yi; ++t) {
        while (ti < sorted_traces.size() && (double)t > sorted_traces[ti]) {
            out.trace.push_back({sorted_traces[ti], out.sum});
            ++ti;
        }
        for (int sign : {+1, -1}) {
            if (!(sign > 0 ? fplus[t] : fminus[t])) continue;
            i64 delta = sign > 0 ? t : -t;
            i64 mK = squarefree_core(delta);
            if (mK == core) {
                ++out.skipped;  // K = L: not linearly disjoint
                continue;
            }
            i64 m3 = squarefree_core(core * mK);
            i64 disc3 = disc_of_sqrt(m3).value;
            if (std::abs(disc3) > tbl_max) throw std::runtime_error("tamagawa_sum: table too small");
            double l1K = delta > 0 ? L1p[t] : L1m[t];
            double l1_3 = disc3 > 0 ? L1p[disc3] : L1m[-disc3];
            if (l1K == 0.0 || l1_3 == 0.0) throw std::runtime_error("tamagawa_sum: missing L value");
            double rho = L1_L * l1K * l1_3;
            double discM = std::sqrt((double)std::abs(discL) * (double)t * (double)std::abs(disc3));
            int rr, ss;
            if (core > 0 && delta > 0) {
                rr = 4;
                ss = 0;
            } else {
                rr = 0;
                ss = 2;
            }
            double zM2 = zeta2 * L2_L * L2(delta) * L2(disc3);
            double tau = std::pow(2.0, 2 * (rr + ss)) * std::pow(M_PI, ss) * rho / (discM * zM2);
            out.sum += tau;
            ++out.fields;
            if (keep_table) out.table.push_back({delta, tau});
        }
    }
    while (ti < sorted_traces.size()) {
        out.trace.push_back({sorted_traces[ti], out.sum});
        ++ti;
    }
    return out;
}

// ---- discriminant sums and moments ----------------------------------------------------

MultFn euler_g_function(i64 d) {
    i64 core = squarefree_core(d);
    return MultFn::from_rule([core, d](i64 p, int k) {
        if (k != 1) return rat(1);
        if (p == 2 || core % p == 0) return rat(1);  // 1 on S
        EulerLocal E = euler_local(d, p);
        return E.g_p;
    });
}

DiscsumResult discsum_verify(const MultFn& g, i64 m, const SplittingType& Xi, i64 Y) {
    DiscsumResult out;
    i64 S = 1;
    for (auto& [v, lc] : Xi.places)
        if (v != 0) S *= v;
    if (m < 1 || gcd64(m, S) != 1) throw std::invalid_argument("discsum: m coprime to S, m >= 1");
    auto ds = fundamental_discriminants((double)Y, DiscSign::Both, Xi);
    for (auto& D : ds) {
        int chi = kronecker(D.value, m);
        if (chi == 0) continue;
        out.brute += chi * eval_multiplicative(g, std::abs(D.value)).get_d();
        ++out.terms;
    }
    i64 root;
    if (is_square(m, &root)) {
        double pred = Xi.delta_Xi().get_d() * (double)Y;
        for (auto& [v, lc] : Xi.places)
            if (v != 0) pred *= 1.0 - 1.0 / (double)v;
        i64 P = 1000000;
        for (i64 p : primes_up_to(P)) {
            if (S % p == 0) continue;
            if (m % p == 0)
                pred *= 1.0 - 1.0 / (double)p;
            else
                pred *= (1.0 - 1.0 / (double)p) * (1.0 + g.at(p, 1).get_d() / (double)p);
        }
        out.predicted = pred;
    } else {
        out.predicted = 0;
        double denom = std::pow((double)m, 0.25) * std::sqrt(std::log(4.0 * (double)m * S)) *
                       std::sqrt((double)Y);
        out.fitted_C = std::abs(out.brute) / denom;
    }
    return out;
}

double moment_constant_C(int t, i64 prime_bound) {
    double C = 3.0 / (M_PI * M_PI);
    for (i64 p : primes_up_to(prime_bound)) {
        double z = 1.0 / (double)p;
        double even = 0.5 * (std::pow(1.0 - z, -(double)t) + std::pow(1.0 + z, -(double)t)) - 1.0;
        C *= 1.0 + even / (1.0 + z);
    }
    return C;
}

MomentResult moments_L(int t, int sign, i64 Y) {
    MomentResult out;
    std::vector<double> L1 = bulk_L1(Y, sign);
    for (i64 u = 3; u <= Y; ++u)
        if (L1[u] != 0.0) out.brute += std::pow(L1[u], (double)t);
    out.constant = moment_constant_C(t);
    out.predicted = out.constant * (double)Y;
    return out;
}

MomentResult moments_classnumber(int r, int sign, i64 Y) {
    MomentResult out;
    double C = moment_constant_C(r);
    out.constant = C;
    if (sign < 0) {
        std::vector<uint32_t> h = bulk_class_numbers_imag(Y);
        for (i64 u = 3; u <= Y; ++u)
            if (h[u]) out.brute += std::pow((double)h[u], (double)r);
        // h = sqrt|D| L / pi for |D| > 4; partial summation of sum L^t = C Y
        double main = (2.0 / (r + 2.0)) * C * std::pow((double)Y, r / 2.0 + 1.0) /
                      std::pow(M_PI, (double)r);
        // exact finite corrections at D = -3, -4 (w = 6, 4)
        double corr = 0;
        if (Y >= 3) corr += 1.0 - std::pow(1.0 / 3.0, (double)r);
        if (Y >= 4) corr += 1.0 - std::pow(1.0 / 2.0, (double)r);
        out.predicted = main + corr;
    } else {
        std::vector<double> hr = bulk_hr_real(Y);
        for (i64 u = 5; u <= Y; ++u)
            if (hr[u] != 0.0) out.brute += std::pow(hr[u], (double)r);
        out.predicted = (2.0 / (r + 2.0)) * C * std::pow((double)Y, r / 2.0 + 1.0) /
                        std::pow(2.0, (double)r);
    }
    return out;
}

SDResult selberg_delange_verify(const MultFn& g, i64 m, i64 Y) {
    SDResult out;
    std::vector<int32_t> spf = spf_sieve(Y);
    std::vector<float> gv(Y + 1, 0.0f);
    gv[1] = 1.0f;
    for (i64 n = 2; n <= Y; ++n) {
        i64 p = spf[n];
        i64 q = n / p;
        if (q % p == 0) continue;  // not squarefree
        if (gv[q] == 0.0f && q != 1) continue;
        gv[n] = (float)((double)gv[q] * g.at(p, 1).get_d());
    }
    for (i64 n = 1; n <= Y; ++n) {
        if (n > 1 && gv[n] == 0.0f) continue;
        if (gcd64(n, m) != 1) continue;
        out.brute += gv[n];
    }
    double pred = (double)Y;
    for (i64 p : primes_up_to(1000000)) {
        if (m % p == 0)
            pred *= 1.0 - 1.0 / (double)p;
        else
            pred *= (1.0 - 1.0 / (double)p) * (1.0 + g.at(p, 1).get_d() / (double)p);
    }
    out.predicted = pred;
    return out;
}

CutoffAudit cutoff_audit(i64 d, i64 delta, const CountReport& rep) {
    CutoffAudit A;
    int delta_L = squarefree_core(d) > 0 ? 2 : 1;
    A.bound = std::pow(2.0, (double)delta_L);
    A.n_points = (int)rep.point_heights.size();
    double absD = (double)std::abs(delta);
    A.silverman_pass = true;
    const BiquadField& M = biquad(d, delta);
    for (double H : rep.point_heights) {
        A.max_ratio = std::max(A.max_ratio, absD / H);
        // Silverman over L: Delta_K^2 <= 2^{2 delta_L} Hcal^8 = 2^{2dL} H^2
        if (absD * absD > std::pow(2.0, 2.0 * delta_L) * H * H * (1 + 1e-9))
            A.silverman_pass = false;
        // Silverman over Q for the quartic field M: |Delta_M| <= 4^4 Hcal^24
        double hcal = std::pow(H, 0.25);
        if ((double)M.disc_M > 256.0 * std::pow(hcal, 24.0) * (1 + 1e-9)) {
            // degree-2 points have the weaker |Delta_{Q(P)}| <= 4 Hcal^4 bound;
            // without per-point degrees only the quartic instance is asserted
            // when it is binding for all points of this height
            if (256.0 * std::pow(hcal, 24.0) >= absD) A.silverman_pass = false;
        }
    }
    A.pass = A.max_ratio <= A.bound * (1 + 1e-9);
    return A;
}

std::vector<std::pair<i64, i64>> p1_optimal_family(int want) {
    std::vector<std::pair<i64, i64>> out;
    for (i64 m = 1; (int)out.size() < want && m < 100000; ++m) {
        i64 D = 4 * m * m - 1;
        if (is_squarefree(D)) out.push_back({m, D});
    }
    return out;
}

// ---- CSV -------------------------------------------------------------------------------

void write_euler_local_csv(const std::string& path, i64 d, i64 pmax) {
    std::ofstream f(path);
    f << "p,chi_L,w_p,w_p2,lambda_p,lambda_bar_p,f_p,f_p2,F,G,R,g,wtilde,lamtilde\n";
    for (i64 p : primes_up_to(pmax)) {
        EulerLocal E = euler_local(d, p);
        f << p << ',' << E.chi_L_p << ',' << E.w_p << ',' << E.w_p2 << ',' << E.lambda_p << ','
          << E.lambda_bar_p << ',' << E.f_p << ',' << E.f_p2 << ',' << E.F_p << ',' << E.G_p << ','
          << E.R_p << ',' << E.g_p << ',' << E.wtilde_p << ',' << E.lamtilde_p << '\n';
    }
}

void write_tamagawa_csv(const std::string& path, const TamagawaSum& ts) {
    std::ofstream f(path);
    f << "Y,sum,sum_over_logY\n";
    for (auto& [y, s] : ts.trace) f << y << ',' << s << ',' << s / std::log(y) << '\n';
}

void write_moments_csv(const std::string& path, const std::vector<double>& Ys,
                       const std::vector<MomentResult>& rows) {
    std::ofstream f(path);
    f << "Y,brute,predicted,ratio\n";
    for (size_t i = 0; i < Ys.size(); ++i)
        f << Ys[i] << ',' << rows[i].brute << ',' << rows[i].predicted << ','
          << rows[i].brute / rows[i].predicted << '\n';
}

}  // namespace qpt
