#ifndef QPT_CONSTANTS_HPP
#define QPT_CONSTANTS_HPP

// Euler local data for X_d, truncated twisted L-values, Tamagawa summation,
// and the arithmetic-statistics sweeps (discriminant sums, L-moments,
// class-number moments).

#include <string>
#include <vector>

#include "qpt/heights.hpp"
#include "qpt/oracle.hpp"

namespace qpt {

struct EulerLocal {
    i64 p = 0;
    int chi_L_p = 0;
    Rat w_p, w_p2;
    Rat lambda_p, lambda_bar_p;
    Rat f_p, f_p2, F_p, G_p, R_p, g_p;
    Rat wtilde_p, lamtilde_p;
};

// exact projective point count of x^2 - d y^2 = z w over F_p (brute force)
i64 count_Xd_mod_p(i64 d, i64 p);
// ... and over F_{p^2} (small p only; O(p^4))
i64 count_Xd_mod_p2(i64 d, i64 p);

// All local data at p; closed forms away from 2d, direct counts at ramified p.
EulerLocal euler_local(i64 d, i64 p);

// Dirichlet coefficient of L(s, Pic Xbar_d) at n coprime to 2d
Int psi_coeff(i64 d, i64 n);

// sum_{n <= Z, (n, 2d) = 1} psi(n) chi_Delta(n) / n, exact
Rat truncated_L(i64 d, i64 delta, i64 Z, bool* excluded_flag = nullptr);

// Schanuel constant (delegates to the heights module closed form)
inline double schanuel_c_p1(const BiquadField& M) { return schanuel_const(M).value; }

struct TamagawaRow {
    i64 delta;
    double tau;
};
struct TamagawaSum {
    double sum = 0;
    std::vector<TamagawaRow> table;                 // per-field values (optional)
    std::vector<std::pair<double, double>> trace;   // (Y', sum at Y')
    i64 fields = 0, skipped = 0;
};
// sum of tau(X_{d,K}) over fundamental |Delta| <= Y, excluding K = Q(sqrt d);
// trace_points are checkpoints for sum(Y')/log Y' reporting
TamagawaSum tamagawa_sum(i64 d, double Y, const std::vector<double>& trace_points = {},
                         bool keep_table = false, i64 l2_prime_bound = 10000);

// good-prime Euler product prod_{p <= pmax, p not in S} lamtilde_p^{-1} wtilde_p
double tamagawa_good_euler_product(i64 d, i64 pmax);
// residue factor lim (s-1)^1 L_{Q,S}(s, Pic) = prod_{p in S}(1-1/p) * L_S(1, chi_L)
double tamagawa_residue_factor(i64 d);

struct DiscsumResult {
    double brute = 0;
    double predicted = 0;
    i64 terms = 0;
    double fitted_C = 0;  // for non-square m: |brute| / (m^{1/4} sqrt(log 4mS) sqrt(Y))
};
DiscsumResult discsum_verify(const MultFn& g, i64 m, const SplittingType& Xi, i64 Y);

// the Euler-factor multiplicative function g of X_d (1 on S)
MultFn euler_g_function(i64 d);

// prediction constant C_t = (3/pi^2) prod_p (1 + (1+1/p)^{-1} sum_k tau_t(p^{2k}) p^{-2k})
double moment_constant_C(int t, i64 prime_bound = 1000000);

struct MomentResult {
    double brute = 0;
    double predicted = 0;
    double constant = 0;  // the C or c~ used
};
// t-th moment of L(1, chi_Delta) over fundamental discriminants of one sign
MomentResult moments_L(int t, int sign, i64 Y);
// class-number moments: imaginary sum h^r ~ c~_r Y^{r/2+1}; real sum (hR)^r
MomentResult moments_classnumber(int r, int sign, i64 Y);

struct SDResult {
    double brute = 0;
    double predicted = 0;
};
SDResult selberg_delange_verify(const MultFn& g, i64 m, i64 Y);

struct CutoffAudit {
    int n_points = 0;
    double max_ratio = 0;   // max |Delta_K| / H(P)
    double bound = 0;       // 2^{delta_L}
    bool pass = false;
    bool silverman_pass = false;  // instances over F = Q and F = L
};
CutoffAudit cutoff_audit(i64 d, i64 delta, const CountReport& nstar_report);

// near-optimality family on P^1: [2m : -1 + sqrt(1-4m^2)] has H^4 = m^2 and
// |Delta| = 4m^2 - 1; returns the first `want` squarefree-discriminant m's
std::vector<std::pair<i64, i64>> p1_optimal_family(int want);  // (m, |Delta|)

// CSV emitters (RFC-4180; plain numeric fields)
void write_euler_local_csv(const std::string& path, i64 d, i64 pmax);
void write_tamagawa_csv(const std::string& path, const TamagawaSum& ts);
void write_moments_csv(const std::string& path, const std::vector<double>& Ys,
                       const std::vector<MomentResult>& rows);

}  // namespace qpt

#endif
