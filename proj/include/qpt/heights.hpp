#ifndef QPT_HEIGHTS_HPP
#define QPT_HEIGHTS_HPP

// Heights on P^1(M) and X_d(K), the restriction-of-scalars point
// correspondence, the unit fundamental domain and its partition, and the
// lattice-decomposition point count Z(P^1, K, d, Y).

#include <optional>
#include <string>

#include "qpt/oflattice.hpp"

namespace qpt {

struct P1PointM {
    MElem x0, x1;
};

// [x : y : z : w] with coordinates in K = Q(sqrt Delta), stored as elements
// of M whose sqrt(d)-components vanish
struct XdPointK {
    MElem x, y, z, w;
};

struct HeightParts {
    Rat ideal_norm;  // N(<x0, x1>), exact
    Iv arch;         // prod_w max(|x0|_w,|x1|_w)^{dw/4}
    Iv value;        // ideal_norm^{-1/4} * arch
};

HeightParts height_p1(const BiquadField& M, const P1PointM& P);
// absolute anticanonical height on X_d: fourth power of the O(1) height of
// the corresponding P^1(M) point
Iv height_xd(const BiquadField& M, const XdPointK& P);

P1PointM p1_from_xd(const BiquadField& M, const XdPointK& P);
XdPointK xd_from_p1(const BiquadField& M, const P1PointM& Q);

// N(<x,y,z,w>_{O_M})^{1/4} equals the K-coordinate-ideal norm^{1/2}; used by
// the two-route height check away from p | 2d
Rat xd_coordinate_ideal_norm_M(const BiquadField& M, const XdPointK& P);

// ---- unit fundamental domain -------------------------------------------------

struct UnitDomainData {
    const BiquadField* M = nullptr;
    struct RealSub {
        int unit_index;  // into M->units()
        Iv log_eps;      // R_{K_j}
        i64 t;           // floor(R) + 1
        Iv log_u;        // R / t
    };
    std::vector<RealSub> subs;
    std::vector<std::vector<int>> cells;  // all tuples i_j in [-t_j, t_j)
    f128 kappa = 1;                       // bounding constant of S_0(1)

    // per-place radius scale of tau_i^{-1} B at cell `cell`
    std::vector<f128> cell_scales(const std::vector<int>& cell) const;
};

UnitDomainData make_unit_domain(const BiquadField& M);

// psi_j of a tuple of elements (n = 1 or 2) from per-place maxima
Iv psi_value(const BiquadField& M, const UnitDomainData& D, int sub,
             const std::vector<const MElem*>& xs);

struct ReduceResult {
    P1PointM reduced;
    std::vector<int> cell;
    bool boundary = false;  // some psi_j within slack of a wall
};
// unique U-orbit representative with psi_j in [eps^-2, eps^2), plus its cell
ReduceResult unit_reduce(const BiquadField& M, const UnitDomainData& D, const P1PointM& x,
                         f128 slack = (f128)1e-9L);

// the Schmidt minimum m_i(x): geometric mean over real subfields of
// max_v |eps_j|_v^{-i_j/2t_j} |N_{M/K_j}(x)|_v^{1/2}
Iv m_i_value(const BiquadField& M, const UnitDomainData& D, const MElem& x,
             const std::vector<int>& cell);

// vol S^(2)(T) = (2^r (2pi)^s)^2 2^{r+s-1} q_M R_M T^8 in the self-dual
// (trace-pairing) measure; the closed form behind the Schanuel constant
double volume_S2_closed_form(const BiquadField& M, double T);
// Monte-Carlo check of the same volume (self-dual measure)
double volume_S2_monte_carlo(const BiquadField& M, i64 samples, u64 seed = 12345);

// Schanuel constant for P^1 over M with the absolute O(1)-height:
// c = (2^r (2pi)^s)^2 2^{r+s-1} h_M R_M / (q_M w_M |Delta_M| zeta_M(2))
// divided... (the q_M cancels against the volume); provenance string attached
struct SchanuelConst {
    double value;
    double zeta_M2;
    std::string provenance;
};
SchanuelConst schanuel_const(const BiquadField& M);

// ---- counting ------------------------------------------------------------------

struct CellReport {
    int rep_index;
    double b_norm;
    std::vector<int> cell;
    i64 pairs;  // signed by the Moebius weight
};

struct CountReport {
    i64 d = 0, delta = 0;
    double Y = 0;
    Int count = 0;        // exact Z(P^1, K, d, Y)
    i64 boundary = 0;     // boundary-ambiguous pairs (must be 0 for exactness)
    double main_term = 0; // c_{P^1,M} Y^8
    std::string constant_provenance;
    std::vector<CellReport> cells;
    std::vector<double> point_heights;  // per accepted pair (each point appears qM_wM times)
    double kappa = 0;
    Int raw_pair_total = 0;
    Int qM_wM = 0;
    i64 cells_skipped_lambda2 = 0;
    std::string to_json() const;
};

struct CountOptions {
    double moebius_safety = 1.02;
    f128 slack = (f128)1e-9L;
    bool collect_heights = true;
};

CountReport count_Z_lattice(i64 d, i64 delta, double Y, const CountOptions& opts = {});

// #{P in X_d(K) : Q(P) = K, H(P) <= B^(1/2)} = Z(P^1, K, d, B^(1/8));
// point heights are reported as anticanonical H values
CountReport count_NstarK_Xd(i64 d, i64 delta, double B, const CountOptions& opts = {});

}  // namespace qpt

#endif
