#ifndef QPT_OFLATTICE_HPP
#define QPT_OFLATTICE_HPP

// Lattices over O_F (F = Q or a quadratic field) presented by explicit
// Z-bases in an ambient etale algebra: determinants, index norms, successive
// minima under skewed max-norm balls, exact box counting, and the
// generalised Davenport bracket.

#include <functional>
#include <vector>

#include "qpt/biquad.hpp"

namespace qpt {

// An ambient algebra A with its archimedean places and trace pairing.
// Coordinates are rational vectors of length dim.
struct Ambient {
    int dim = 0;
    struct Place {
        int dw = 1;
    };
    std::vector<Place> places;
    // (re, im) of the coordinate vector at the representative hom of place w
    std::function<std::pair<Iv, Iv>(const std::vector<Rat>&, int)> embed;
    std::vector<std::vector<Rat>> gram;  // trace-pairing Gram of the coordinate basis
    // base field F: discriminant and the action of a generator of O_F on A
    i64 F_disc = 1;
    std::vector<std::vector<Rat>> F_action;  // empty when F = Q
    int deg_F() const { return F_disc == 1 ? 1 : 2; }
};

// A = Q^k with the standard pairing, F = Q.
Ambient ambient_Qn(int k);
// A = M^ncopies (ncopies in {1,2}); coordinates are integral-basis (omega)
// coordinates per copy.  over_L selects the O_L-structure (F = Q(sqrt d));
// otherwise the plain Z-structure is used.
Ambient ambient_biquad(const BiquadField& M, int ncopies, bool over_L = true);

struct OFLattice {
    const Ambient* amb = nullptr;
    std::vector<std::vector<Int>> basis;  // dim columns, each of length dim
    Int den = 1;
    int rank_F() const { return amb->dim / amb->deg_F(); }
};

OFLattice lattice_from_ideal(const Ambient& amb, const BiquadField& M, const MIdeal& I,
                             int ncopies);
OFLattice lattice_standard(const Ambient& amb);  // Z^dim in coordinates

// F-stability check: the O_F-generator action maps the lattice into itself.
bool is_F_stable(const OFLattice& L);

// Scales per place, interpreted as the skewed unit ball
// {x : |x|_w <= scale_w for all w}; det-one normalization is the caller's
// business and is asserted only where the theory needs it.
struct SkewBall {
    std::vector<f128> scale;
};
SkewBall unit_ball(const Ambient& amb);

struct DetF {
    Rat squared;       // N_{F/Q}(Delta_{Lambda/F}) as an exact rational
    Iv value;          // its square root
    bool is_rational;  // true when the square root is exact
    Rat rational_value;
};
DetF det_F(const OFLattice& L);

// |det presentation_2 / det presentation_1| = N((L1 : L2)); exact rational.
Rat index_norm(const OFLattice& L1, const OFLattice& L2);

// all nonzero lattice vectors x with |x|_w <= r * scale_w at every place;
// boundary-ambiguous vectors are included with flag = Boundary
struct BoxPoint {
    std::vector<Int> coords;  // ambient coordinates (numerators over L.den)
    Iv norm;                  // max_w |x|_w / scale_w
    Cmp flag;
};
std::vector<BoxPoint> enumerate_box(const OFLattice& L, const SkewBall& ball, f128 r,
                                    f128 slack = (f128)1e-9L);

// successive minima with exact-by-enumeration semantics; values are certified
// intervals and F-linear independence is decided exactly.
std::vector<Iv> successive_minima(const OFLattice& L, const SkewBall& ball, int howmany = -1);

// exact region counting: predicate decides membership with a declared slack
struct CountResult {
    i64 inside = 0;
    i64 boundary = 0;
};
CountResult count_points(const OFLattice& L, const SkewBall& ball, f128 bounding_radius,
                         const std::function<Cmp(const std::vector<Rat>&)>& predicate);

struct DavenportEstimate {
    double main;         // vol / (|Delta_F|^{n/2} det_F)
    double bracket;      // N * (R^{nd-1}/((l1..l_{n-1})^d l_n^{d-1}) + sum_i R^{id}/(l1..li)^d)
    double ratio;        // |count - main| / bracket (the dimensionless report)
};
DavenportEstimate davenport_estimate(const OFLattice& L, const SkewBall& ball, double R, double N,
                                     double vol, i64 exact_count);

}  // namespace qpt

#endif
