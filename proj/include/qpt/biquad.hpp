#ifndef QPT_BIQUAD_HPP
#define QPT_BIQUAD_HPP

// Arithmetic of biquadratic fields M = Q(sqrt(d), sqrt(Delta)): exact element
// arithmetic over the basis {1, sqrt(a), sqrt(b), sqrt(a)sqrt(b)}, integral
// basis with a-posteriori discriminant verification, HNF ideal arithmetic,
// prime splitting, class group by enumeration, and the unit-lattice data
// (eps_j, h_M, R_M, q_M w_M).

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qpt/quadfield.hpp"

namespace qpt {

struct MElem {
    std::array<Rat, 4> c{};  // over {1, s, t, st}, s^2 = a, t^2 = b
    bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0; }
    bool operator==(const MElem& o) const { return c == o.c; }
};

// One archimedean place of M: a representative ring homomorphism into C given
// by the sign pattern of (sqrt(a), sqrt(b)), with local degree dw.
struct MPlace {
    int sign_a = 1, sign_b = 1;
    int dw = 1;
};

class BiquadField;

// Ideal in HNF over the integral basis: columns of `mat` (upper triangular,
// positive diagonal) span den^-1 * ideal over Z.
struct MIdeal {
    std::array<std::array<Int, 4>, 4> mat;
    Int den = 1;
    Rat norm() const;
    bool operator==(const MIdeal& o) const { return mat == o.mat && den == o.den; }
};

struct PrimeIdeal {
    MIdeal ideal;
    i64 p;
    int f;  // residue degree; e = 4/(f*g) by Galois
    int e;
};

class BiquadField {
  public:
    i64 d = 0, delta = 0;     // defining data
    i64 a = 0, b = 0;         // squarefree generators of the basis
    i64 sub_disc[3] = {0, 0, 0};  // discs of Q(sqrt d), Q(sqrt Delta), Q(sqrt d*Delta)
    i64 disc_M = 0;
    int r = 0, s = 0;         // signature
    int w_M = 2;
    Iv hR;                    // h_M * R_M from the residue of zeta_M
    Int h_M = 1;
    Iv R_M;
    int q_M = 1;
    Int qM_wM = 2;

    std::array<std::array<Rat, 4>, 4> W;     // integral basis columns over {1,s,t,st}
    std::array<std::array<Rat, 4>, 4> Winv;  // inverse: {1,s,t,st} -> omega coords
    std::vector<MPlace> places;

    // ---- element arithmetic (coords over {1,s,t,st}) ----
    MElem mul(const MElem& x, const MElem& y) const;
    MElem add(const MElem& x, const MElem& y) const;
    MElem sub(const MElem& x, const MElem& y) const;
    MElem conj(const MElem& x, int flip_a, int flip_b) const;  // Galois action
    MElem inv(const MElem& x) const;
    Rat norm_elem(const MElem& x) const;      // N_{M/Q}, exact
    Rat trace_elem(const MElem& x) const { return Rat(4 * x.c[0]); }
    MElem from_rational(const Rat& q) const;

    // embedding at the representative hom of places[w]; (re, im) intervals
    std::pair<Iv, Iv> embed(const MElem& x, int w) const;
    Iv abs_at_place(const MElem& x, int w) const;

    // omega (integral-basis) coordinates
    MElem omega(int j) const;
    std::array<Rat, 4> to_omega(const MElem& x) const;
    MElem from_omega(const std::array<Rat, 4>& v) const;
    MElem from_omega_int(const std::array<Int, 4>& v) const;
    bool is_integral(const MElem& x) const;

    // does x lie in the subfield Q(sqrt(sub_disc[j]))?  (j = 0 is L)
    bool in_subfield(const MElem& x, int j) const;

    // ---- ideals ----
    MIdeal ideal_from_elem_cols(std::vector<std::array<Int, 4>> cols, const Int& den) const;
    MIdeal ideal_from_elems(const std::vector<MElem>& gens) const;
    MIdeal ideal_one() const;
    MIdeal ideal_mul(const MIdeal& x, const MIdeal& y) const;
    MIdeal ideal_conj(const MIdeal& x, int flip_a, int flip_b) const;
    MIdeal ideal_inverse(const MIdeal& x) const;  // via Galois conjugates
    bool ideal_contains(const MIdeal& x, const std::array<Int, 4>& omega_coords) const;
    bool ideal_equal(const MIdeal& x, const MIdeal& y) const;

    std::vector<PrimeIdeal> primes_above(i64 p) const;
    // all prime ideals of norm <= X, sorted by (norm, order found)
    std::vector<PrimeIdeal> primes_up_to(double X) const;
    // squarefree ideals of norm <= X with their Moebius value, sorted by norm
    std::vector<std::pair<MIdeal, int>> moebius_ideals(double X) const;

    // #{integral ideals of norm <= X}: Dirichlet convolution 1*chi1*chi2*chi3
    i64 ideal_count(i64 X) const;
    // independent oracle: direct enumeration over prime-power products
    i64 ideal_count_enumerate(double X) const;

    // class group
    std::vector<MIdeal> class_representatives() const { return class_reps_; }
    int ideal_class_index(const MIdeal& I) const;          // index into reps
    bool is_principal(const MIdeal& I) const;

    // units: real subfields only, in the fixed order j = 0,1,2 (subset)
    struct UnitData {
        int sub_index;          // which quadratic subfield
        MElem eps;              // fundamental unit embedded in M
        Iv log_eps;             // its regulator
        std::vector<int> places_pos, places_neg;  // M-places above v_j / v_j'
    };
    const std::vector<UnitData>& units() const { return units_; }

    // lattice presentation of an ideal: Z-basis columns in omega coords
    std::array<std::array<Int, 4>, 4> ideal_zbasis(const MIdeal& I, Int* den) const;

    std::string describe() const;

  private:
    friend BiquadField build_field(i64 d, i64 delta);
    std::array<std::array<std::array<Int, 4>, 4>, 4> mult_table_;  // omega_i*omega_j
    std::array<std::array<Int, 4>, 4> galois_[3];  // omega-coord matrices of the 3 conjugations
    std::vector<UnitData> units_;
    std::vector<MIdeal> class_reps_;
    mutable std::map<i64, std::vector<PrimeIdeal>> prime_cache_;
    void build_internals();
    friend struct BiquadBuilder;
};

// Construct with all invariants populated.  Throws on verification failure
// (integral basis discriminant, q_M integrality, class enumeration budget).
BiquadField build_field(i64 d, i64 delta);

// process-wide cache + CSV persistence (d,delta,discM,r,s,wM,qMwM,hM,RM)
const BiquadField& biquad(i64 d, i64 delta);
void biquad_cache_save(const std::string& path);

}  // namespace qpt

#endif
