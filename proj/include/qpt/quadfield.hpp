#ifndef QPT_QUADFIELD_HPP
#define QPT_QUADFIELD_HPP

// Invariants of quadratic fields Q(sqrt(D)): class number, fundamental unit
// and regulator, L(s, chi_D) at s = 1, 2, and the local splitting data with
// its delta weights.

#include <optional>
#include <string>

#include "qpt/arith.hpp"

namespace qpt {

struct QuadField {
    FundDisc disc;
    Int h = 1;
    // fundamental unit (fu_x + fu_y*sqrt(D))/2, real case only; norm in {+-1}
    Int fu_x = 0, fu_y = 0;
    int fu_norm = 0;
    Iv reg;          // log of the fundamental unit; 0 for imaginary
    int w = 2;       // roots of unity
    Iv L1;           // L(1, chi_D)

    bool real() const { return disc.value > 0; }
};

// Local etale class of Q_v(sqrt(D)) and its weight; v = 0 means infinity.
LocalClass local_class(i64 D, i64 v);

// Imaginary class number by counting reduced forms |b| <= a <= c.
Int class_number_imaginary(i64 D);

// Hurwitz-type identity: over the reduced indefinite forms of discriminant
// D > 0 (pairs (a,b,c), ac < 0, b > | |a|-|c| |),
//   sum log((sqrt(D)+b)/(sqrt(D)-b)) = 4 h(D) R(D)
// with the wide class number and regulator.  Verified in tests against the
// analytic route.  O(sqrt(D)) per discriminant.
Iv real_hr_identity(i64 D);

// Continued-fraction fundamental unit (x + y sqrt(D))/2 > 1 of the maximal
// order of discriminant D > 0.
QuadField fundamental_unit(i64 D);

// Certified interval for L(s, chi_D), s in {1,2}, of width <= eps.
// s = 1 uses the character sum with the Polya--Vinogradov tail bound
//   |sum_{n>N} chi(n)/n| <= 2 sqrt(|D|) log|D| / (N+1),
// falling back to the class-number-formula closed form when eps is too small
// for the series to be feasible.
Iv l_chi(i64 D, int s, double eps);

// Full invariant record; uses the analytic route for real class numbers.
// Throws on precision failure (integer h not isolated).
QuadField build_quadfield(i64 D);

// process-wide memo cache, optional CSV persistence
const QuadField& quadfield(i64 D);
void quadfield_cache_load(const std::string& path);
void quadfield_cache_save(const std::string& path);

}  // namespace qpt

#endif
