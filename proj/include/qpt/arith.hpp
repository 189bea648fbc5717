#ifndef QPT_ARITH_HPP
#define QPT_ARITH_HPP

// Elementary exact number theory: Kronecker symbols, fundamental
// discriminants, multiplicative-function evaluation, and the sieves backing
// the discriminant sweeps.

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "qpt/intx.hpp"

namespace qpt {

// Standard Kronecker symbol (a|n), total on n != 0 or a = +-1.
int kronecker(i64 a, i64 n);
int kronecker(const Int& a, const Int& n);

// A fundamental discriminant: value == 1 mod 4 squarefree, or 4m with m
// squarefree and m == 2,3 mod 4; value != 1.
struct FundDisc {
    i64 value = 0;
    int sign() const { return value < 0 ? -1 : 1; }
    bool operator==(const FundDisc&) const = default;
};

bool is_fundamental_disc(i64 d);
FundDisc make_fund_disc(i64 d);            // throws if not fundamental
// fundamental discriminant of Q(sqrt(n)) for squarefree-core'd n
FundDisc disc_of_sqrt(i64 n);

// Local quadratic etale class of Q_v(sqrt(D))/Q_v.  For v = infinity the two
// classes are real-split (D > 0) and complex (D < 0).  At odd ramified p the
// two classes are told apart by whether the unit part of D is a QR mod p.
// At p = 2 the seven classes are encoded by (D mod 8) when D is odd and by
// (D/4 mod 8, D/8 mod 8) when D is even.
struct LocalClass {
    enum Kind { Split, Inert, Ramified } kind = Split;
    int cls = 0;       // disambiguates ramified classes; 0 otherwise
    Rat delta;         // delta_{xi,v} weight
    bool operator==(const LocalClass& o) const { return kind == o.kind && cls == o.cls; }
};

// One bad place with its required local class; v = 0 encodes infinity.
struct SplittingType {
    std::vector<std::pair<i64, LocalClass>> places;
    Rat delta_Xi() const;  // product of the per-place weights
};

enum class DiscSign { Positive, Negative, Both };

std::vector<FundDisc> fundamental_discriminants(double Y, DiscSign sign,
                                                const std::optional<SplittingType>& Xi = {});

// Multiplicative function given by local values on prime powers, defaulting
// to 1 on unspecified ones.
struct MultFn {
    std::map<std::pair<i64, int>, Rat> local_values;
    std::function<Rat(i64, int)> fallback;  // optional rule; 1 when absent

    Rat at(i64 p, int k) const {
        auto it = local_values.find({p, k});
        if (it != local_values.end()) return it->second;
        if (fallback) return fallback(p, k);
        return rat(1);
    }
    static MultFn one() { return MultFn{}; }
    static MultFn from_rule(std::function<Rat(i64, int)> f) {
        MultFn m;
        m.fallback = std::move(f);
        return m;
    }
};

Rat eval_multiplicative(const MultFn& f, i64 n);

// sieves
std::vector<i64> primes_up_to(i64 n);
std::vector<int32_t> spf_sieve(i64 n);            // smallest prime factor
std::vector<signed char> moebius_sieve(i64 n);
// mask[t] says whether +t (resp. -t) is a fundamental discriminant
std::vector<bool> fundamental_mask(i64 n, int sign);

}  // namespace qpt

#endif
