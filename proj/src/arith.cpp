#include "qpt/arith.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpt {

int kronecker(i64 a, i64 n) {
    if (n == 0) {
        if (a == 1 || a == -1) return 1;
        throw std::invalid_argument("kronecker(a,0) with a != +-1");
    }
    int k = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    // (a|2) factors
    int v = 0;
    while ((n & 1) == 0) n >>= 1, ++v;
    if (v) {
        if ((a & 1) == 0) return 0;
        i64 am8 = ((a % 8) + 8) % 8;
        if ((v & 1) && (am8 == 3 || am8 == 5)) k = -k;
    }
    // (a|n) for odd n > 0 depends only on a mod n
    a %= n;
    if (a < 0) a += n;
    // Jacobi loop on odd n > 0
    while (a != 0) {
        int t = 0;
        while ((a & 1) == 0) a >>= 1, ++t;
        i64 nm8 = n % 8;
        if ((t & 1) && (nm8 == 3 || nm8 == 5)) k = -k;
        if (a % 4 == 3 && n % 4 == 3) k = -k;
        i64 tmp = n % a;
        n = a;
        a = tmp;
    }
    return n == 1 ? k : 0;
}

int kronecker(const Int& a, const Int& n) { return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t()); }

bool is_fundamental_disc(i64 d) {
    if (d == 1 || d == 0) return false;
    i64 m4 = ((d % 4) + 4) % 4;
    if (m4 == 1) return is_squarefree(d);
    if (m4 != 0) return false;
    i64 m = d / 4;
    i64 mm4 = ((m % 4) + 4) % 4;
    return (mm4 == 2 || mm4 == 3) && is_squarefree(m);
}

FundDisc make_fund_disc(i64 d) {
    if (!is_fundamental_disc(d)) throw std::invalid_argument("not a fundamental discriminant");
    return FundDisc{d};
}

FundDisc disc_of_sqrt(i64 n) {
    i64 c = squarefree_core(n);
    if (c == 0 || c == 1) throw std::invalid_argument("disc_of_sqrt: square argument");
    i64 cm4 = ((c % 4) + 4) % 4;
    return FundDisc{cm4 == 1 ? c : 4 * c};
}

Rat SplittingType::delta_Xi() const {
    Rat d = rat(1);
    for (auto& [v, lc] : places) d *= lc.delta;
    return d;
}

// Defined in quadfield.cpp (needs the local classification); declared here to
// keep fundamental_discriminants self-contained.
LocalClass local_class_of(i64 D, i64 v);

std::vector<FundDisc> fundamental_discriminants(double Y, DiscSign sign,
                                                const std::optional<SplittingType>& Xi) {
    std::vector<FundDisc> out;
    if (Y < 3) return out;
    i64 bound = (i64)Y;
    auto matches = [&](i64 d) {
        if (!Xi) return true;
        for (auto& [v, want] : Xi->places) {
            if (!(local_class_of(d, v) == want)) return false;
        }
        return true;
    };
    std::vector<bool> fplus = fundamental_mask(bound, +1);
    std::vector<bool> fminus = fundamental_mask(bound, -1);
    for (i64 t = 3; t <= bound; ++t) {
        if ((sign == DiscSign::Positive || sign == DiscSign::Both) && fplus[t] && matches(t))
            out.push_back(FundDisc{t});
        if ((sign == DiscSign::Negative || sign == DiscSign::Both) && fminus[t] && matches(-t))
            out.push_back(FundDisc{-t});
    }
    return out;
}

Rat eval_multiplicative(const MultFn& f, i64 n) {
    if (n < 1) throw std::invalid_argument("eval_multiplicative: n < 1");
    Rat prod = rat(1);
    for (auto& pe : factor(n)) prod *= f.at(pe.p, pe.e);
    return prod;
}

std::vector<i64> primes_up_to(i64 n) {
    std::vector<bool> comp(n + 1, false);
    std::vector<i64> ps;
    for (i64 i = 2; i <= n; ++i) {
        if (!comp[i]) {
            ps.push_back(i);
            for (i64 j = i * i; j <= n; j += i) comp[j] = true;
        }
    }
    return ps;
}

std::vector<int32_t> spf_sieve(i64 n) {
    std::vector<int32_t> spf(n + 1, 0);
    for (i64 i = 2; i <= n; ++i) {
        if (spf[i] == 0) {
            for (i64 j = i; j <= n; j += i)
                if (spf[j] == 0) spf[j] = (int32_t)i;
        }
    }
    return spf;
}

std::vector<signed char> moebius_sieve(i64 n) {
    std::vector<signed char> mu(n + 1, 1);
    std::vector<int32_t> spf = spf_sieve(n);
    mu[0] = 0;
    for (i64 i = 2; i <= n; ++i) {
        i64 p = spf[i];
        i64 m = i / p;
        mu[i] = (m % p == 0) ? 0 : -mu[m];
    }
    return mu;
}

std::vector<bool> fundamental_mask(i64 n, int sign) {
    std::vector<signed char> mu = moebius_sieve(n);
    std::vector<bool> mask(n + 1, false);
    for (i64 t = 2; t <= n; ++t) {
        i64 d = sign > 0 ? t : -t;
        i64 m4 = ((d % 4) + 4) % 4;
        if (m4 == 1) {
            mask[t] = mu[t] != 0;
        } else if (m4 == 0) {
            i64 m = d / 4;
            i64 am = m < 0 ? -m : m;
            i64 mm4 = ((m % 4) + 4) % 4;
            mask[t] = (mm4 == 2 || mm4 == 3) && am <= n && mu[am] != 0;
        }
    }
    return mask;
}

}  // namespace qpt
