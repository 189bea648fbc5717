#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qpt/arith.hpp"
#include "qpt/quadfield.hpp"

using namespace qpt;

TEST_CASE("kronecker matches gmp on a grid") {
    for (i64 a = -300; a <= 300; ++a) {
        for (i64 n = -300; n <= 300; ++n) {
            if (n == 0 && a != 1 && a != -1) continue;
            CHECK(kronecker(a, n) == kronecker(Int(a), Int(n)));
        }
    }
}

TEST_CASE("kronecker pinned values") {
    CHECK(kronecker(-4, 3) == -1);
    CHECK(kronecker(5, 11) == 1);
    CHECK(kronecker(7, 1) == 1);
    CHECK(kronecker(-123456, 1) == 1);
}

TEST_CASE("kronecker(D,.) is periodic mod |D| and totally multiplicative") {
    for (i64 t = 3; t <= 200; ++t) {
        for (i64 D : {t, -t}) {
            if (!is_fundamental_disc(D)) continue;
            i64 q = t;
            for (i64 n = 1; n <= 2 * q; ++n) {
                CHECK(kronecker(D, n) == kronecker(D, n + q));
                CHECK(kronecker(D, n) * kronecker(D, n + 1) == kronecker(D, n * (n + 1)));
            }
            // orthogonality: sum over a period vanishes
            i64 s = 0;
            for (i64 n = 1; n <= q; ++n) s += kronecker(D, n);
            CHECK(s == 0);
        }
    }
}

TEST_CASE("fundamental discriminant lists") {
    auto plus = fundamental_discriminants(20, DiscSign::Positive);
    std::vector<i64> got;
    for (auto& d : plus) got.push_back(d.value);
    CHECK(got == std::vector<i64>{5, 8, 12, 13, 17});

    auto minus = fundamental_discriminants(4, DiscSign::Negative);
    got.clear();
    for (auto& d : minus) got.push_back(d.value);
    CHECK(got == std::vector<i64>{-3, -4});

    CHECK(fundamental_discriminants(2, DiscSign::Positive).empty());
}

TEST_CASE("fundamental_discriminants with a splitting type") {
    // fields split at 3 and ramified at infinity- (imaginary)
    SplittingType Xi;
    Xi.places.push_back({0, local_class(-4, 0)});
    Xi.places.push_back({3, local_class(-11, 3)});  // chi_{-11}(3) = 1: split
    REQUIRE(local_class(-11, 3).kind == LocalClass::Split);
    auto ds = fundamental_discriminants(60, DiscSign::Both, Xi);
    CHECK(!ds.empty());
    for (auto& d : ds) {
        CHECK(d.value < 0);
        CHECK(kronecker(d.value, 3) == 1);
    }
}

TEST_CASE("eval_multiplicative") {
    CHECK(eval_multiplicative(MultFn::one(), 60) == rat(1));
    CHECK(eval_multiplicative(MultFn::one(), 1) == rat(1));
    MultFn f = MultFn::from_rule([](i64 p, int k) {
        if (k != 1) return rat(1);
        return rat(p + 1, p);
    });
    CHECK(eval_multiplicative(f, 6) == rat(2));
    // pointwise product of functions multiplies the evaluations
    MultFn g = MultFn::from_rule([](i64 p, int k) { return rat(p, p + k); });
    MultFn fg = MultFn::from_rule([&](i64 p, int k) { return Rat(f.at(p, k) * g.at(p, k)); });
    std::mt19937 rng(7);
    for (int i = 0; i < 400; ++i) {
        i64 n = 1 + (i64)(rng() % 10000);
        CHECK(eval_multiplicative(fg, n) == eval_multiplicative(f, n) * eval_multiplicative(g, n));
    }
}

TEST_CASE("sieves agree with direct routines") {
    auto mu = moebius_sieve(3000);
    for (i64 n = 1; n <= 3000; ++n) CHECK((int)mu[n] == moebius(n));
    auto fp = fundamental_mask(2000, +1);
    auto fmn = fundamental_mask(2000, -1);
    for (i64 t = 2; t <= 2000; ++t) {
        CHECK(fp[t] == is_fundamental_disc(t));
        CHECK(fmn[t] == is_fundamental_disc(-t));
    }
}

TEST_CASE("factor and primality") {
    CHECK(is_prime(2));
    CHECK(is_prime(999983));
    CHECK(!is_prime(999983ull * 999983ull));
    CHECK(is_prime(1000000007ull));
    auto f = factor(720);
    REQUIRE(f.size() == 3);
    CHECK(f[0].p == 2);
    CHECK(f[0].e == 4);
    CHECK(squarefree_core(720) == 5);
    CHECK(squarefree_core(-12) == -3);
}
