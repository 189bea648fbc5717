#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qpt/biquad.hpp"

using namespace qpt;

TEST_CASE("build_field Q(i, sqrt5)") {
    const BiquadField& M = biquad(5, -4);
    CHECK(M.disc_M == 400);
    CHECK(M.r == 0);
    CHECK(M.s == 2);
    CHECK(M.w_M == 4);
    CHECK(M.h_M == 1);
    // h_M R_M = 2 log((1+sqrt5)/2) with the d_w-weighted regulator convention
    CHECK(std::abs((double)M.hR.mid - 2 * 0.4812118250596035) < 1e-10);
    CHECK(M.q_M == 1);
    CHECK(M.qM_wM == 4);
    CHECK(M.units().size() == 1);
}

TEST_CASE("build_field Q(sqrt2, sqrt5)") {
    const BiquadField& M = biquad(2, 5);
    CHECK(M.disc_M == 1600);
    CHECK(M.r == 4);
    CHECK(M.s == 0);
    CHECK(M.w_M == 2);
    CHECK(M.h_M == 1);
    CHECK(M.q_M == 2);
    CHECK(M.qM_wM == 4);
    CHECK(M.units().size() == 3);
    // class number formula invariant: hR 2^r (2pi)^s / (w sqrt(disc)) = rho
    double rho = (double)(quadfield(8).L1 * quadfield(5).L1 * quadfield(40).L1).mid;
    double lhs = (double)M.hR.mid * std::pow(2.0, M.r) / (M.w_M * std::sqrt((double)M.disc_M));
    CHECK(std::abs(lhs - rho) < 1e-12);
}

TEST_CASE("element arithmetic and norms") {
    const BiquadField& M = biquad(5, -4);
    MElem x;  // 3 + s - 2t + st/2  (s = sqrt5, t = i)
    x.c = {rat(3), rat(1), rat(-2), rat(1, 2)};
    MElem y;
    y.c = {rat(-1), rat(0), rat(2), rat(1)};
    MElem xy = M.mul(x, y);
    MElem yx = M.mul(y, x);
    CHECK(xy == yx);
    CHECK(M.mul(x, M.add(y, y)) == M.add(xy, xy));
    CHECK(M.norm_elem(xy) == M.norm_elem(x) * M.norm_elem(y));
    MElem xi = M.inv(x);
    CHECK(M.mul(x, xi) == M.from_rational(rat(1)));
    // embeddings satisfy |N(x)| = prod |x|_w^{dw}
    Iv prod((f128)1);
    for (size_t w = 0; w < M.places.size(); ++w) {
        Iv aw = M.abs_at_place(x, (int)w);
        prod = prod * iv_pow_int(aw, M.places[w].dw);
    }
    double nn = std::abs(M.norm_elem(x).get_d());
    CHECK(std::abs((double)prod.mid - nn) < 1e-10 * nn);
}

TEST_CASE("integral basis discriminant (verification values)") {
    CHECK(biquad(2, 5).disc_M == 1600);
    CHECK(biquad(5, -4).disc_M == 400);
    CHECK(biquad(2, -3).disc_M == 8 * 3 * 24);
    CHECK(biquad(5, -3).disc_M == 5 * 3 * 15);
}

TEST_CASE("prime splitting patterns") {
    const BiquadField& M = biquad(5, -4);
    auto p3 = M.primes_above(3);
    REQUIRE(p3.size() == 2);
    CHECK(p3[0].f == 2);
    CHECK(p3[0].e == 1);
    auto p11 = M.primes_above(11);
    CHECK(p11.size() == 2);
    auto p29 = M.primes_above(29);  // 29 = 1 mod 4, QR mod 5: fully split
    REQUIRE(p29.size() == 4);
    CHECK(p29[0].f == 1);
    auto p2 = M.primes_above(2);
    REQUIRE(p2.size() == 1);
    CHECK(p2[0].f == 2);
    CHECK(p2[0].e == 2);
    auto p5 = M.primes_above(5);
    REQUIRE(p5.size() == 2);
    CHECK(p5[0].f == 1);
    CHECK(p5[0].e == 2);
    CHECK(p5[0].ideal.norm() == rat(5));
    MIdeal prod = M.ideal_mul(M.ideal_mul(p5[0].ideal, p5[0].ideal),
                              M.ideal_mul(p5[1].ideal, p5[1].ideal));
    std::vector<MElem> five{M.from_rational(rat(5))};
    CHECK(M.ideal_equal(prod, M.ideal_from_elems(five)));
}

TEST_CASE("ideal arithmetic: norms multiply, inverse works") {
    const BiquadField& M = biquad(5, -4);
    auto ps = M.primes_up_to(50.0);
    REQUIRE(ps.size() >= 4);
    MIdeal A = M.ideal_mul(ps[0].ideal, ps[2].ideal);
    MIdeal B = ps[1].ideal;
    CHECK(M.ideal_mul(A, B).norm() == A.norm() * B.norm());
    MIdeal Ainv = M.ideal_inverse(A);
    CHECK(M.ideal_equal(M.ideal_mul(A, Ainv), M.ideal_one()));
}

TEST_CASE("ideal counting: convolution equals direct enumeration") {
    for (auto [d, delta] : {std::pair<i64, i64>{5, -4}, {2, -3}, {5, -3}, {2, 5}, {3, -4}}) {
        const BiquadField& M = biquad(d, delta);
        i64 X = 200;
        CHECK(M.ideal_count(X) == M.ideal_count_enumerate((double)X));
    }
    CHECK(biquad(5, -4).ideal_count(1) == 1);
}

TEST_CASE("moebius ideals") {
    const BiquadField& M = biquad(5, -4);
    auto mb1 = M.moebius_ideals(1.0);
    REQUIRE(mb1.size() == 1);
    CHECK(mb1[0].second == 1);
    CHECK(M.ideal_equal(mb1[0].first, M.ideal_one()));
    auto mb = M.moebius_ideals(30.0);
    for (auto& [I, mu] : mb) CHECK((mu == 1 || mu == -1));
    auto p3 = M.primes_above(3);
    bool found = false;
    for (auto& [I, mu] : mb)
        if (M.ideal_equal(I, p3[0].ideal)) {
            CHECK(mu == -1);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("class group and principality") {
    const BiquadField& M = biquad(5, -4);
    auto reps = M.class_representatives();
    REQUIRE(reps.size() == 1);
    CHECK(M.ideal_equal(reps[0], M.ideal_one()));
    std::vector<MElem> two{M.from_rational(rat(2))};
    CHECK(M.is_principal(M.ideal_from_elems(two)));
    CHECK(M.is_principal(M.primes_above(5)[0].ideal));
}

TEST_CASE("subfield membership test") {
    const BiquadField& M = biquad(5, -4);
    MElem x;
    x.c = {rat(2), rat(3), rat(0), rat(0)};  // in L = Q(sqrt5)
    CHECK(M.in_subfield(x, 0));
    CHECK(!M.in_subfield(x, 1));
    x.c = {rat(1), rat(0), rat(1), rat(0)};  // 1 + i
    CHECK(!M.in_subfield(x, 0));
    CHECK(M.in_subfield(x, 1));
    x.c = {rat(0), rat(0), rat(0), rat(1)};  // sqrt(-5)
    CHECK(M.in_subfield(x, 2));
}

TEST_CASE("qM_wM lands in the admissible set") {
    for (auto [d, delta] : {std::pair<i64, i64>{5, -4}, {2, -3}, {5, -3}, {2, 5}, {3, 13}}) {
        const BiquadField& M = biquad(d, delta);
        long q = M.q_M;
        CHECK((q == 1 || q == 2 || q == 4 || q == 8));
        long qw = M.qM_wM.get_si();
        bool ok = false;
        for (long v : {2, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96})
            if (qw == v) ok = true;
        CHECK(ok);
    }
}
