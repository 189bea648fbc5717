#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qpt/oflattice.hpp"

using namespace qpt;

TEST_CASE("det_F of ideals in Q(i, sqrt5)") {
    const BiquadField& M = biquad(5, -4);
    Ambient AQ = ambient_biquad(M, 1, false);
    Ambient AL = ambient_biquad(M, 1, true);
    OFLattice OQ = lattice_from_ideal(AQ, M, M.ideal_one(), 1);
    OFLattice OL = lattice_from_ideal(AL, M, M.ideal_one(), 1);
    // det_Q O_M = sqrt(400) = 20; det_L O_M = sqrt(400/25) = 4
    DetF dq = det_F(OQ);
    REQUIRE(dq.is_rational);
    CHECK(dq.rational_value == rat(20));
    DetF dl = det_F(OL);
    REQUIRE(dl.is_rational);
    CHECK(dl.rational_value == rat(4));
    // 2 O_M: norm 16, det_Q = 16 * 20 = 320
    std::vector<MElem> two{M.from_rational(rat(2))};
    MIdeal I2 = M.ideal_from_elems(two);
    OFLattice L2 = lattice_from_ideal(AQ, M, I2, 1);
    DetF d2 = det_F(L2);
    REQUIRE(d2.is_rational);
    CHECK(d2.rational_value == rat(320));
    // det_F multiplicativity under scalars c in O_F:
    // det_F(c Lambda) = |N_{F/Q}(c)|^n det_F(Lambda)
    std::vector<MElem> three{M.from_rational(rat(3))};
    OFLattice L3 = lattice_from_ideal(AL, M, M.ideal_from_elems(three), 1);
    DetF d3 = det_F(L3);
    REQUIRE(d3.is_rational);
    CHECK(d3.rational_value == rat(9 * 9) * rat(4));  // N_{L/Q}(3)^2 * det_L(O_M)
}

TEST_CASE("index norms") {
    const BiquadField& M = biquad(5, -4);
    Ambient AQ = ambient_biquad(M, 1, false);
    OFLattice O = lattice_from_ideal(AQ, M, M.ideal_one(), 1);
    CHECK(index_norm(O, O) == rat(1));
    std::vector<MElem> two{M.from_rational(rat(2))};
    OFLattice L2 = lattice_from_ideal(AQ, M, M.ideal_from_elems(two), 1);
    CHECK(index_norm(O, L2) == rat(16));
    OFLattice P5 = lattice_from_ideal(AQ, M, M.primes_above(5)[0].ideal, 1);
    CHECK(index_norm(O, P5) == rat(5));
}

TEST_CASE("F-stability") {
    const BiquadField& M = biquad(5, -4);
    Ambient AL = ambient_biquad(M, 1, true);
    OFLattice O = lattice_from_ideal(AL, M, M.ideal_one(), 1);
    CHECK(is_F_stable(O));
    OFLattice P = lattice_from_ideal(AL, M, M.primes_above(11)[0].ideal, 1);
    CHECK(is_F_stable(P));
}

TEST_CASE("Gauss circle: 317 points in the closed disc of radius 10") {
    Ambient A = ambient_Qn(2);
    OFLattice Z2 = lattice_standard(A);
    SkewBall ball = unit_ball(A);
    auto pred = [](const std::vector<Rat>& v) {
        Rat q = v[0] * v[0] + v[1] * v[1];
        return q <= 100 ? Cmp::Below : Cmp::Above;  // exact, closed disc
    };
    CountResult res = count_points(Z2, ball, (f128)10, pred);
    CHECK(res.inside == 317);
    CHECK(res.boundary == 0);
    // empty region
    auto pred_empty = [](const std::vector<Rat>&) { return Cmp::Above; };
    CHECK(count_points(Z2, ball, (f128)3, pred_empty).inside == 0);
    // square [-1,1]^2 has 9 points
    auto pred_sq = [](const std::vector<Rat>& v) {
        return (abs(v[0]) <= 1 && abs(v[1]) <= 1) ? Cmp::Below : Cmp::Above;
    };
    CHECK(count_points(Z2, ball, (f128)1.5L, pred_sq).inside == 9);
}

TEST_CASE("successive minima basics") {
    const BiquadField& M = biquad(5, -4);
    Ambient AL = ambient_biquad(M, 1, true);
    OFLattice O = lattice_from_ideal(AL, M, M.ideal_one(), 1);
    SkewBall ball;
    ball.scale.assign(M.places.size(), (f128)1);
    auto mins = successive_minima(O, ball, 2);
    REQUIRE(mins.size() == 2);
    CHECK(std::abs((double)mins[0].mid - 1.0) < 1e-12);  // the element 1
    CHECK(std::abs((double)mins[1].mid - 1.0) < 1e-12);  // i is L-independent of 1
    // scaling all balls by c > 0 divides every minimum by c
    SkewBall ball2;
    ball2.scale.assign(M.places.size(), (f128)2);
    auto mins2 = successive_minima(O, ball2, 2);
    for (int i = 0; i < 2; ++i)
        CHECK(std::abs((double)(mins2[i].mid * 2 - mins[i].mid)) < 1e-25);
    // Z-structure minima of the same lattice: lambda_{Q,1} = lambda_{L,1}
    Ambient AQ = ambient_biquad(M, 1, false);
    OFLattice OQ = lattice_from_ideal(AQ, M, M.ideal_one(), 1);
    SkewBall ballq;
    ballq.scale.assign(M.places.size(), (f128)1);
    auto minsq = successive_minima(OQ, ballq, 4);
    REQUIRE(minsq.size() == 4);
    CHECK(std::abs((double)(minsq[0].mid - mins[0].mid)) < 1e-25);
    // interleaving: lambda_{Q,(j-1)d+k} within a bounded factor of lambda_{L,j}
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            double ratio = (double)(minsq[2 * j + k].mid / mins[j].mid);
            CHECK(ratio > 0.01);
            CHECK(ratio < 100.0);
        }
}

TEST_CASE("davenport estimate on the Gauss circle instance") {
    Ambient A = ambient_Qn(2);
    OFLattice Z2 = lattice_standard(A);
    SkewBall ball = unit_ball(A);
    DavenportEstimate est = davenport_estimate(Z2, ball, 10.0, 1.0, M_PI * 100.0, 317);
    CHECK(std::abs(est.main - 314.1592653589793) < 1e-9);
    CHECK(std::abs(317.0 - est.main) < est.bracket);  // C <= 1 suffices here
    CHECK(est.ratio < 1.0);
}

TEST_CASE("minkowski product commensurability on random ideal lattices") {
    std::mt19937 rng(20240801);
    std::vector<std::pair<i64, i64>> fields{{5, -4}, {2, -3}, {5, -3}, {2, 5}, {3, -4}};
    double cmin = 1e300, cmax = 0;
    for (auto [d, delta] : fields) {
        const BiquadField& M = biquad(d, delta);
        Ambient AL = ambient_biquad(M, 1, true);
        auto ps = M.primes_up_to(40.0);
        for (int t = 0; t < 20; ++t) {
            MIdeal I = M.ideal_one();
            int nf = 1 + (int)(rng() % 2);
            for (int k = 0; k < nf; ++k) I = M.ideal_mul(I, ps[rng() % ps.size()].ideal);
            OFLattice L = lattice_from_ideal(AL, M, I, 1);
            SkewBall ball;
            ball.scale.assign(M.places.size(), (f128)1);
            auto mins = successive_minima(L, ball, 2);
            // (l1 l2)^d * vol(balls) / det_F: vol of the max-norm unit ball
            // per place: (2)^1 real, (2pi) wait: complex disc area pi
            double volb = 1.0;
            for (auto& pl : M.places) volb *= pl.dw == 1 ? 2.0 : 2.0 * M_PI;  // self-dual measure
            double lhs = std::pow((double)(mins[0].mid * mins[1].mid), 2) * volb;
            double rhs = (double)det_F(L).value.mid;
            double c = lhs / rhs;
            cmin = std::min(cmin, c);
            cmax = std::max(cmax, c);
        }
    }
    CHECK(cmax / cmin <= 1e3);
    MESSAGE("minkowski commensurability interval: [", cmin, ", ", cmax, "]");
}

TEST_CASE("davenport dimensionless ratio over random boxes") {
    std::mt19937 rng(7777);
    double worst = 0;
    Ambient A2 = ambient_Qn(2);
    Ambient A3 = ambient_Qn(3);
    for (int t = 0; t < 60; ++t) {
        bool three = t % 2;
        const Ambient& A = three ? A3 : A2;
        int n = A.dim;
        OFLattice L;
        L.amb = &A;
        L.den = 1;
        // random triangular integer basis with unit-ish skew
        L.basis.assign(n, std::vector<Int>(n, 0));
        for (int i = 0; i < n; ++i) {
            L.basis[i][i] = 1 + (i64)(rng() % 3);
            for (int j = i + 1; j < n; ++j) L.basis[i][j] = (i64)(rng() % 5) - 2;
        }
        SkewBall ball = unit_ball(A);
        double R = 2.0 + (double)(rng() % 12);
        auto pred = [&](const std::vector<Rat>& v) {
            for (auto& x : v)
                if (abs(x) > Rat((long)R)) return Cmp::Above;
            return Cmp::Below;
        };
        CountResult res = count_points(L, ball, (f128)(R + 0.5), pred);
        double vol = std::pow(2.0 * R, n);
        DavenportEstimate est = davenport_estimate(L, ball, R, 2.0 * n, vol, res.inside);
        worst = std::max(worst, est.ratio);
    }
    CHECK(worst < 100.0);
    MESSAGE("max davenport ratio: ", worst);
}
