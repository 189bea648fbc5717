#ifndef QPT_ORACLE_HPP
#define QPT_ORACLE_HPP

// Independent brute-force count of Z(P^1, K, d, Y): enumerate primitive
// integer minimal polynomials (degree 4 with Galois group V4 and splitting
// field Q(sqrt d, sqrt Delta), plus degree 2 generating Q(sqrt Delta) or
// Q(sqrt d*Delta)), and count roots of Mahler measure at most Y^deg.
//
// Deliberately independent of the biquadratic-field machinery: only exact
// integer arithmetic, the Kronecker symbol, and floating root finding with a
// boundary-slack protocol.

#include <vector>

#include "qpt/arith.hpp"

namespace qpt {

struct OraclePoint {
    int degree;      // 2 or 4 (points contributed = degree)
    double mahler;   // Mahler measure of the minimal polynomial
    bool boundary;   // within slack of the acceptance threshold at some Y^deg
};

struct OracleResult {
    std::vector<OraclePoint> polys;  // one entry per accepted polynomial
    i64 candidates_scanned = 0;
    i64 survived_tables = 0;

    // count of P^1(M) points of height <= Y; *boundary reports polynomials
    // whose Mahler measure is within slack of the cut
    i64 count_at(double Y, i64* boundary = nullptr, double slack = 1e-6) const;
};

// enumerate all qualifying minimal polynomials with Mahler <= Ymax^deg
OracleResult oracle_enumerate(i64 d, i64 delta, double Ymax);

struct BruteReport {
    i64 count = 0;
    i64 boundary = 0;
    i64 quartics = 0;
    i64 quadratics = 0;
};
BruteReport count_Z_bruteforce(i64 d, i64 delta, double Y);

}  // namespace qpt

#endif
