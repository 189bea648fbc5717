#ifndef QPT_BULK_HPP
#define QPT_BULK_HPP

// Bulk tables over all discriminants |D| <= Y, used by the moment and
// Tamagawa sweeps.  Everything here is an O(Y^{3/2}) pass over binary
// quadratic forms; no per-field L-series evaluation.

#include <cstdint>
#include <vector>

#include "qpt/intx.hpp"

namespace qpt {

// Class numbers of imaginary fundamental discriminants: h[t] = h(-t) for
// 3 <= t <= Y, 0 where -t is not fundamental.  One pass over reduced
// positive-definite forms |b| <= a <= c.
std::vector<uint32_t> bulk_class_numbers_imag(i64 Y);

// hR[t] = h(t) * R(t) for real fundamental t <= Y (0 elsewhere), through the
// reduced-indefinite-form identity sum log((sqrt(D)+b)/(sqrt(D)-b)) = 4 h R.
std::vector<double> bulk_hr_real(i64 Y);

// L(1, chi_D) read off the two tables by the class number formula.
// Imaginary: 2 pi h / (w sqrt|D|); real: 2 h R / sqrt(D).
std::vector<double> bulk_L1(i64 Y, int sign);

}  // namespace qpt

#endif
