#pragma once

// Brute-force reference results, written independently of the toolchain:
// plain loops and recursion over native types. DSP engines must agree
// with these on the known-answer programs.

#include <cstdint>
#include <utility>
#include <vector>

namespace oracles {

// All (x, y) grid points with step 1 inside the quarter circle of radius
// r, x-major order.
std::vector<std::pair<double, double>> quarter_circle_points(double r);

// All n-queens solutions as column-per-row vectors, in lexicographic
// order (enumerated via std::next_permutation and filtered on diagonals).
std::vector<std::vector<int>> nqueens_solutions(int n);

std::int64_t ackermann(std::int64_t m, std::int64_t n);

std::int64_t tarai(std::int64_t x, std::int64_t y, std::int64_t z);

// The arithmetic sequence from b while v <= e + 1e-9*max(1,|e|).
std::vector<double> for_sequence(double b, double e, double s);

}  // namespace oracles
