#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracles {

std::vector<std::pair<double, double>> quarter_circle_points(double r) {
    std::vector<std::pair<double, double>> pts;
    double bound = r + 1e-9 * std::max(1.0, std::fabs(r));
    for (double x = 0.0; x <= bound; x += 1.0)
        for (double y = 0.0; y <= bound; y += 1.0)
            if (std::sqrt(x * x + y * y) <= r) pts.emplace_back(x, y);
    return pts;
}

std::vector<std::vector<int>> nqueens_solutions(int n) {
    std::vector<int> cols(n);
    std::iota(cols.begin(), cols.end(), 1);
    std::vector<std::vector<int>> out;
    do {
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n && ok; ++j)
                if (std::abs(cols[i] - cols[j]) == j - i) ok = false;
        if (ok) out.push_back(cols);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return out;
}

std::int64_t ackermann(std::int64_t m, std::int64_t n) {
    if (m == 0) return n + 1;
    if (n == 0) return ackermann(m - 1, 1);
    return ackermann(m - 1, ackermann(m, n - 1));
}

std::int64_t tarai(std::int64_t x, std::int64_t y, std::int64_t z) {
    if (x <= y) return y;
    return tarai(tarai(x - 1, y, z), tarai(y - 1, z, x), tarai(z - 1, x, y));
}

std::vector<double> for_sequence(double b, double e, double s) {
    std::vector<double> out;
    double bound = e + 1e-9 * std::max(1.0, std::fabs(e));
    for (double v = b; v <= bound; v += s) out.push_back(v);
    return out;
}

}  // namespace oracles
