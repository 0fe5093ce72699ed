#pragma once

/// Dense symmetric eigensolver: cyclic Jacobi rotations.
///
/// Adequate for the small discretized quadratic forms this library builds
/// (dimensions in the low hundreds); quadratic convergence once the matrix
/// is nearly diagonal.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bhl/error.hpp"

namespace bhl {

/// All eigenvalues of a symmetric matrix, sorted ascending.  The input is
/// consumed.  Fails after max_sweeps full cyclic sweeps without reducing the
/// off-diagonal mass below threshold.
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a,
                                                 int max_sweeps = 100) {
    const size_t n = a.size();
    if (n == 0) fail(errc::domain_error, "empty matrix");
    for (const auto& row : a)
        if (row.size() != n) fail(errc::domain_error, "matrix must be square");

    double scale = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
    if (scale == 0.0) return std::vector<double>(n, 0.0);
    const double stop = 1e-15 * scale * static_cast<double>(n);

    auto off = [&] {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) s += a[i][j] * a[i][j];
        return std::sqrt(2.0 * s);
    };

    int sweep = 0;
    while (off() > stop) {
        if (++sweep > max_sweeps)
            fail(errc::spectral_failure,
                 "Jacobi iteration exceeded " + std::to_string(max_sweeps) + " sweeps");
        for (size_t p = 0; p + 1 < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                double apq = a[p][q];
                if (std::abs(apq) <= 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double app = a[p][p], aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = a[q][p] = 0.0;
                for (size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = a[p][i] = c * aip - s * aiq;
                    a[i][q] = a[q][i] = s * aip + c * aiq;
                }
            }
        }
    }

    std::vector<double> ev(n);
    for (size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace bhl
