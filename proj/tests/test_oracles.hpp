#pragma once

// Test-only independent oracles. These stay deliberately naive: finite
// differences, dense grids, and closed forms that the implementation under
// test never uses.

#include <cmath>
#include <random>

#include "nlab/field.hpp"

namespace nlab::testing {

/// Centered 2n-point discrete Laplacian.
inline double fd_laplacian(const FieldOracle& f, const Point& p, double h) {
    const double u0 = f.value(p);
    double acc = 0;
    for (int i = 0; i < f.dim(); ++i) {
        Point pp = p, pm = p;
        pp[i] += h;
        pm[i] -= h;
        acc += f.value(pp) + f.value(pm) - 2.0 * u0;
    }
    return acc / (h * h);
}

/// Local sup scale: max |u| over a coarse sample of the unit ball around p.
inline double local_scale(const FieldOracle& f, const Point& p, double radius = 1.0) {
    std::mt19937_64 rng(12345);
    auto unif = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    double best = std::abs(f.value(p));
    for (int s = 0; s < 512; ++s) {
        Point q = p;
        double n2 = 0;
        std::array<double, 4> d{};
        for (int i = 0; i < f.dim(); ++i) {
            d[i] = 2.0 * unif() - 1.0;
            n2 += d[i] * d[i];
        }
        const double scale = radius * std::pow(unif(), 1.0 / f.dim()) / std::sqrt(n2);
        for (int i = 0; i < f.dim(); ++i) q[i] += scale * d[i];
        best = std::max(best, std::abs(f.value(q)));
    }
    return best;
}

/// Deterministic pseudo-random interior points in the ball of given radius.
inline std::vector<Point> random_points(int dim, int count, double radius, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unif = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    std::vector<Point> pts;
    while (static_cast<int>(pts.size()) < count) {
        Point p = Point::zero(dim);
        double n2 = 0;
        for (int i = 0; i < dim; ++i) {
            p[i] = radius * (2.0 * unif() - 1.0);
            n2 += p[i] * p[i];
        }
        if (n2 <= radius * radius) pts.push_back(p);
    }
    return pts;
}

}  // namespace nlab::testing
