#include "nlab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

namespace {

double sphere_area(int n, double r) {
    return (n == 2) ? 2.0 * M_PI * r : 4.0 * M_PI * r * r;
}

void check_floor(const SphereMoments& m, int n, double r) {
    const double rel_floor = 1e-14 * m.max_abs * m.max_abs * sphere_area(n, r);
    if (m.H <= 1e-300 || m.H <= rel_floor)
        throw QuadratureFloorError("surface integral of u^2 at quadrature floor (H = " +
                                   std::to_string(m.H) + "); field is zero on the sphere to precision");
}

// ---------------------------------------------------------------------------
// Deterministic unit sample grids, cached per (dim, resolution).
//
// Grids are expressed in unit coordinates and mapped as center + R * w, so
// sup estimates over concentric balls scale exactly for homogeneous fields.

const std::vector<Point>& unit_ball_grid(int dim, int res) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Point>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, res);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<Point> pts;
    pts.push_back(Point::zero(dim));
    if (dim == 2) {
        for (int j = 1; j <= res; ++j) {
            const double rho = static_cast<double>(j) / res;
            const int na = 8 * j;
            const double off = (j % 2) ? 0.5 : 0.0;
            for (int a = 0; a < na; ++a) {
                const double t = 2.0 * M_PI * (a + off) / na;
                pts.emplace_back(rho * std::cos(t), rho * std::sin(t));
            }
        }
    } else {
        for (int j = 1; j <= res; ++j) {
            const double rho = static_cast<double>(j) / res;
            const int count = std::max(16, 4 * j * j);
            for (const Point& w : fibonacci_sphere(count))
                pts.emplace_back(rho * w[0], rho * w[1], rho * w[2]);
        }
    }
    return cache.emplace(key, std::move(pts)).first->second;
}

const std::vector<Point>& unit_cube_grid(int dim, int res) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Point>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, res);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    // Inclusive lattice in [0,1]^dim: corners participate.
    std::vector<Point> pts;
    const int m = res + 1;
    if (dim == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                pts.emplace_back(static_cast<double>(i) / res, static_cast<double>(j) / res);
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    pts.emplace_back(static_cast<double>(i) / res, static_cast<double>(j) / res,
                                     static_cast<double>(k) / res);
    }
    return cache.emplace(key, std::move(pts)).first->second;
}

// Region adapters: map unit coordinates to ambient points and clamp ascent
// moves back into the region.
struct BallRegion {
    BallSpec ball;
    int dim() const { return ball.center.n; }
    const std::vector<Point>& grid(int res) const { return unit_ball_grid(dim(), res); }
    Point at(const Point& w) const {
        Point p = ball.center;
        for (int i = 0; i < p.n; ++i) p[i] += ball.radius * w[i];
        return p;
    }
    Point clamp(Point w) const {
        const double n2 = w.norm2();
        if (n2 > 1.0) w *= 1.0 / std::sqrt(n2);
        return w;
    }
};

struct CubeRegion {
    CubeSpec cube;
    int dim() const { return cube.dim(); }
    const std::vector<Point>& grid(int res) const { return unit_cube_grid(dim(), res); }
    Point at(const Point& w) const {
        Point p = cube.min_corner;
        for (int i = 0; i < p.n; ++i) p[i] += cube.side * w[i];
        return p;
    }
    Point clamp(Point w) const {
        for (int i = 0; i < w.n; ++i) w[i] = std::clamp(w[i], 0.0, 1.0);
        return w;
    }
};

struct BoxRegion {
    OrientedBox box;
    int dim() const { return box.dim; }
    const std::vector<Point>& grid(int res) const { return unit_cube_grid(dim(), res); }
    Point at(const Point& w) const {
        std::array<double, 4> local{};
        for (int a = 0; a < box.dim; ++a)
            local[a] = (2.0 * w[a] - 1.0) * box.half_extents[a];
        return box.at(local);
    }
    Point clamp(Point w) const {
        for (int i = 0; i < w.n; ++i) w[i] = std::clamp(w[i], 0.0, 1.0);
        return w;
    }
};

template <class Region, bool Serial>
double sup_norm_impl(const FieldOracle& f, const Region& region, int resolution, double rel_tol) {
    if (resolution < 2) throw PreconditionError("sup_norm resolution must be >= 2");
    const int n = region.dim();
    if (n != f.dim()) throw PreconditionError("region dimension does not match field");

    auto level_estimate = [&](int res) {
        const auto& grid = region.grid(res);
        const std::int64_t m = static_cast<std::int64_t>(grid.size());
        auto term = [&](std::int64_t i) { return std::abs(f.value(region.at(grid[i]))); };
        par::MaxResult best = Serial ? par::block_max_serial(m, term) : par::block_max(m, term);

        // Local coordinate ascent from the argmax, in unit coordinates.
        Point w = grid[static_cast<std::size_t>(best.index)];
        double v = best.value;
        double step = 1.0 / res;
        for (int iter = 0; iter < 200 && step > 1e-12; ++iter) {
            bool improved = false;
            for (int a = 0; a < n; ++a) {
                for (double s : {+1.0, -1.0}) {
                    Point wt = w;
                    wt[a] += s * step;
                    wt = region.clamp(wt);
                    const double vt = std::abs(f.value(region.at(wt)));
                    if (vt > v) {
                        v = vt;
                        w = wt;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        return v;
    };

    double best = level_estimate(resolution);
    int res = resolution;
    for (int pass = 0; pass < 5; ++pass) {
        res *= 2;
        const double next = std::max(best, level_estimate(res));
        const double change = next - best;
        best = next;
        if (change <= rel_tol * std::max(best, 1e-300)) break;
    }
    return best;
}

}  // namespace

double FrequencyProfile::identity_residual() const {
    if (samples.size() < 2) return 0.0;
    double integral = 0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double dlog = std::log(samples[i + 1].r / samples[i].r);
        integral += 0.5 * (samples[i].beta + samples[i + 1].beta) * dlog;
    }
    const double lhs = std::log(samples.back().H / samples.front().H);
    return std::abs(lhs - 2.0 * integral);
}

double surface_H(const FieldOracle& f, const Point& x, double r, int order) {
    const SphereMoments m = sphere_moments(f, x, r, order);
    if (m.H < 0) throw QuadratureFloorError("negative surface integral");
    return m.H;
}

double frequency_beta(const FieldOracle& f, const Point& x, double r, int order) {
    const SphereMoments m = sphere_moments(f, x, r, order);
    check_floor(m, f.dim(), r);
    return 0.5 * (f.dim() - 1) + r * m.flux / m.H;
}

FrequencyProfile frequency_profile(const FieldOracle& f, const Point& x, double r_min,
                                   double r_max, int count, int order, double residual_tol) {
    if (!(0 < r_min && r_min < r_max)) throw PreconditionError("need 0 < r_min < r_max");
    if (count < 2) throw PreconditionError("profile needs count >= 2");
    f.check_ball(x, r_max * (1.0 + 1e-5));
    if (order == 0) order = suggested_order(f, r_max, 32);

    const int max_count = std::max(count, 8192);
    const int max_order = order * 4;

    FrequencyProfile profile;
    profile.center = x;
    while (true) {
        profile.samples.clear();
        profile.samples.resize(count);
        profile.quadrature_order = order;
        const double lmin = std::log(r_min), lmax = std::log(r_max);
        // One frequency evaluation is itself a parallel quadrature; keep the
        // radius loop serial so the inner kernel gets the threads.
        for (int i = 0; i < count; ++i) {
            const double t = static_cast<double>(i) / (count - 1);
            const double r = (i == 0) ? r_min
                           : (i == count - 1) ? r_max
                                              : std::exp(lmin + t * (lmax - lmin));
            const SphereMoments m = sphere_moments(f, x, r, order);
            check_floor(m, f.dim(), r);
            profile.samples[static_cast<std::size_t>(i)] = {
                r, m.H, 0.5 * (f.dim() - 1) + r * m.flux / m.H};
        }

        const double residual = profile.identity_residual();
        if (residual <= residual_tol) return profile;
        if (count < max_count) {
            count = 2 * count - 1;  // log-midpoint insertion keeps prior radii
        } else if (order < max_order) {
            order *= 2;
        } else {
            throw BudgetError("frequency profile residual " + std::to_string(residual) +
                              " did not reach tolerance within budget");
        }
    }
}

double sup_norm(const FieldOracle& f, const BallSpec& ball, int resolution, double rel_tol) {
    f.check_ball(ball.center, ball.radius);
    return sup_norm_impl<BallRegion, false>(f, BallRegion{ball}, resolution, rel_tol);
}

double sup_norm_serial(const FieldOracle& f, const BallSpec& ball, int resolution, double rel_tol) {
    f.check_ball(ball.center, ball.radius);
    return sup_norm_impl<BallRegion, true>(f, BallRegion{ball}, resolution, rel_tol);
}

double sup_norm(const FieldOracle& f, const CubeSpec& cube, int resolution, double rel_tol) {
    f.check_ball(cube.center(), 0.5 * cube.diam());
    return sup_norm_impl<CubeRegion, false>(f, CubeRegion{cube}, resolution, rel_tol);
}

double sup_norm(const FieldOracle& f, const OrientedBox& box, int resolution, double rel_tol) {
    f.check_ball(box.center, 0.5 * box.diam());
    return sup_norm_impl<BoxRegion, false>(f, BoxRegion{box}, resolution, rel_tol);
}

double doubling_index_ball(const FieldOracle& f, const Point& x, double r, int resolution) {
    f.check_ball(x, 2.0 * r);
    const double inner = sup_norm(f, BallSpec{x, r}, resolution);
    if (inner <= 1e-300)
        throw QuadratureFloorError("inner sup at floor; field is zero on B(x,r) to precision");
    const double outer = sup_norm(f, BallSpec{x, 2.0 * r}, resolution);
    return std::log2(outer / inner);
}

namespace {

// Shared candidate evaluation for axis-aligned and oriented cubes. The
// candidate set is a cell-centered lattice of centers (odd counts include the
// cube center) crossed with dyadic radii diam * 2^-j.
template <class CenterAt>
double cube_index_over_candidates(const FieldOracle& f, int dim, double diam,
                                  const CenterAt& center_at, const CubeIndexParams& params) {
    if (params.centers_per_side < 1) throw PreconditionError("centers_per_side must be >= 1");
    if (params.radii_count < 1) throw PreconditionError("radii_count must be >= 1");
    if (params.first_radius_exponent < 0)
        throw PreconditionError("first_radius_exponent must be >= 0");
    const int c = params.centers_per_side;
    const double inflate = 10.0 * dim;
    const double r_top = diam * std::ldexp(1.0, -params.first_radius_exponent);

    std::vector<Point> centers;
    const int total = static_cast<int>(std::pow(c, dim));
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        Point w = Point::zero(dim);
        for (int a = 0; a < dim; ++a) {
            w[a] = (rem % c + 0.5) / c;
            rem /= c;
        }
        centers.push_back(center_at(w));
    }
    for (const Point& x : centers) f.check_ball(x, inflate * r_top);

    const std::int64_t m = static_cast<std::int64_t>(centers.size()) * params.radii_count;
    std::vector<double> vals(m, 0.0);
    par::parallel_for_dynamic(m, [&](std::int64_t i) {
        const Point& x = centers[static_cast<std::size_t>(i / params.radii_count)];
        const double r = r_top * std::ldexp(1.0, -static_cast<int>(i % params.radii_count));
        const double inner = sup_norm(f, BallSpec{x, r}, params.sup_resolution, params.sup_rel_tol);
        const double outer =
            sup_norm(f, BallSpec{x, inflate * r}, params.sup_resolution, params.sup_rel_tol);
        vals[i] = (inner <= 1e-300) ? std::numeric_limits<double>::infinity()
                                    : std::log(outer / inner);
    });
    double best = -std::numeric_limits<double>::infinity();
    for (double v : vals) best = std::max(best, v);
    return best;
}

}  // namespace

double doubling_index_cube(const FieldOracle& f, const CubeSpec& Q, const CubeIndexParams& params) {
    auto center_at = [&](const Point& w) {
        Point p = Q.min_corner;
        for (int i = 0; i < p.n; ++i) p[i] += Q.side * w[i];
        return p;
    };
    return cube_index_over_candidates(f, Q.dim(), Q.diam(), center_at, params);
}

double doubling_index_cube(const FieldOracle& f, const OrientedBox& cube,
                           const CubeIndexParams& params) {
    auto center_at = [&](const Point& w) {
        std::array<double, 4> local{};
        for (int a = 0; a < cube.dim; ++a)
            local[a] = (2.0 * w[a] - 1.0) * cube.half_extents[a];
        return cube.at(local);
    };
    return cube_index_over_candidates(f, cube.dim, cube.diam(), center_at, params);
}

}  // namespace nlab
