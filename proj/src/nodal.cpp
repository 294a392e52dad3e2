#include "nlab/nodal.hpp"

#include <algorithm>
#include <cmath>

#include "nlab/errors.hpp"
#include "nlab/growth.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

namespace {

#include "mc_tables.inc"

// Cube corners in the Bourke convention, as (dx, dy, dz) offsets.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

struct Vec3 {
    double x = 0, y = 0, z = 0;
};
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 scale(double t, const Vec3& a) { return {t * a.x, t * a.y, t * a.z}; }
double vdot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 vcross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double vnorm(const Vec3& a) { return std::sqrt(vdot(a, a)); }

Vec3 interp_zero(const Vec3& pa, const Vec3& pb, double va, double vb) {
    const double t = va / (va - vb);
    return pa + scale(std::clamp(t, 0.0, 1.0), pb - pa);
}

// Half-space clip {q : vdot(q - plane_p, normal) <= 0}.
double clipped_segment_length(Vec3 a, Vec3 b, const Vec3& plane_p, const Vec3& normal) {
    double da = vdot(a - plane_p, normal);
    double db = vdot(b - plane_p, normal);
    if (da > 0 && db > 0) return 0;
    if (da > 0 || db > 0) {
        const Vec3 cut = interp_zero(a, b, da, db);
        if (da > 0)
            a = cut;
        else
            b = cut;
    }
    return vnorm(b - a);
}

double polygon_area(const std::vector<Vec3>& poly) {
    double area = 0;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        area += 0.5 * vnorm(vcross(poly[i] - poly[0], poly[i + 1] - poly[0]));
    return area;
}

double clipped_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& plane_p,
                             const Vec3& normal) {
    std::vector<Vec3> in = {a, b, c}, out;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Vec3& p = in[i];
        const Vec3& q = in[(i + 1) % in.size()];
        const double dp = vdot(p - plane_p, normal);
        const double dq = vdot(q - plane_p, normal);
        if (dp <= 0) out.push_back(p);
        if ((dp <= 0) != (dq <= 0)) out.push_back(interp_zero(p, q, dp, dq));
    }
    return polygon_area(out);
}

// One marching-squares cell; the ambiguous saddle cases use the asymptotic
// decider (sign of the bilinear saddle value picks the pairing).
double cell_length_2d(const std::array<Vec3, 4>& pos, const std::array<double, 4>& val,
                      bool clip, const Vec3& plane_p, const Vec3& normal) {
    int idx = 0;
    for (int i = 0; i < 4; ++i)
        if (val[i] < 0) idx |= 1 << i;
    if (idx == 0 || idx == 15) return 0;

    auto edge_pt = [&](int a, int b) { return interp_zero(pos[a], pos[b], val[a], val[b]); };
    auto seg = [&](const Vec3& a, const Vec3& b) {
        return clip ? clipped_segment_length(a, b, plane_p, normal) : vnorm(b - a);
    };

    const Vec3 e01 = (((idx >> 0) ^ (idx >> 1)) & 1) ? edge_pt(0, 1) : Vec3{};
    const Vec3 e12 = (((idx >> 1) ^ (idx >> 2)) & 1) ? edge_pt(1, 2) : Vec3{};
    const Vec3 e23 = (((idx >> 2) ^ (idx >> 3)) & 1) ? edge_pt(2, 3) : Vec3{};
    const Vec3 e30 = (((idx >> 3) ^ (idx >> 0)) & 1) ? edge_pt(3, 0) : Vec3{};

    switch (idx) {
        case 1: case 14: return seg(e30, e01);
        case 2: case 13: return seg(e01, e12);
        case 4: case 11: return seg(e12, e23);
        case 8: case 7:  return seg(e23, e30);
        case 3: case 12: return seg(e30, e12);
        case 6: case 9:  return seg(e01, e23);
        case 5: case 10: {
            const double denom = val[0] + val[2] - val[1] - val[3];
            const double saddle = (std::abs(denom) > 1e-300)
                                      ? (val[0] * val[2] - val[1] * val[3]) / denom
                                      : 0.0;
            // Corners 0,2 share one sign and 1,3 the other; the saddle sign
            // says which diagonal pair connects through the cell center.
            const bool connect02 = (idx == 5) ? (saddle < 0) : (saddle >= 0);
            if (connect02) return seg(e01, e12) + seg(e23, e30);
            return seg(e30, e01) + seg(e12, e23);
        }
        default: return 0;
    }
}

double cell_area_3d(const std::array<Vec3, 8>& pos, const std::array<double, 8>& val, bool clip,
                    const Vec3& plane_p, const Vec3& normal) {
    int idx = 0;
    for (int i = 0; i < 8; ++i)
        if (val[i] < 0) idx |= 1 << i;
    if (kMcEdgeTable[idx] == 0) return 0;

    Vec3 verts[12];
    for (int e = 0; e < 12; ++e) {
        if (kMcEdgeTable[idx] & (1 << e)) {
            const int a = kEdge[e][0], b = kEdge[e][1];
            verts[e] = interp_zero(pos[a], pos[b], val[a], val[b]);
        }
    }
    double area = 0;
    const int* tri = kMcTriTable[idx];
    for (int t = 0; tri[t] != -1; t += 3) {
        const Vec3& a = verts[tri[t]];
        const Vec3& b = verts[tri[t + 1]];
        const Vec3& c = verts[tri[t + 2]];
        area += clip ? clipped_triangle_area(a, b, c, plane_p, normal)
                     : 0.5 * vnorm(vcross(b - a, c - a));
    }
    return area;
}

struct Lattice {
    Vec3 origin;
    double h = 0;
    int cells = 0;  // per axis
};

Lattice make_lattice(const BallSpec& region, double h) {
    Lattice lat;
    lat.h = h;
    lat.cells = static_cast<int>(std::ceil(2.0 * region.radius / h)) + 2;
    lat.origin = {region.center[0] - 0.5 * lat.cells * h, region.center[1] - 0.5 * lat.cells * h,
                  (region.center.n == 3) ? region.center[2] - 0.5 * lat.cells * h : 0.0};
    return lat;
}

template <bool Serial>
double level_sweep(const FieldOracle& f, const BallSpec& region, double h) {
    const int n = f.dim();
    const Lattice lat = make_lattice(region, h);
    const int M = lat.cells;
    const Vec3 center{region.center[0], region.center[1], (n == 3) ? region.center[2] : 0.0};
    const double R = region.radius;
    const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(n));

    auto cell_term = [&](std::int64_t ci) -> double {
        int ix = static_cast<int>(ci % M);
        int iy, iz = 0;
        if (n == 2) {
            iy = static_cast<int>(ci / M);
        } else {
            iy = static_cast<int>((ci / M) % M);
            iz = static_cast<int>(ci / (static_cast<std::int64_t>(M) * M));
        }
        const Vec3 base = lat.origin + Vec3{ix * h, iy * h, iz * h};
        const Vec3 cc = base + Vec3{0.5 * h, 0.5 * h, (n == 3) ? 0.5 * h : 0.0};
        const Vec3 offc = cc - center;
        const double dc = vnorm(offc);
        if (dc - half_diag > R) return 0.0;  // cell entirely outside the ball
        const bool clip = dc + half_diag > R;
        Vec3 plane_p{}, normal{};
        if (clip) {
            normal = (dc > 1e-300) ? scale(1.0 / dc, offc) : Vec3{1, 0, 0};
            plane_p = center + scale(R, normal);
        }

        if (n == 2) {
            std::array<Vec3, 4> pos;
            std::array<double, 4> val;
            const int sq[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
            for (int i = 0; i < 4; ++i) {
                pos[i] = base + Vec3{sq[i][0] * h, sq[i][1] * h, 0};
                val[i] = f.value(Point(pos[i].x, pos[i].y));
            }
            return cell_length_2d(pos, val, clip, plane_p, normal);
        }
        std::array<Vec3, 8> pos;
        std::array<double, 8> val;
        for (int i = 0; i < 8; ++i) {
            pos[i] = base + Vec3{kCorner[i][0] * h, kCorner[i][1] * h, kCorner[i][2] * h};
            val[i] = f.value(Point(pos[i].x, pos[i].y, pos[i].z));
        }
        return cell_area_3d(pos, val, clip, plane_p, normal);
    };

    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) total *= M;
    return Serial ? par::block_sum_kahan_serial(total, cell_term)
                  : par::block_sum_kahan(total, cell_term);
}

}  // namespace

double nodal_measure_level(const FieldOracle& f, const BallSpec& region, double cell_size) {
    return level_sweep<false>(f, region, cell_size);
}

double nodal_measure_level_serial(const FieldOracle& f, const BallSpec& region,
                                  double cell_size) {
    return level_sweep<true>(f, region, cell_size);
}

NodalEstimate nodal_measure(const FieldOracle& f, const BallSpec& region, double cell_size,
                            const NodalParams& params) {
    const int n = f.dim();
    if (n != 2 && n != 3) throw PreconditionError("nodal measure supports n in {2,3}");
    if (!(cell_size > 0) || cell_size >= region.radius / 4.0)
        throw PreconditionError("cell_size must be positive and below radius/4");
    f.check_ball(region.center, region.radius * (1.0 + 1e-6) + cell_size);

    NodalEstimate est;
    est.region = region;
    double h = cell_size;
    double prev = -1;
    for (int level = 0; level < params.max_refinements; ++level) {
        std::int64_t cells = 1;
        const int M = static_cast<int>(std::ceil(2.0 * region.radius / h)) + 2;
        for (int i = 0; i < n; ++i) cells *= M;
        if (cells > params.cell_budget) break;
        const double m = nodal_measure_level(f, region, h);
        est.refinement_history.emplace_back(h, m);
        est.measure = m;
        est.cell_size = h;
        if (prev >= 0 && std::abs(m - prev) <= params.rel_tol * std::max(m, 1e-300)) {
            est.converged = true;
            break;
        }
        prev = m;
        h *= 0.5;
    }
    return est;
}

NaiveBoundRecord naive_lower_bound_check(const FieldOracle& f, const Point& x, double rho) {
    f.check_ball(x, rho * 1.01);
    const double local_sup = sup_norm(f, BallSpec{x, rho}, 24);
    if (std::abs(f.value(x)) >= 1e-10 * local_sup)
        throw PreconditionError("u(x) = " + std::to_string(f.value(x)) +
                                " is not zero relative to the local sup");

    NaiveBoundRecord rec;
    rec.rho = rho;
    rec.estimate = nodal_measure(f, BallSpec{x, rho}, rho / 16.0);
    rec.ratio = rec.estimate.measure / std::pow(rho, f.dim() - 1);
    rec.beta = frequency_beta(f, x, 0.5 * rho, suggested_order(f, rho, 32));
    rec.implied_c1 = rec.ratio * std::pow(rec.beta, f.dim() - 1);

    // One positivity and one negativity ball of radius ~ rho/beta, found by
    // sampling and verified on a denser ball sample.
    const int n = f.dim();
    auto signed_ball = [&](double sign) {
        SignedBall sb;
        double r_pn = rho / (2.0 * std::max(rec.beta, 1.0));
        std::vector<Point> dirs;
        if (n == 2) {
            for (int i = 0; i < 48; ++i)
                dirs.emplace_back(std::cos(2 * M_PI * i / 48.0), std::sin(2 * M_PI * i / 48.0));
        } else {
            dirs = fibonacci_sphere(128);
        }
        for (int attempt = 0; attempt < 6 && !sb.verified; ++attempt) {
            Point best = x;
            double best_v = -1e300;
            for (const Point& w : dirs) {
                for (int shell = 1; shell <= 12; ++shell) {
                    const double rr = (rho - r_pn) * 0.95 * shell / 12.0;
                    Point q = x;
                    for (int d = 0; d < n; ++d) q[d] += rr * w[d];
                    const double v = sign * f.value(q);
                    if (v > best_v) {
                        best_v = v;
                        best = q;
                    }
                }
            }
            if (best_v <= 0) {
                r_pn *= 0.5;
                continue;
            }
            // verify the sign on a sampled ball around the winner
            bool ok = true;
            for (const Point& w : dirs) {
                for (double fr : {0.35, 0.7, 1.0}) {
                    Point q = best;
                    for (int d = 0; d < n; ++d) q[d] += fr * r_pn * w[d];
                    if (sign * f.value(q) <= 0) ok = false;
                }
            }
            if (ok) {
                sb.ball = BallSpec{best, r_pn};
                sb.verified = true;
            } else {
                r_pn *= 0.5;
            }
        }
        return sb;
    };
    rec.positive = signed_ball(+1.0);
    rec.negative = signed_ball(-1.0);
    return rec;
}

FRatioTable f_ratio_experiment(int n, const std::vector<int>& degrees, int seeds_per_degree,
                               double rho, std::uint64_t base_seed, double domain_radius) {
    FRatioTable table;
    if (degrees.empty() || seeds_per_degree <= 0) return table;
    const int lowest = *std::min_element(degrees.begin(), degrees.end());
    for (int d : degrees) {
        for (int s = 0; s < seeds_per_degree; ++s) {
            const std::uint64_t seed = base_seed + 977 * static_cast<std::uint64_t>(d) + s;
            auto u = make_random_harmonic(n, d, seed, false, domain_radius);
            FRatioRow row;
            row.degree = d;
            row.seed = seed;
            row.beta = frequency_beta(*u, Point::zero(n), 0.5 * rho,
                                      suggested_order(*u, rho, 32));
            row.ratio = nodal_measure(*u, BallSpec{Point::zero(n), rho}, rho / 16.0).measure /
                        std::pow(rho, n - 1);
            table.rows.push_back(row);
        }
    }
    table.min_ratio = 1e300;
    table.min_ratio_low_degree = 1e300;
    for (const auto& r : table.rows) {
        table.min_ratio = std::min(table.min_ratio, r.ratio);
        if (r.degree == lowest)
            table.min_ratio_low_degree = std::min(table.min_ratio_low_degree, r.ratio);
    }
    // Trend of log2(ratio) against ln(beta)/lnln(beta), the remark's shape.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : table.rows) {
        const double t = std::log(r.beta) / std::max(std::log(std::log(r.beta)), 0.5);
        const double y = std::log2(r.ratio);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    const double m = static_cast<double>(table.rows.size());
    const double denom = m * sxx - sx * sx;
    table.trend_c6 = (std::abs(denom) > 1e-12) ? (m * sxy - sx * sy) / denom : 0.0;
    return table;
}

namespace {

// Distance from p to the nearest zero along +-e_a, detected by sign change
// over sampled steps and sharpened by bisection; infinity if none in reach.
double directional_zero_distance(const FieldOracle& u, const Point& p, double reach) {
    const double v0 = u.value(p);
    if (v0 == 0) return 0;
    const int steps = 64;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < u.dim(); ++a) {
        for (double sgn : {+1.0, -1.0}) {
            double prev_t = 0, prev_v = v0;
            for (int j = 1; j <= steps; ++j) {
                const double t = reach * j / steps;
                Point q = p;
                q[a] += sgn * t;
                const double v = u.value(q);
                if (v == 0) {
                    best = std::min(best, t);
                    break;
                }
                if ((v > 0) != (prev_v > 0)) {
                    double lo = prev_t, hi = t, vlo = prev_v;
                    for (int it = 0; it < 50; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        Point qm = p;
                        qm[a] += sgn * mid;
                        const double vm = u.value(qm);
                        if (vm == 0 || (vm > 0) == (vlo > 0)) {
                            lo = mid;
                            vlo = vm;
                        } else {
                            hi = mid;
                        }
                    }
                    best = std::min(best, 0.5 * (lo + hi));
                    break;
                }
                prev_t = t;
                prev_v = v;
            }
        }
    }
    return best;
}

std::vector<Point> probe_lattice(const BallSpec& B, int probes, int dim) {
    std::vector<Point> pts;
    if (probes <= 1) {
        pts.push_back(B.center);
        return pts;
    }
    const int m = std::max(2, static_cast<int>(std::ceil(
                                  std::pow(static_cast<double>(probes), 1.0 / dim))));
    std::int64_t total = 1;
    for (int i = 0; i < dim; ++i) total *= m;
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t rem = idx;
        Point q = B.center;
        double r2 = 0;
        for (int a = 0; a < dim; ++a) {
            const double w = (-1.0 + 2.0 * (rem % m + 0.5) / m) * B.radius;
            q[a] += w;
            r2 += w * w;
            rem /= m;
        }
        if (r2 <= B.radius * B.radius) pts.push_back(q);
    }
    return pts;
}

}  // namespace

DensityReport density_check(const FieldOracle& u, const BallSpec& B, int probes) {
    if (!u.eigenvalue()) throw PreconditionError("density check needs an eigenvalue");
    const double lambda = *u.eigenvalue();
    const double reach = 4.0 / std::sqrt(lambda);
    u.check_ball(B.center, B.radius + reach);

    const auto pts = probe_lattice(B, probes, u.dim());
    std::vector<double> gaps(pts.size(), 0.0);
    par::parallel_for(static_cast<std::int64_t>(pts.size()), [&](std::int64_t i) {
        gaps[static_cast<std::size_t>(i)] =
            directional_zero_distance(u, pts[static_cast<std::size_t>(i)], reach);
    });

    DensityReport rep;
    rep.lambda = lambda;
    rep.probe_count = static_cast<int>(pts.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (std::isinf(gaps[i])) {
            ++rep.failures;
            gaps[i] = reach;
        }
        rep.max_gap = std::max(rep.max_gap, gaps[i]);
    }

    // Sharpen the leading probes by coordinate ascent on the gap function
    // (some sit in cells clipped by the ball boundary, so one seed is not
    // enough); the visited points extend the probe set deterministically.
    if (rep.failures == 0 && pts.size() > 1) {
        std::vector<std::size_t> order(pts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (gaps[a] != gaps[b]) return gaps[a] > gaps[b];
            return a < b;
        });
        const std::size_t seeds = std::min<std::size_t>(8, order.size());
        for (std::size_t s = 0; s < seeds; ++s) {
            Point w = pts[order[s]];
            double v = gaps[order[s]];
            double step = B.radius / std::max(2.0, std::cbrt(static_cast<double>(pts.size())));
            for (int iter = 0; iter < 100 && step > 1e-9 * B.radius; ++iter) {
                bool improved = false;
                for (int a = 0; a < u.dim(); ++a) {
                    for (double sgn : {+1.0, -1.0}) {
                        Point q = w;
                        q[a] += sgn * step;
                        if (dist(q, B.center) > B.radius) continue;
                        const double g = directional_zero_distance(u, q, reach);
                        if (!std::isinf(g) && g > v) {
                            v = g;
                            w = q;
                            improved = true;
                        }
                    }
                }
                if (!improved) step *= 0.5;
            }
            rep.max_gap = std::max(rep.max_gap, v);
        }
    }
    rep.implied_C1 = rep.max_gap * std::sqrt(lambda);
    return rep;
}

OraclePtr make_pattern_eigenfunction(TorusPattern pattern, int k, double domain_radius) {
    if (k < 1) throw PreconditionError("pattern wavenumber must be positive");
    if (pattern == TorusPattern::Stripes)
        return make_torus_eigenfunction(2, {{{k, 0}, 1.0, true}}, domain_radius);
    // sin(k x1) sin(k x2) = [cos(k(x1-x2)) - cos(k(x1+x2))] / 2
    return make_torus_eigenfunction(
        2, {{{k, -k}, 0.5, false}, {{k, k}, -0.5, false}}, domain_radius);
}

std::vector<YauRow> yau_experiment(const std::vector<int>& ks, TorusPattern pattern,
                                   const BallSpec& B) {
    std::vector<YauRow> rows;
    for (int k : ks) {
        auto u = make_pattern_eigenfunction(pattern, k);
        YauRow row;
        row.k = k;
        row.lambda = *u->eigenvalue();
        const double spacing = M_PI / k;
        const double h0 = std::min(spacing / 8.0, B.radius / 8.0);
        const auto est = nodal_measure(*u, B, h0);
        row.measure = est.measure;
        row.converged = est.converged;
        row.ratio = row.measure / std::sqrt(row.lambda);

        // Disjoint zero-centered balls of radius 2/sqrt(lambda): the section-8
        // decomposition counted at desk scale.
        const double rb = 2.0 / std::sqrt(row.lambda);
        const double reach = 4.0 / std::sqrt(row.lambda);
        const auto pts = probe_lattice(B, static_cast<int>(std::pow(2.0 * B.radius / rb, 2)),
                                       u->dim());
        std::vector<Point> centers;
        for (const Point& p : pts) {
            // nearest detected zero along coordinate segments
            const double v0 = u->value(p);
            Point z = p;
            bool found = (v0 == 0);
            double bestd = std::numeric_limits<double>::infinity();
            for (int a = 0; a < 2; ++a) {
                for (double sgn : {+1.0, -1.0}) {
                    double prev_t = 0, prev_v = v0;
                    for (int j = 1; j <= 32; ++j) {
                        const double t = reach * j / 32.0;
                        Point q = p;
                        q[a] += sgn * t;
                        const double v = u->value(q);
                        if (v == 0 || (v > 0) != (prev_v > 0)) {
                            double lo = prev_t, hi = t, vlo = prev_v;
                            for (int it = 0; it < 40; ++it) {
                                const double mid = 0.5 * (lo + hi);
                                Point qm = p;
                                qm[a] += sgn * mid;
                                const double vm = u->value(qm);
                                if (vm == 0 || (vm > 0) == (vlo > 0)) {
                                    lo = mid;
                                    vlo = vm;
                                } else {
                                    hi = mid;
                                }
                            }
                            const double d = 0.5 * (lo + hi);
                            if (d < bestd) {
                                bestd = d;
                                z = p;
                                z[a] += sgn * d;
                                found = true;
                            }
                            break;
                        }
                        prev_t = t;
                        prev_v = v;
                    }
                }
            }
            if (found) centers.push_back(z);
        }
        int count = 0;
        std::vector<Point> accepted;
        for (const Point& z : centers) {
            if (dist(z, B.center) + rb > B.radius) continue;
            bool ok = true;
            for (const Point& a : accepted)
                if (dist(z, a) <= 2.0 * rb) {
                    ok = false;
                    break;
                }
            if (ok) {
                accepted.push_back(z);
                ++count;
            }
        }
        row.zero_balls = count;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nlab
