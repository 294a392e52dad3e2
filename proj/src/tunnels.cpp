#include "nlab/tunnels.hpp"

#include <algorithm>
#include <cmath>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"
#include "nlab/quadrature.hpp"

namespace nlab {

TunnelParams TunnelParams::desk(double N) {
    TunnelParams p;
    p.N = N;
    // delta below ~0.46 keeps every cube outside the region where the local
    // doubling index of a frequency-N field exceeds the good-tunnel rule.
    p.delta = std::min(0.45, 3.0 / std::sqrt(N));
    p.cubes_per_tunnel = 4;
    // Transverse cap: keep |u| on the box within ~10^4.8 K so bisected zeros
    // can still beat the 1e-10 K soundness tolerance. The sup grows like
    // (rho/s)^(2N), so the outer corners stay under rho/s = 10^(2.4/N); a
    // fixed cap binds at small N where that bound opens up.
    const double kappa = std::pow(10.0, 2.4 / N);
    const double t_half = std::min(std::sqrt(kappa * kappa - 1.0), 0.65);
    p.tunnels_per_side = std::max(
        2, static_cast<int>(std::lround(2.0 * p.cubes_per_tunnel * t_half / p.delta)));
    p.paper_constants = false;
    return p;
}

TunnelParams TunnelParams::paper(double N, int n) {
    const double lnN = std::log(N);
    TunnelParams p;
    p.N = N;
    p.delta = 1.0 / (1e8 * n * n * lnN * lnN);
    p.tunnels_per_side = std::max(1, static_cast<int>(std::floor(std::sqrt(N))));
    const double fl = std::floor(lnN);
    p.cubes_per_tunnel = std::max(
        1, static_cast<int>(std::floor(std::sqrt(N)) * fl * fl * fl * fl));
    p.paper_constants = true;
    return p;
}

std::pair<Point, double> max_on_sphere(const FieldOracle& f, const Point& p, double s,
                                       int resolution) {
    if (s <= 0) throw PreconditionError("sphere radius must be positive");
    if (resolution < 8) throw PreconditionError("sphere resolution must be >= 8");
    f.check_ball(p, s);
    const int n = f.dim();
    if (n != 2 && n != 3) throw PreconditionError("sphere maximum supports n in {2,3}");

    std::vector<Point> dirs;
    if (n == 2) {
        dirs.reserve(static_cast<std::size_t>(resolution));
        for (int i = 0; i < resolution; ++i) {
            const double t = 2.0 * M_PI * i / resolution;
            dirs.emplace_back(std::cos(t), std::sin(t));
        }
    } else {
        dirs = fibonacci_sphere(resolution * resolution);
    }

    auto value_at = [&](const Point& w) {
        Point q = p;
        for (int i = 0; i < n; ++i) q[i] += s * w[i];
        return std::abs(f.value(q));
    };
    const auto best = par::block_max(static_cast<std::int64_t>(dirs.size()),
                                     [&](std::int64_t i) { return value_at(dirs[i]); });
    if (best.value <= 1e-300)
        throw QuadratureFloorError("|u| vanishes on the sphere to working precision");

    // Tangential pattern ascent, renormalized to the sphere.
    Point w = dirs[static_cast<std::size_t>(best.index)];
    double v = best.value;
    double step = (n == 2) ? 2.0 * M_PI / resolution : 2.0 / resolution;
    for (int iter = 0; iter < 200 && step > 1e-13; ++iter) {
        bool improved = false;
        for (int a = 0; a < n; ++a) {
            for (double sgn : {+1.0, -1.0}) {
                Point wt = w;
                wt[a] += sgn * step;
                const double norm = wt.norm();
                if (norm <= 0) continue;
                wt *= 1.0 / norm;
                const double vt = value_at(wt);
                if (vt > v) {
                    v = vt;
                    w = wt;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    Point q = p;
    for (int i = 0; i < n; ++i) q[i] += s * w[i];
    return {q, v};
}

TunnelGeometry build_tunnels(const FieldOracle& f, const Point& p, const Point& x,
                             const TunnelParams& params) {
    const int n = f.dim();
    if (n != 2 && n != 3) throw PreconditionError("tunnels support n in {2,3}");
    if (!(params.delta > 0 && params.delta < 1))
        throw PreconditionError("tunnel delta must lie in (0,1)");
    if (params.paper_constants && params.delta > 1e-6)
        throw PreconditionError("paper-constants geometry requires delta <= 1e-6");
    if (params.tunnels_per_side < 1 || params.cubes_per_tunnel < 1)
        throw PreconditionError("tunnel subdivision counts must be >= 1");

    const double s = dist(x, p);
    if (s <= 0) throw PreconditionError("sphere maximum coincides with the center");

    TunnelGeometry geom;
    geom.x = x;
    // Nearest point on the inner sphere: the radial projection.
    geom.x_tilde = p + (1.0 - params.delta) * (x - p);
    const double d = params.delta * s;
    const Point a1 = (1.0 / d) * (x - geom.x_tilde);

    geom.box.dim = n;
    geom.box.center = 0.5 * (x + geom.x_tilde);
    geom.box.axes[0] = a1;
    if (n == 2) {
        geom.box.axes[1] = Point(-a1[1], a1[0]);
    } else {
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(a1[i]) < std::abs(a1[k])) k = i;
        Point e = Point::zero(3);
        e[k] = 1.0;
        Point a2 = e - dot(e, a1) * a1;
        a2 *= 1.0 / a2.norm();
        geom.box.axes[1] = a2;
        geom.box.axes[2] = Point(a1[1] * a2[2] - a1[2] * a2[1], a1[2] * a2[0] - a1[0] * a2[2],
                                 a1[0] * a2[1] - a1[1] * a2[0]);
    }

    geom.cube_side = d / params.cubes_per_tunnel;
    geom.cubes_per_tunnel = params.cubes_per_tunnel;
    const int tps = params.tunnels_per_side;
    geom.tunnels = (n == 2) ? tps : tps * tps;
    geom.box.half_extents[0] = 0.5 * d;
    for (int a = 1; a < n; ++a) geom.box.half_extents[a] = 0.5 * tps * geom.cube_side;
    f.check_ball(geom.box.center, 0.5 * geom.box.diam());

    geom.below_resolution = geom.cube_side < 1e-9 * s;

    geom.cubes.reserve(static_cast<std::size_t>(geom.tunnels) * params.cubes_per_tunnel);
    for (int tunnel = 0; tunnel < geom.tunnels; ++tunnel) {
        const int i2 = tunnel % tps;
        const int i3 = tunnel / tps;
        for (int t = 1; t <= params.cubes_per_tunnel; ++t) {
            TunnelCube cube;
            cube.tunnel = tunnel;
            cube.t = t;
            cube.box.dim = n;
            cube.box.axes = geom.box.axes;
            for (int a = 0; a < n; ++a) cube.box.half_extents[a] = 0.5 * geom.cube_side;
            std::array<double, 4> local{};
            local[0] = -0.5 * d + (t - 0.5) * geom.cube_side;
            local[1] = -geom.box.half_extents[1] + (i2 + 0.5) * geom.cube_side;
            if (n == 3) local[2] = -geom.box.half_extents[2] + (i3 + 0.5) * geom.cube_side;
            cube.box.center = geom.box.at(local);
            geom.cubes.push_back(cube);
        }
    }
    return geom;
}

std::vector<int> classify_good_tunnels(const FieldOracle& f, const TunnelGeometry& geom,
                                       double threshold, const CubeIndexParams& params) {
    if (geom.below_resolution)
        throw PreconditionError("tunnel cubes below working resolution; not classifying");
    std::vector<double> indices(geom.cubes.size(), 0.0);
    std::vector<std::string> errors(geom.cubes.size());
    par::parallel_for_dynamic(static_cast<std::int64_t>(geom.cubes.size()), [&](std::int64_t i) {
        try {
            indices[static_cast<std::size_t>(i)] =
                doubling_index_cube(f, geom.cubes[static_cast<std::size_t>(i)].box, params);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw DomainError("tunnel cube classification failed: " + e);

    std::vector<char> good(static_cast<std::size_t>(geom.tunnels), 1);
    for (std::size_t i = 0; i < geom.cubes.size(); ++i)
        if (indices[i] > threshold) good[static_cast<std::size_t>(geom.cubes[i].tunnel)] = 0;
    std::vector<int> out;
    for (int i = 0; i < geom.tunnels; ++i)
        if (good[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

namespace {

struct CubeSampleStats {
    double vmax = -1e308, vmin = 1e308;
    Point pmax, pmin;
};

OrientedBox pair_region(const TunnelCube& a, const TunnelCube& b) {
    OrientedBox r = a.box;
    r.center = 0.5 * (a.box.center + b.box.center);
    r.half_extents[0] = a.box.half_extents[0] * 2.0;
    return r;
}

}  // namespace

std::vector<SignChangeCertificate> detect_sign_changes(const FieldOracle& f,
                                                       const TunnelGeometry& geom,
                                                       int samples_per_axis,
                                                       const std::vector<int>* tunnels) {
    if (geom.below_resolution)
        throw PreconditionError("tunnel cubes below working resolution; not sampling");
    if (samples_per_axis < 2) throw PreconditionError("need >= 2 samples per cube axis");
    const int n = f.dim();

    std::vector<char> wanted(static_cast<std::size_t>(geom.tunnels), tunnels ? 0 : 1);
    if (tunnels)
        for (int i : *tunnels) wanted[static_cast<std::size_t>(i)] = 1;

    std::vector<int> jobs;
    for (std::size_t i = 0; i < geom.cubes.size(); ++i)
        if (wanted[static_cast<std::size_t>(geom.cubes[i].tunnel)])
            jobs.push_back(static_cast<int>(i));

    std::vector<CubeSampleStats> stats(geom.cubes.size());
    const int m = samples_per_axis;
    par::parallel_for_dynamic(static_cast<std::int64_t>(jobs.size()), [&](std::int64_t j) {
        const auto& cube = geom.cubes[static_cast<std::size_t>(jobs[j])];
        CubeSampleStats st;
        const int total = (n == 2) ? m * m : m * m * m;
        for (int idx = 0; idx < total; ++idx) {
            int rem = idx;
            std::array<double, 4> local{};
            for (int a = 0; a < n; ++a) {
                local[a] = (-1.0 + 2.0 * (rem % m) / (m - 1)) * cube.box.half_extents[a];
                rem /= m;
            }
            const Point q = cube.box.at(local);
            const double v = f.value(q);
            if (v > st.vmax) {
                st.vmax = v;
                st.pmax = q;
            }
            if (v < st.vmin) {
                st.vmin = v;
                st.pmin = q;
            }
        }
        stats[static_cast<std::size_t>(jobs[j])] = st;
    });

    std::vector<SignChangeCertificate> certs;
    auto cube_at = [&](int tunnel, int t) -> const TunnelCube& {
        return geom.cubes[static_cast<std::size_t>(tunnel) * geom.cubes_per_tunnel +
                          static_cast<std::size_t>(t - 1)];
    };
    for (int tunnel = 0; tunnel < geom.tunnels; ++tunnel) {
        if (!wanted[static_cast<std::size_t>(tunnel)]) continue;
        for (int t = 1; t <= geom.cubes_per_tunnel; ++t) {
            const auto& cube = cube_at(tunnel, t);
            const auto& st = stats[static_cast<std::size_t>(tunnel) * geom.cubes_per_tunnel +
                                   static_cast<std::size_t>(t - 1)];
            if (st.vmax > 0 && st.vmin < 0) {
                SignChangeCertificate c;
                c.tunnel = tunnel;
                c.t = t;
                c.pair = false;
                c.region = cube.box;
                c.p_plus = st.pmax;
                c.p_minus = st.pmin;
                c.v_plus = st.vmax;
                c.v_minus = st.vmin;
                certs.push_back(c);
            }
        }
        // Pairs of consecutive closed cubes: certify sign changes that sit on
        // (or straddle) the shared face and show inside neither single cube.
        for (int t = 1; t < geom.cubes_per_tunnel; ++t) {
            const std::size_t ia = static_cast<std::size_t>(tunnel) * geom.cubes_per_tunnel +
                                   static_cast<std::size_t>(t - 1);
            const auto& sa = stats[ia];
            const auto& sb = stats[ia + 1];
            const bool single_a = sa.vmax > 0 && sa.vmin < 0;
            const bool single_b = sb.vmax > 0 && sb.vmin < 0;
            if (single_a || single_b) continue;
            const double vmax = std::max(sa.vmax, sb.vmax);
            const double vmin = std::min(sa.vmin, sb.vmin);
            if (vmax > 0 && vmin < 0) {
                SignChangeCertificate c;
                c.tunnel = tunnel;
                c.t = t;
                c.pair = true;
                c.region = pair_region(cube_at(tunnel, t), cube_at(tunnel, t + 1));
                c.p_plus = (sa.vmax >= sb.vmax) ? sa.pmax : sb.pmax;
                c.p_minus = (sa.vmin <= sb.vmin) ? sa.pmin : sb.pmin;
                c.v_plus = vmax;
                c.v_minus = vmin;
                certs.push_back(c);
            }
        }
    }
    return certs;
}

ZeroBracket bisect_zero(const FieldOracle& f, const Point& p_plus, const Point& p_minus,
                        double tol_len) {
    double vp = f.value(p_plus), vm = f.value(p_minus);
    if (!(vp > 0 && vm < 0))
        throw PreconditionError("bisection needs strictly signed endpoints");
    ZeroBracket zb;
    zb.plus = p_plus;
    zb.minus = p_minus;
    for (int iter = 0; iter < 200; ++iter) {
        const Point mid = 0.5 * (zb.plus + zb.minus);
        const double v = f.value(mid);
        if (v > 0) {
            zb.plus = mid;
        } else if (v < 0) {
            zb.minus = mid;
        } else {
            zb.zero = mid;
            zb.value = v;
            return zb;
        }
        if (dist(zb.plus, zb.minus) <= tol_len) break;
    }
    zb.zero = 0.5 * (zb.plus + zb.minus);
    zb.value = f.value(zb.zero);
    return zb;
}

std::vector<BallSpec> pack_disjoint_balls(const FieldOracle& f,
                                          const std::vector<SignChangeCertificate>& certs,
                                          double radius, const BallSpec& container,
                                          std::vector<ZeroBracket>* zeros) {
    if (radius <= 0) throw PreconditionError("packing radius must be positive");
    std::vector<BallSpec> balls;
    for (const auto& cert : certs) {
        const double seg = dist(cert.p_plus, cert.p_minus);
        const ZeroBracket zb = bisect_zero(f, cert.p_plus, cert.p_minus, 1e-12 * seg);
        if (dist(zb.zero, container.center) + radius > container.radius) continue;
        bool disjoint = true;
        for (const auto& b : balls) {
            if (dist(zb.zero, b.center) <= 2.0 * radius) {
                disjoint = false;
                break;
            }
        }
        if (!disjoint) continue;
        balls.push_back(BallSpec{zb.zero, radius});
        if (zeros) zeros->push_back(zb);
    }
    return balls;
}

TunnelReport run_tunnel_construction(const FieldOracle& f, const Point& p, double r,
                                     const TunnelConfig& config) {
    f.check_ball(p, 2.0 * r);
    TunnelReport report;
    report.window = find_frequency_window(f, p, r, config.window_order, 32, config.beta_gate);
    const double N = report.window.N;

    TunnelParams params;
    if (config.params_override) {
        params = *config.params_override;
    } else if (config.paper_constants) {
        params = TunnelParams::paper(N, f.dim());
    } else {
        params = TunnelParams::desk(N);
    }
    params.s = report.window.s;
    params.N = N;
    report.params = params;

    auto [x, K] = max_on_sphere(f, p, report.window.s, config.sphere_resolution);
    report.max_point = x;
    report.K = K;

    report.geometry = build_tunnels(f, p, x, params);

    const int order = (config.window_order > 0) ? config.window_order
                                                : suggested_order(f, 2.0 * r, 32);
    report.beta_r = frequency_beta(f, p, r, order);
    report.beta_3r2 = frequency_beta(f, p, 1.5 * r, order);
    report.ball_radius = r / std::pow(N, config.alpha);

    if (report.geometry.below_resolution) {
        // Paper-exact constants at desk-scale N: geometry is valid but cubes
        // are far below floating-point resolution. Flag and stop.
        return report;
    }

    const double loglogN = std::max(std::log(std::log(N)), 1.0);
    report.good_threshold =
        std::max(N * std::exp2(-config.c1 * std::log(N) / loglogN), config.N0);
    // Keep the classification's inflated balls inside the frequency layer:
    // start the dyadic radii deep enough that 10 n r <= delta s / 2. At the
    // paper's asymptotic scales this holds at exponent 0 already.
    CubeIndexParams cip = config.cube_index;
    const double cube_diam = report.geometry.cube_side * std::sqrt(static_cast<double>(f.dim()));
    const double local_cap = 0.25 * params.delta * params.s;
    const double need = 10.0 * f.dim() * cube_diam / local_cap;
    if (need > 1.0)
        cip.first_radius_exponent =
            std::max(cip.first_radius_exponent, static_cast<int>(std::ceil(std::log2(need))));
    report.good_tunnels =
        classify_good_tunnels(f, report.geometry, report.good_threshold, cip);
    report.certificates =
        detect_sign_changes(f, report.geometry, config.samples_per_axis, &report.good_tunnels);

    // Pack only certificates whose zero bisects below the soundness
    // tolerance: where |u| locally dwarfs K, stepping a coordinate ulp moves
    // u by more than 1e-10 K and no representable point can satisfy it.
    std::vector<SignChangeCertificate> packable;
    for (const auto& c : report.certificates) {
        const ZeroBracket zb = bisect_zero(f, c.p_plus, c.p_minus, 1e-12 * dist(c.p_plus, c.p_minus));
        if (std::abs(zb.value) < 1e-11 * K) packable.push_back(c);
    }
    report.balls = pack_disjoint_balls(f, packable, report.ball_radius,
                                       BallSpec{p, 2.0 * r}, &report.zeros);
    return report;
}

LayerDiagnostics layer_growth_report(const FieldOracle& f, const Point& p,
                                     const LayerWindow& window, double delta,
                                     int sphere_resolution, int sup_resolution) {
    if (!(delta > 0 && delta < 1)) throw PreconditionError("layer delta must lie in (0,1)");
    const double s = window.s;
    f.check_ball(p, s * (1.0 + delta));

    LayerDiagnostics d;
    d.s = s;
    d.N = window.N;
    d.delta = delta;

    auto [x, K] = max_on_sphere(f, p, s, sphere_resolution);
    d.max_point = x;
    d.K = K;

    const int order = suggested_order(f, s * (1.0 + window.rel_halfwidth), 32);
    d.t1 = s * (1.0 - window.rel_halfwidth);
    d.t2 = s * (1.0 + window.rel_halfwidth);
    d.H1 = surface_H(f, p, d.t1, order);
    d.H2 = surface_H(f, p, d.t2, order);
    d.h_ratio_exponent = std::log(d.H2 / d.H1) / (2.0 * std::log(d.t2 / d.t1));

    const double dN = delta * d.N;
    d.sup_inner = sup_norm(f, BallSpec{p, s * (1.0 - delta)}, sup_resolution);
    d.implied_c_decay = -std::log2(d.sup_inner / K) / dN;
    d.sup_outer = sup_norm(f, BallSpec{p, s * (1.0 + delta)}, sup_resolution);
    d.implied_C_growth = std::log2(d.sup_outer / K) / dN;

    d.sup_near_max = sup_norm(f, BallSpec{x, delta * s}, sup_resolution);
    d.implied_C_near_max = std::log2(d.sup_near_max / K) / (dN + 1.0);

    // Doubling indices at probes within delta s / 4 of the maximum.
    const double probe_r = 0.25 * delta * s;
    std::vector<Point> probes = {x};
    for (int a = 0; a < f.dim(); ++a) {
        for (double sgn : {+1.0, -1.0}) {
            Point q = x;
            q[a] += sgn * probe_r;
            probes.push_back(q);
        }
    }
    d.max_doubling_near_max = 0;
    for (const Point& q : probes)
        d.max_doubling_near_max =
            std::max(d.max_doubling_near_max, doubling_index_ball(f, q, probe_r, sup_resolution));
    d.implied_C_doubling = d.max_doubling_near_max / (dN + 1.0);

    d.sup_small_ball = sup_norm(f, BallSpec{x, delta * s / (10.0 * d.N)}, sup_resolution);
    d.implied_C_small_ball =
        -std::log2(d.sup_small_ball / K) / (dN * std::log2(d.N) + 1.0);
    return d;
}

}  // namespace nlab
