#include "nlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

namespace {

GaussLegendre compute_gauss_legendre(int n) {
    GaussLegendre g;
    g.x.resize(n);
    g.w.resize(n);
    // Newton iteration from the Chebyshev initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        g.x[i] = -x;
        g.x[n - 1 - i] = x;
        g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return g;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

namespace {

// The normal derivative comes from the analytic gradient when the oracle has
// one, otherwise central differences with step r * 1e-6.
template <bool Serial>
SphereMoments sphere_moments_impl(const FieldOracle& f, const Point& x, double r, int order) {
    if (order < 8) throw PreconditionError("quadrature order must be >= 8");
    if (r <= 0) throw PreconditionError("sphere radius must be positive");
    f.check_ball(x, r * (1.0 + 1e-5));
    const int n = f.dim();
    const bool analytic = f.has_gradient();
    const double h = r * 1e-6;

    auto node_terms = [&](const Point& nu) {
        Point p = x;
        for (int i = 0; i < n; ++i) p[i] += r * nu[i];
        const double u = f.value(p);
        double dn;
        if (analytic) {
            dn = dot(f.gradient(p), nu);
        } else {
            Point pp = p, pm = p;
            for (int i = 0; i < n; ++i) {
                pp[i] += h * nu[i];
                pm[i] -= h * nu[i];
            }
            dn = (f.value(pp) - f.value(pm)) / (2.0 * h);
        }
        return std::array<double, 3>{u * u, u * dn, std::abs(u)};
    };

    SphereMoments m;
    if (n == 2) {
        const int M = order;
        const double dtheta = 2.0 * M_PI / M;
        std::vector<double> us(M), fl(M), mx(M);
        auto body = [&](std::int64_t i) {
            const double t = dtheta * static_cast<double>(i);
            Point nu(std::cos(t), std::sin(t));
            auto v = node_terms(nu);
            us[i] = v[0];
            fl[i] = v[1];
            mx[i] = v[2];
        };
        if (Serial)
            par::serial_for(M, body);
        else
            par::parallel_for(M, body);
        double H = 0, flux = 0, mxv = 0;
        for (int i = 0; i < M; ++i) {
            H += us[i];
            flux += fl[i];
            mxv = std::max(mxv, mx[i]);
        }
        m.H = H * dtheta * r;
        m.flux = flux * dtheta * r;
        m.max_abs = mxv;
    } else if (n == 3) {
        const int nt = order, np = 2 * order;
        const auto& gl = gauss_legendre(nt);
        const double dphi = 2.0 * M_PI / np;
        const std::int64_t total = static_cast<std::int64_t>(nt) * np;
        std::vector<double> us(total), fl(total), mx(total);
        auto body = [&](std::int64_t idx) {
            const int i = static_cast<int>(idx / np), j = static_cast<int>(idx % np);
            const double mu = gl.x[i], s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            const double phi = dphi * j;
            Point nu(s * std::cos(phi), s * std::sin(phi), mu);
            auto v = node_terms(nu);
            us[idx] = v[0] * gl.w[i];
            fl[idx] = v[1] * gl.w[i];
            mx[idx] = v[2];
        };
        if (Serial)
            par::serial_for(total, body);
        else
            par::parallel_for(total, body);
        double H = 0, flux = 0, mxv = 0;
        for (std::int64_t i = 0; i < total; ++i) {
            H += us[i];
            flux += fl[i];
            mxv = std::max(mxv, mx[i]);
        }
        m.H = H * dphi * r * r;
        m.flux = flux * dphi * r * r;
        m.max_abs = mxv;
    } else {
        throw PreconditionError("sphere quadrature supports n in {2,3}");
    }
    return m;
}

}  // namespace

SphereMoments sphere_moments(const FieldOracle& f, const Point& x, double r, int order) {
    return sphere_moments_impl<false>(f, x, r, order);
}

SphereMoments sphere_moments_serial(const FieldOracle& f, const Point& x, double r, int order) {
    return sphere_moments_impl<true>(f, x, r, order);
}

int suggested_order(const FieldOracle& f, double r, int minimum) {
    const double bw = f.sphere_bandwidth(r);
    // Exactness needs M > 2*bw on the circle and order > bw in the polar rule.
    int order = (f.dim() == 2) ? static_cast<int>(2.0 * bw) + 16 : static_cast<int>(bw) + 12;
    order = std::max(order, minimum);
    return std::min(order, 4096);
}

std::vector<Point> fibonacci_sphere(int count) {
    std::vector<Point> pts;
    pts.reserve(count);
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = ga * i;
        pts.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
    }
    return pts;
}

}  // namespace nlab
