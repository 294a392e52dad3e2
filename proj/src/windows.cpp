#include "nlab/windows.hpp"

#include <algorithm>
#include <cmath>

#include "nlab/errors.hpp"
#include "nlab/growth.hpp"

namespace nlab {

double SampledFunction::at(double x) const {
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return v.front();
    return v[static_cast<std::size_t>(std::distance(t.begin(), it)) - 1];
}

double SampledFunction::right_of(double x) const {
    auto it = std::lower_bound(t.begin(), t.end(), x);
    if (it == t.end()) return v.back();
    return v[static_cast<std::size_t>(std::distance(t.begin(), it))];
}

double SampledFunction::max_gap() const {
    double g = std::max(t.front() - a, b - t.back());
    for (std::size_t i = 0; i + 1 < t.size(); ++i) g = std::max(g, t[i + 1] - t[i]);
    return g;
}

PlateauResult find_plateau(const SampledFunction& f) {
    if (f.t.size() < 2 || f.t.size() != f.v.size())
        throw PreconditionError("sampled function needs matching t/v with >= 2 samples");
    if (!(f.a < f.b)) throw PreconditionError("empty interval");
    for (std::size_t i = 0; i + 1 < f.t.size(); ++i) {
        if (!(f.t[i] < f.t[i + 1])) throw PreconditionError("sample points must increase");
        if (f.v[i + 1] < f.v[i]) throw PreconditionError("sampled function must be nondecreasing");
    }
    if (f.v.front() < M_E * (1.0 - 1e-12))
        throw PreconditionError("plateau lemma needs f >= e on [a,b]; got min " +
                                std::to_string(f.v.front()));
    const double len = f.b - f.a;
    const double fb = f.v.back();
    const double need = len / (40.0 * std::log(fb) * std::log(fb));
    if (f.max_gap() >= need)
        throw PreconditionError("sampling too coarse for the plateau walk: gap " +
                                std::to_string(f.max_gap()) + " >= " + std::to_string(need));

    const double mid = 0.5 * (f.a + f.b);
    double xi = f.a;
    while (true) {
        const double N = f.at(xi);
        const double logN = std::log(N);
        const double step = len / (10.0 * logN * logN);
        const double xnext = xi + step;
        if (!(xnext < mid)) break;
        // Monotonicity reduces the sandwich on [xi, xnext] to its right end;
        // compare against the next sample at or beyond xnext so the window
        // stays valid under arbitrarily dense re-sampling.
        if (f.right_of(xnext) <= M_E * N * (1.0 + 1e-12)) {
            PlateauResult res;
            res.x = 0.5 * (xi + xnext);
            res.N = N;
            res.window_lo = xi;
            res.window_hi = xnext;
            return res;
        }
        xi = xnext;
    }
    // Unreachable for genuinely monotone inputs: each rejection multiplies
    // f(x_i) by e, and sum_i 1/(10 i^2) < 1/2 keeps the walk left of mid.
    throw Error("plateau walk exhausted [a, (a+b)/2) without a valid window");
}

LayerWindow find_frequency_window(const FieldOracle& f, const Point& p, double r, int order,
                                  int verification_samples, double gate) {
    if (r <= 0) throw PreconditionError("radius must be positive");
    if (!(gate >= 2.0 * M_E))
        throw PreconditionError("frequency gate must be at least 2e");
    f.check_ball(p, 2.0 * r);
    if (order == 0) order = suggested_order(f, 2.0 * r, 32);
    verification_samples = std::max(verification_samples, 32);

    const double beta_gate = frequency_beta(f, p, 0.5 * r, order);
    if (!(beta_gate > gate))
        throw LowFrequencyError("beta(p, r/2) = " + std::to_string(beta_gate) +
                                " <= " + std::to_string(gate) +
                                "; use the naive lower-bound path");

    // Running-max envelope of beta on (0, t], seeded below r.
    double seed = beta_gate;
    for (int j = 4; j >= 1; --j)
        seed = std::max(seed, frequency_beta(f, p, r * std::ldexp(1.0, -j), order));

    auto envelope_samples = [&](int count) {
        SampledFunction sf;
        sf.a = r;
        sf.b = 2.0 * r;
        sf.t.resize(static_cast<std::size_t>(count));
        sf.v.resize(static_cast<std::size_t>(count));
        double run = seed;
        for (int i = 0; i < count; ++i) {
            const double t = r + (static_cast<double>(i) / (count - 1)) * r;
            run = std::max(run, frequency_beta(f, p, t, order));
            sf.t[static_cast<std::size_t>(i)] = t;
            sf.v[static_cast<std::size_t>(i)] = run;
        }
        return sf;
    };

    // Coarse pass to size the grid from the plateau lemma's gap requirement.
    const SampledFunction coarse = envelope_samples(17);
    const double fb = coarse.v.back();
    const int count =
        std::max(65, static_cast<int>(std::ceil(60.0 * std::log(fb) * std::log(fb))) + 1);
    const SampledFunction env = envelope_samples(count);

    const PlateauResult plateau = find_plateau(env);
    LayerWindow win;
    win.s = plateau.x;
    win.N = 0.5 * plateau.N;
    win.rel_halfwidth = 1.0 / (1000.0 * std::log(win.N) * std::log(win.N));
    win.verification_samples = verification_samples;
    if (win.N < 0.5 * gate)
        throw Error("frequency window level N = " + std::to_string(win.N) + " below gate/2 = " +
                    std::to_string(0.5 * gate) + "; gate should have prevented this");

    auto sandwich_holds = [&](double w) {
        for (int i = 0; i < verification_samples; ++i) {
            const double t =
                win.s * (1.0 - w + 2.0 * w * (i + 0.5) / verification_samples);
            if (t <= 0 || p.norm() + t > f.domain_radius()) return false;
            const double b = frequency_beta(f, p, t, order);
            if (b < win.N || b > 2.0 * M_E * win.N) return false;
        }
        return true;
    };

    if (!sandwich_holds(win.rel_halfwidth))
        throw Error("frequency sandwich failed on the paper window (quadrature order " +
                    std::to_string(order) + " too low?)");

    // Also report the widest symmetric relative window that still verifies.
    double grown = win.rel_halfwidth;
    while (grown < 0.5) {
        const double next = std::min(0.5, grown * 1.6);
        if (!sandwich_holds(next)) break;
        grown = next;
    }
    win.max_rel_halfwidth = grown;
    return win;
}

}  // namespace nlab
