#include "nlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace nlab {

using nlohmann::json;

std::string to_string(FieldKind k) {
    switch (k) {
        case FieldKind::HarmonicPolynomial: return "harmonic-polynomial";
        case FieldKind::TorusEigenfunction: return "torus-eigenfunction";
        case FieldKind::Lift: return "lift";
    }
    return "?";
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw PreconditionError(std::string("unknown key \"") + it.key() + "\" in " + what);
    }
}

// ---------------------------------------------------------------------------
// Harmonic polynomials in the plane: combinations of Re/Im (x1 + i x2)^d.

class PlanePolynomial final : public FieldOracle {
public:
    PlanePolynomial(std::vector<HarmonicTerm> terms, double domain_radius)
        : FieldOracle(2, FieldKind::HarmonicPolynomial, domain_radius), terms_(std::move(terms)) {
        int dmax = 0;
        for (const auto& t : terms_) {
            if (t.degree < 0 || std::abs(t.m) != t.degree)
                throw PreconditionError("n=2 harmonic terms must have |m| == degree");
            if (t.degree == 0 && t.m < 0)
                throw PreconditionError("Im z^0 vanishes identically");
            dmax = std::max(dmax, t.degree);
        }
        degree_ = dmax;
        wre_.assign(dmax + 1, 0.0);
        wim_.assign(dmax + 1, 0.0);
        for (const auto& t : terms_) (t.m >= 0 ? wre_ : wim_)[t.degree] += t.weight;
    }

    bool has_gradient() const override { return true; }

    Point gradient(const Point& p) const override {
        check_point(p);
        // d/dx Re z^d = d Re z^{d-1}, d/dy Re z^d = -d Im z^{d-1}, and
        // d/dx Im z^d = d Im z^{d-1}, d/dy Im z^d =  d Re z^{d-1}.
        std::complex<double> z(p[0], p[1]), zp(1.0, 0.0);
        double gx = 0, gy = 0;
        const int dmax = *degree_;
        for (int d = 1; d <= dmax; ++d) {
            const double re = zp.real(), im = zp.imag();
            gx += d * (wre_[d] * re + wim_[d] * im);
            gy += d * (-wre_[d] * im + wim_[d] * re);
            zp *= z;
        }
        Point g(gx, gy);
        return g;
    }

    double sphere_bandwidth(double) const override { return static_cast<double>(*degree_); }

    json to_json() const override {
        json terms = json::array();
        for (const auto& t : terms_)
            terms.push_back({{"degree", t.degree}, {"m", t.m}, {"weight", t.weight}});
        return {{"kind", "harmonic-polynomial"},
                {"dim", 2},
                {"degree", *degree_},
                {"domain_radius", domain_radius_},
                {"coefficients", terms}};
    }

protected:
    double eval(const Point& p) const override {
        std::complex<double> z(p[0], p[1]), zp(1.0, 0.0);
        double u = 0;
        const int dmax = *degree_;
        for (int d = 0; d <= dmax; ++d) {
            u += wre_[d] * zp.real() + wim_[d] * zp.imag();
            zp *= z;
        }
        return u;
    }

private:
    std::vector<HarmonicTerm> terms_;
    std::vector<double> wre_, wim_;
};

// ---------------------------------------------------------------------------
// Real solid harmonics in R^3.
//
// Complex column recurrence, purely Cartesian and pole-safe:
//   B_m^m     = (x + iy)^m
//   B_{l+1}^m = ((2l+1) z B_l^m - (l+m) r^2 B_{l-1}^m) / (l - m + 1)
// Each B_l^m is a homogeneous harmonic polynomial of degree l.

class SolidPolynomial final : public FieldOracle {
public:
    SolidPolynomial(std::vector<HarmonicTerm> terms, double domain_radius)
        : FieldOracle(3, FieldKind::HarmonicPolynomial, domain_radius), terms_(std::move(terms)) {
        int lmax = 0;
        for (const auto& t : terms_) {
            if (t.degree < 0 || std::abs(t.m) > t.degree)
                throw PreconditionError("solid harmonic needs |m| <= degree");
            lmax = std::max(lmax, t.degree);
        }
        degree_ = lmax;
        const int L = lmax;
        wre_.assign(static_cast<std::size_t>((L + 1) * (L + 1)), 0.0);
        wim_.assign(static_cast<std::size_t>((L + 1) * (L + 1)), 0.0);
        for (const auto& t : terms_) {
            const int m = std::abs(t.m);
            if (t.m >= 0)
                wre_[idx(t.degree, m)] += t.weight;
            else
                wim_[idx(t.degree, m)] += t.weight;
        }
    }

    double sphere_bandwidth(double) const override { return static_cast<double>(*degree_); }

    json to_json() const override {
        json terms = json::array();
        for (const auto& t : terms_)
            terms.push_back({{"degree", t.degree}, {"m", t.m}, {"weight", t.weight}});
        return {{"kind", "harmonic-polynomial"},
                {"dim", 3},
                {"degree", *degree_},
                {"domain_radius", domain_radius_},
                {"coefficients", terms}};
    }

protected:
    double eval(const Point& p) const override {
        const int L = *degree_;
        const double x = p[0], y = p[1], z = p[2];
        const double r2 = x * x + y * y + z * z;
        const std::complex<double> xy(x, y);
        double u = 0;
        std::complex<double> sect(1.0, 0.0);  // (x+iy)^m
        for (int m = 0; m <= L; ++m) {
            std::complex<double> prev(0.0, 0.0), cur = sect;
            for (int l = m; l <= L; ++l) {
                u += wre_[idx(l, m)] * cur.real() + wim_[idx(l, m)] * cur.imag();
                const std::complex<double> next =
                    ((2.0 * l + 1.0) * z * cur - static_cast<double>(l + m) * r2 * prev) /
                    static_cast<double>(l - m + 1);
                prev = cur;
                cur = next;
            }
            sect *= xy;
        }
        return u;
    }

private:
    std::size_t idx(int l, int m) const {
        return static_cast<std::size_t>(l * (*degree_ + 1) + m);
    }

    std::vector<HarmonicTerm> terms_;
    std::vector<double> wre_, wim_;
};

// ---------------------------------------------------------------------------

class TorusEigenfunction final : public FieldOracle {
public:
    TorusEigenfunction(int n, std::vector<TorusMode> modes, double domain_radius)
        : FieldOracle(n, FieldKind::TorusEigenfunction, domain_radius), modes_(std::move(modes)) {
        if (modes_.empty()) throw PreconditionError("torus eigenfunction needs at least one mode");
        double lambda = -1;
        bool any_weight = false;
        for (const auto& mo : modes_) {
            if (static_cast<int>(mo.k.size()) != n)
                throw PreconditionError("mode vector length must equal dimension");
            double k2 = 0;
            for (int ki : mo.k) k2 += static_cast<double>(ki) * ki;
            if (lambda < 0) lambda = k2;
            if (k2 != lambda)
                throw PreconditionError("inconsistent |k|^2 across modes: " + std::to_string(k2) +
                                        " vs " + std::to_string(lambda));
            if (mo.weight != 0) any_weight = true;
        }
        if (!any_weight) throw PreconditionError("torus eigenfunction weights are all zero");
        if (lambda <= 0) throw PreconditionError("eigenvalue must be positive (|k| > 0)");
        eigenvalue_ = lambda;
    }

    bool has_gradient() const override { return true; }

    Point gradient(const Point& p) const override {
        check_point(p);
        Point g = Point::zero(dim_);
        for (const auto& mo : modes_) {
            double phase = 0;
            for (int i = 0; i < dim_; ++i) phase += mo.k[i] * p[i];
            const double d = mo.weight * (mo.sine ? std::cos(phase) : -std::sin(phase));
            for (int i = 0; i < dim_; ++i) g[i] += d * mo.k[i];
        }
        return g;
    }

    double sphere_bandwidth(double r) const override {
        return std::sqrt(*eigenvalue_) * r + 24.0;
    }

    json to_json() const override {
        json modes = json::array();
        for (const auto& mo : modes_)
            modes.push_back(
                {{"k", mo.k}, {"weight", mo.weight}, {"phase", mo.sine ? "sin" : "cos"}});
        return {{"kind", "torus-eigenfunction"},
                {"dim", dim_},
                {"eigenvalue", *eigenvalue_},
                {"domain_radius", domain_radius_},
                {"modes", modes}};
    }

    const std::vector<TorusMode>& modes() const { return modes_; }

protected:
    double eval(const Point& p) const override {
        double u = 0;
        for (const auto& mo : modes_) {
            double phase = 0;
            for (int i = 0; i < dim_; ++i) phase += mo.k[i] * p[i];
            u += mo.weight * (mo.sine ? std::sin(phase) : std::cos(phase));
        }
        return u;
    }

private:
    std::vector<TorusMode> modes_;
};

// ---------------------------------------------------------------------------

class LiftOracle final : public FieldOracle {
public:
    explicit LiftOracle(OraclePtr base)
        : FieldOracle(base->dim() + 1, FieldKind::Lift, base->domain_radius()),
          base_(std::move(base)) {
        if (base_->kind() != FieldKind::TorusEigenfunction)
            throw PreconditionError("lift requires a torus eigenfunction");
        if (!base_->eigenvalue()) throw PreconditionError("lift requires an eigenvalue");
        eigenvalue_ = base_->eigenvalue();
        sqrt_lambda_ = std::sqrt(*eigenvalue_);
    }

    bool has_gradient() const override { return true; }

    Point gradient(const Point& p) const override {
        check_point(p);
        const Point x = slice(p);
        const double e = std::exp(sqrt_lambda_ * p[dim_ - 1]);
        const Point gu = base_->gradient(x);
        Point g = Point::zero(dim_);
        for (int i = 0; i < dim_ - 1; ++i) g[i] = gu[i] * e;
        g[dim_ - 1] = sqrt_lambda_ * base_->value(x) * e;
        return g;
    }

    double sphere_bandwidth(double r) const override {
        return 2.0 * sqrt_lambda_ * r + 40.0;
    }

    json to_json() const override {
        return {{"kind", "lift"},
                {"dim", dim_},
                {"eigenvalue", *eigenvalue_},
                {"domain_radius", domain_radius_},
                {"base", base_->to_json()}};
    }

protected:
    double eval(const Point& p) const override {
        return base_->value(slice(p)) * std::exp(sqrt_lambda_ * p[dim_ - 1]);
    }

private:
    Point slice(const Point& p) const {
        Point x = Point::zero(dim_ - 1);
        for (int i = 0; i < dim_ - 1; ++i) x[i] = p[i];
        return x;
    }

    OraclePtr base_;
    double sqrt_lambda_;
};

}  // namespace

OraclePtr make_harmonic_polynomial(int n, const std::vector<HarmonicTerm>& terms,
                                   double domain_radius) {
    if (n != 2 && n != 3)
        throw PreconditionError("harmonic polynomials support n in {2,3}, got " + std::to_string(n));
    if (terms.empty()) throw PreconditionError("empty coefficient list");
    if (domain_radius <= 0) throw PreconditionError("domain_radius must be positive");
    if (n == 2) return std::make_shared<PlanePolynomial>(terms, domain_radius);
    return std::make_shared<SolidPolynomial>(terms, domain_radius);
}

OraclePtr make_homogeneous_harmonic(int n, int degree, double domain_radius) {
    if (degree < 0) throw PreconditionError("degree must be nonnegative");
    HarmonicTerm t;
    t.degree = degree;
    t.m = (n == 2) ? degree : std::min(degree, 2);
    t.weight = 1.0;
    return make_harmonic_polynomial(n, {t}, domain_radius);
}

OraclePtr make_torus_eigenfunction(int n, const std::vector<TorusMode>& modes,
                                   double domain_radius) {
    if (n < 2 || n > 3) throw PreconditionError("torus eigenfunctions support n in {2,3}");
    if (domain_radius <= 0) throw PreconditionError("domain_radius must be positive");
    return std::make_shared<TorusEigenfunction>(n, modes, domain_radius);
}

OraclePtr lift(const OraclePtr& u) { return std::make_shared<LiftOracle>(u); }

OraclePtr make_random_harmonic(int n, int max_degree, std::uint64_t seed, bool include_constant,
                               double domain_radius) {
    // Hand-rolled Box-Muller on top of mt19937_64 so weights are reproducible
    // independent of the standard library's distribution internals.
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    };
    auto normal = [&]() {
        double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };

    std::vector<HarmonicTerm> terms;
    const int d0 = include_constant ? 0 : 1;
    if (n == 2) {
        for (int d = d0; d <= max_degree; ++d) {
            terms.push_back({d, d, normal()});
            if (d > 0) terms.push_back({d, -d, normal()});
        }
    } else {
        for (int l = d0; l <= max_degree; ++l)
            for (int m = -l; m <= l; ++m) terms.push_back({l, m, normal()});
    }
    return make_harmonic_polynomial(n, terms, domain_radius);
}

OraclePtr FieldOracle::from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw PreconditionError("field document must be an object with a \"kind\" key");
    const std::string kind = j.at("kind").get<std::string>();
    const double dr = j.value("domain_radius", kDefaultDomainRadius);

    if (kind == "harmonic-polynomial") {
        check_keys(j, {"kind", "dim", "degree", "domain_radius", "coefficients", "seed"},
                   "harmonic-polynomial document");
        const int n = j.at("dim").get<int>();
        std::vector<HarmonicTerm> terms;
        for (const auto& tj : j.at("coefficients")) {
            check_keys(tj, {"degree", "m", "weight"}, "harmonic term");
            terms.push_back({tj.at("degree").get<int>(), tj.at("m").get<int>(),
                             tj.at("weight").get<double>()});
        }
        return make_harmonic_polynomial(n, terms, dr);
    }
    if (kind == "torus-eigenfunction") {
        check_keys(j, {"kind", "dim", "eigenvalue", "domain_radius", "modes", "seed"},
                   "torus-eigenfunction document");
        const int n = j.at("dim").get<int>();
        std::vector<TorusMode> modes;
        for (const auto& mj : j.at("modes")) {
            check_keys(mj, {"k", "weight", "phase"}, "torus mode");
            TorusMode mo;
            mo.k = mj.at("k").get<std::vector<int>>();
            mo.weight = mj.at("weight").get<double>();
            const std::string phase = mj.value("phase", "sin");
            if (phase != "sin" && phase != "cos")
                throw PreconditionError("mode phase must be \"sin\" or \"cos\"");
            mo.sine = (phase == "sin");
            modes.push_back(std::move(mo));
        }
        return make_torus_eigenfunction(n, modes, dr);
    }
    if (kind == "lift") {
        check_keys(j, {"kind", "dim", "eigenvalue", "domain_radius", "base", "seed"},
                   "lift document");
        return lift(from_json(j.at("base")));
    }
    throw PreconditionError("unknown field kind \"" + kind + "\"");
}

}  // namespace nlab
