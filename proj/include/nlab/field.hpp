#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlab/errors.hpp"
#include "nlab/geometry.hpp"

namespace nlab {

enum class FieldKind { HarmonicPolynomial, TorusEigenfunction, Lift };

std::string to_string(FieldKind k);

/// One basis element of a harmonic polynomial.
///
/// n = 3: degree = l, and m in [-l, l] selects the real solid harmonic
///   m >= 0 -> Re B_l^m,  m < 0 -> Im B_l^|m|,
/// where B_l^m is generated by the Legendre recurrence seeded with the
/// sectoral polynomial B_m^m = (x + iy)^m, so that e.g. B_2^2 has
/// Re = x^2 - y^2 and Im = 2xy.
///
/// n = 2: only sectoral elements exist, |m| = degree; m >= 0 selects
/// Re (x1 + i x2)^degree and m < 0 selects the imaginary part.
struct HarmonicTerm {
    int degree = 0;
    int m = 0;
    double weight = 0;
};

/// One trigonometric mode of a flat-torus eigenfunction: weight * trig(k.x).
struct TorusMode {
    std::vector<int> k;
    double weight = 0;
    bool sine = true;
};

/// An exactly evaluatable scalar field with analytic metadata.
/// Immutable after construction; evaluation is pure and thread-safe.
class FieldOracle {
public:
    virtual ~FieldOracle() = default;

    int dim() const { return dim_; }
    FieldKind kind() const { return kind_; }
    std::optional<int> degree() const { return degree_; }
    std::optional<double> eigenvalue() const { return eigenvalue_; }
    double domain_radius() const { return domain_radius_; }

    /// Closed-form value at p. Throws DomainError outside the declared ball.
    double value(const Point& p) const {
        check_point(p);
        return eval(p);
    }
    double operator()(const Point& p) const { return value(p); }

    virtual bool has_gradient() const { return false; }
    virtual Point gradient(const Point&) const {
        throw Error("oracle has no analytic gradient");
    }

    /// Largest trigonometric degree of the field restricted to a sphere of
    /// radius r; drives exact quadrature order selection.
    virtual double sphere_bandwidth(double r) const = 0;

    virtual nlohmann::json to_json() const = 0;
    static std::shared_ptr<const FieldOracle> from_json(const nlohmann::json& j);

    void check_point(const Point& p) const {
        if (p.n != dim_)
            throw PreconditionError("point dimension " + std::to_string(p.n) +
                                    " does not match field dimension " + std::to_string(dim_));
        double r = p.norm();
        if (r > domain_radius_ * (1.0 + 1e-9))
            throw DomainError("point at radius " + std::to_string(r) +
                              " outside declared domain radius " + std::to_string(domain_radius_));
    }
    void check_ball(const Point& center, double radius) const {
        if (center.n != dim_)
            throw PreconditionError("ball center dimension mismatch");
        double reach = center.norm() + radius;
        if (reach > domain_radius_ * (1.0 + 1e-9))
            throw DomainError("ball reaches radius " + std::to_string(reach) +
                              " outside declared domain radius " + std::to_string(domain_radius_));
    }

protected:
    FieldOracle(int dim, FieldKind kind, double domain_radius)
        : dim_(dim), kind_(kind), domain_radius_(domain_radius) {}
    virtual double eval(const Point& p) const = 0;

    int dim_;
    FieldKind kind_;
    double domain_radius_;
    std::optional<int> degree_;
    std::optional<double> eigenvalue_;
};

using OraclePtr = std::shared_ptr<const FieldOracle>;

inline constexpr double kDefaultDomainRadius = 4.0;

/// Finite combination of solid harmonics; exactly harmonic by construction.
OraclePtr make_harmonic_polynomial(int n, const std::vector<HarmonicTerm>& terms,
                                   double domain_radius = kDefaultDomainRadius);

/// Single homogeneous harmonic of the given degree (convenience for tests
/// and experiments; n=2 uses Re z^d, n=3 uses Re B_d^min(d,2)).
OraclePtr make_homogeneous_harmonic(int n, int degree,
                                    double domain_radius = kDefaultDomainRadius);

/// Finite trigonometric combination with |k|^2 = lambda for every mode.
OraclePtr make_torus_eigenfunction(int n, const std::vector<TorusMode>& modes,
                                   double domain_radius = kDefaultDomainRadius);

/// Harmonic lift h(x,t) = u(x) exp(sqrt(lambda) t) on R^{n+1}.
OraclePtr lift(const OraclePtr& u);

/// Random harmonic polynomial: independent standard-normal weights on every
/// basis element of degree 1..max_degree (seeded, reproducible).
OraclePtr make_random_harmonic(int n, int max_degree, std::uint64_t seed,
                               bool include_constant = false,
                               double domain_radius = kDefaultDomainRadius);

}  // namespace nlab
