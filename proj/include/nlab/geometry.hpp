#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>

namespace nlab {

/// Point in R^n, n <= 4 (lifts of 3-d fields live in R^4).
/// Fixed capacity keeps evaluation loops allocation-free.
struct Point {
    std::array<double, 4> c{};
    int n = 0;

    Point() = default;
    Point(double x, double y) : c{x, y, 0.0, 0.0}, n(2) {}
    Point(double x, double y, double z) : c{x, y, z, 0.0}, n(3) {}
    Point(double x, double y, double z, double t) : c{x, y, z, t}, n(4) {}

    static Point zero(int dim) {
        Point p;
        p.n = dim;
        return p;
    }

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += c[i] * c[i];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    Point& operator+=(const Point& o) {
        for (int i = 0; i < n; ++i) c[i] += o.c[i];
        return *this;
    }
    Point& operator-=(const Point& o) {
        for (int i = 0; i < n; ++i) c[i] -= o.c[i];
        return *this;
    }
    Point& operator*=(double a) {
        for (int i = 0; i < n; ++i) c[i] *= a;
        return *this;
    }

    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    friend Point operator*(double a, Point p) { return p *= a; }

    friend double dot(const Point& a, const Point& b) {
        double s = 0;
        for (int i = 0; i < a.n; ++i) s += a.c[i] * b.c[i];
        return s;
    }
    friend double dist(const Point& a, const Point& b) { return (a - b).norm(); }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < n; ++i) {
            if (i) s += ", ";
            s += std::to_string(c[i]);
        }
        return s + ")";
    }
};

struct BallSpec {
    Point center;
    double radius = 0;

    bool contains(const Point& p) const { return dist(p, center) <= radius; }
};

/// Axis-aligned cube, dimension taken from min_corner.
struct CubeSpec {
    Point min_corner;
    double side = 0;

    int dim() const { return min_corner.n; }
    double diam() const { return side * std::sqrt(static_cast<double>(dim())); }
    Point center() const {
        Point p = min_corner;
        for (int i = 0; i < p.n; ++i) p[i] += 0.5 * side;
        return p;
    }
    bool contains(const Point& p) const {
        for (int i = 0; i < min_corner.n; ++i) {
            if (p[i] < min_corner[i] || p[i] > min_corner[i] + side) return false;
        }
        return true;
    }
};

/// Box with orthonormal axes; used by the tunnel construction.
struct OrientedBox {
    Point center;
    std::array<Point, 4> axes{};
    std::array<double, 4> half_extents{};
    int dim = 0;

    Point at(const std::array<double, 4>& local) const {
        Point p = center;
        for (int a = 0; a < dim; ++a)
            for (int i = 0; i < dim; ++i) p[i] += local[a] * axes[a][i];
        return p;
    }
    /// Coordinates of p in the box frame.
    std::array<double, 4> local(const Point& p) const {
        std::array<double, 4> l{};
        Point d = p - center;
        for (int a = 0; a < dim; ++a) l[a] = dot(d, axes[a]);
        return l;
    }
    bool contains(const Point& p, double tol = 0.0) const {
        auto l = local(p);
        for (int a = 0; a < dim; ++a)
            if (std::abs(l[a]) > half_extents[a] + tol) return false;
        return true;
    }
    double diam() const {
        double s = 0;
        for (int a = 0; a < dim; ++a) s += 4.0 * half_extents[a] * half_extents[a];
        return std::sqrt(s);
    }
    double volume() const {
        double v = 1;
        for (int a = 0; a < dim; ++a) v *= 2.0 * half_extents[a];
        return v;
    }
};

}  // namespace nlab
