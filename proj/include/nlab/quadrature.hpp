#pragma once

#include <vector>

#include "nlab/field.hpp"
#include "nlab/geometry.hpp"

namespace nlab {

/// Gauss-Legendre nodes/weights on [-1, 1]; cached per order, thread-safe.
struct GaussLegendre {
    std::vector<double> x, w;
};
const GaussLegendre& gauss_legendre(int order);

/// One pass over the sphere |y - x| = r accumulating the surface integrals
/// of u^2 and u * du/dnu, plus the largest |u| seen at a node.
///
/// n = 2: M-point trapezoid on the circle (spectrally exact for trigonometric
/// integrands of degree < M). n = 3: Gauss-Legendre x trapezoid product rule
/// with order nodes in the polar direction and 2*order in azimuth.
struct SphereMoments {
    double H = 0;       // integral of u^2 dS
    double flux = 0;    // integral of u du/dnu dS
    double max_abs = 0; // max |u| over the quadrature nodes
};
SphereMoments sphere_moments(const FieldOracle& f, const Point& x, double r, int order);

/// Serial reference for sphere_moments (identical block layout, no threads).
SphereMoments sphere_moments_serial(const FieldOracle& f, const Point& x, double r, int order);

/// Quadrature order that integrates u^2 exactly (or to spectral accuracy)
/// on spheres of radius r, clamped to [minimum, 4096].
int suggested_order(const FieldOracle& f, double r, int minimum = 16);

/// Deterministic unit-sphere point set in R^3 (Fibonacci lattice).
std::vector<Point> fibonacci_sphere(int count);

}  // namespace nlab
