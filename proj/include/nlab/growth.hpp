#pragma once

#include <vector>

#include "nlab/field.hpp"
#include "nlab/geometry.hpp"
#include "nlab/quadrature.hpp"

namespace nlab {

struct FrequencySample {
    double r = 0;
    double H = 0;
    double beta = 0;
};

/// Sampled (r, H(x,r), beta(x,r)) curves for one center, on a geometric
/// radius grid. H is the unnormalized spherical integral of u^2.
struct FrequencyProfile {
    Point center;
    std::vector<FrequencySample> samples;
    int quadrature_order = 0;

    /// | log(H(r_last)/H(r_first)) - 2 * trapezoid(beta d log r) | on the
    /// sampled grid.
    double identity_residual() const;
};

/// Integral of u^2 over the sphere of radius r about x.
double surface_H(const FieldOracle& f, const Point& x, double r, int order);

/// beta(x,r) = (n-1)/2 + r * (integral of u du/dnu) / (integral of u^2),
/// the exact Euclidean identity for r H'/(2H).
double frequency_beta(const FieldOracle& f, const Point& x, double r, int order);

/// Profile on a geometric grid of `count` radii in [r_min, r_max]. The grid
/// is refined (midpoint insertion in log r) and the quadrature order doubled
/// until the integral identity holds within residual_tol; the returned grid
/// always contains the requested radii. order == 0 picks the order from the
/// field's sphere bandwidth.
FrequencyProfile frequency_profile(const FieldOracle& f, const Point& x, double r_min,
                                   double r_max, int count, int order = 0,
                                   double residual_tol = 1e-4);

/// Max of |u| over a deterministic sample grid refined by coordinate ascent
/// from the argmax; resolution doubles until the relative change drops below
/// rel_tol. The result never decreases under refinement and is always >= the
/// max over the sampled points (a certified lower bound of the true sup).
double sup_norm(const FieldOracle& f, const BallSpec& ball, int resolution,
                double rel_tol = 1e-3);
double sup_norm(const FieldOracle& f, const CubeSpec& cube, int resolution,
                double rel_tol = 1e-3);
double sup_norm(const FieldOracle& f, const OrientedBox& box, int resolution,
                double rel_tol = 1e-3);

/// Serial reference twins (identical sampling and ascent, no threads).
double sup_norm_serial(const FieldOracle& f, const BallSpec& ball, int resolution,
                       double rel_tol = 1e-3);

/// log2( sup_{B(x,2r)} |u| / sup_{B(x,r)} |u| ).
double doubling_index_ball(const FieldOracle& f, const Point& x, double r, int resolution = 24);

struct CubeIndexParams {
    int centers_per_side = 3;  // odd keeps the cube center in the candidate set
    int radii_count = 3;
    int first_radius_exponent = 0;  // radii start at diam * 2^-first_radius_exponent
    int sup_resolution = 24;
    double sup_rel_tol = 1e-3;
};

/// Cube doubling index N(Q): max over a deterministic candidate set of
/// centers x in Q and dyadic radii r = diam(Q) 2^-j of
/// ln( sup_{B(x, 10 n r)} |u| / sup_{B(x, r)} |u| )  (natural log; the ball
/// index uses log2 -- conversion factor ln 2). A lower estimate of the sup.
double doubling_index_cube(const FieldOracle& f, const CubeSpec& Q,
                           const CubeIndexParams& params = {});

/// Same index over a rotated cube (tunnel cubes); the balls are isotropic so
/// only the candidate grid is oriented.
double doubling_index_cube(const FieldOracle& f, const OrientedBox& cube,
                           const CubeIndexParams& params = {});

}  // namespace nlab
