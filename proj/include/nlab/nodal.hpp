#pragma once

#include <cstdint>
#include <vector>

#include "nlab/field.hpp"
#include "nlab/geometry.hpp"

namespace nlab {

/// H^{n-1} measure of {u = 0} inside a ball, with its refinement record.
struct NodalEstimate {
    BallSpec region;
    double measure = 0;
    double cell_size = 0;
    std::vector<std::pair<double, double>> refinement_history;  // (cell, measure)
    bool converged = false;
};

struct NodalParams {
    double rel_tol = 0.01;              // stop when successive measures agree to 1%
    std::int64_t cell_budget = 1 << 24; // total cells per refinement level
    int max_refinements = 6;
};

/// Marching squares (n = 2) / marching cubes (n = 3) on a regular lattice
/// clipped to the ball; zero crossings by linear interpolation on edges,
/// boundary cells clipped against the sphere's tangent half-space. Refines
/// by halving cell_size until two successive measures agree within rel_tol
/// or the budget is reached (converged = false, best estimate returned).
NodalEstimate nodal_measure(const FieldOracle& f, const BallSpec& region, double cell_size,
                            const NodalParams& params = {});

/// Serial reference for the cell sweep of one lattice level.
double nodal_measure_level_serial(const FieldOracle& f, const BallSpec& region,
                                  double cell_size);
double nodal_measure_level(const FieldOracle& f, const BallSpec& region, double cell_size);

struct SignedBall {
    BallSpec ball;
    bool verified = false;  // sampled sign condition held on the whole ball
};

/// Measurements behind the naive lower bound: the normalized nodal measure,
/// the frequency at half radius, the implied constant ratio * beta^(n-1),
/// and one positivity and one negativity ball of radius ~ rho/beta.
struct NaiveBoundRecord {
    double rho = 0;
    double ratio = 0;  // H^{n-1}(Z cap B(x,rho)) / rho^(n-1)
    double beta = 0;   // beta(x, rho/2)
    double implied_c1 = 0;
    SignedBall positive, negative;
    NodalEstimate estimate;
};

NaiveBoundRecord naive_lower_bound_check(const FieldOracle& f, const Point& x, double rho);

struct FRatioRow {
    int degree = 0;
    std::uint64_t seed = 0;
    double beta = 0;
    double ratio = 0;
};

struct FRatioTable {
    std::vector<FRatioRow> rows;
    double min_ratio = 0;
    double min_ratio_low_degree = 0;  // minimum over the lowest degree present
    double trend_c6 = 0;  // slope of log2(ratio) against ln(beta)/lnln(beta)
};

/// Seeded family of harmonic polynomials vanishing at the origin; tabulates
/// (beta(0, rho/2), normalized nodal measure) per (degree, seed).
FRatioTable f_ratio_experiment(int n, const std::vector<int>& degrees, int seeds_per_degree,
                               double rho, std::uint64_t base_seed = 1,
                               double domain_radius = kDefaultDomainRadius);

struct DensityReport {
    double lambda = 0;
    double max_gap = 0;
    int probe_count = 0;
    int failures = 0;  // probes with no zero within reach along any axis
    double implied_C1 = 0;  // max_gap * sqrt(lambda)
};

/// Max over a probe lattice in B of the distance to the nearest zero
/// detected along coordinate segments of length 4/sqrt(lambda).
DensityReport density_check(const FieldOracle& u, const BallSpec& B, int probes);

struct YauRow {
    int k = 0;
    double lambda = 0;
    double measure = 0;
    double ratio = 0;       // measure / sqrt(lambda)
    int zero_balls = 0;     // disjoint balls of radius 2/sqrt(lambda) on zeros
    bool converged = false;
};

enum class TorusPattern { Stripes, Grid };  // sin(k x1) / sin(k x1) sin(k x2)

OraclePtr make_pattern_eigenfunction(TorusPattern pattern, int k,
                                     double domain_radius = kDefaultDomainRadius);

/// For each k: H^1(Z cap B) by marching, the ratio against sqrt(lambda), and
/// the count of disjoint zero-centered balls of radius 2/sqrt(lambda).
std::vector<YauRow> yau_experiment(const std::vector<int>& ks, TorusPattern pattern,
                                   const BallSpec& B);

}  // namespace nlab
