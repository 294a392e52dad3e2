#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nlab/field.hpp"
#include "nlab/geometry.hpp"
#include "nlab/growth.hpp"
#include "nlab/windows.hpp"

namespace nlab {

/// Geometry knobs for the box of tunnels between the inner-sphere point
/// x_tilde and the sphere maximum x. The box has long side d(x, x_tilde) =
/// delta * s, cube side d/cubes_per_tunnel, and transverse extent
/// tunnels_per_side * cube_side per transverse axis.
struct TunnelParams {
    double s = 0;
    double N = 0;
    double delta = 0;
    int tunnels_per_side = 0;
    int cubes_per_tunnel = 0;
    bool paper_constants = false;

    /// Desk-scale profile: delta = min(0.6, 2.3/sqrt(N)), ceil(sqrt(N))
    /// tunnels per side, 2 cubes per tunnel. Sized so the box reaches the
    /// nearest zeros of degree-N-like fields and the packed-ball count can
    /// scale like sqrt(N)^(n-1) at desk-scale frequencies.
    static TunnelParams desk(double N);

    /// Proof geometry: delta = 1/(10^8 n^2 ln^2 N), floor(sqrt(N)) tunnels
    /// per side, floor(sqrt(N)) floor(ln N)^4 cubes per tunnel. Typically
    /// flagged below_resolution at desk-scale N.
    static TunnelParams paper(double N, int n);
};

struct TunnelCube {
    OrientedBox box;  // cube: equal half extents, axes of the parent box
    int tunnel = 0;
    int t = 0;  // 1-based position, t = 1 at the inner (x_tilde) end
};

struct TunnelGeometry {
    OrientedBox box;
    Point x, x_tilde;
    double cube_side = 0;
    int tunnels = 0;
    int cubes_per_tunnel = 0;
    bool below_resolution = false;  // cube side < 1e-9 s: flagged, never faked
    std::vector<TunnelCube> cubes;  // tunnel-major, ascending t
};

/// Two strictly signed points in one closed cube (or a consecutive closed
/// pair); by continuity the segment between them crosses a zero of u.
struct SignChangeCertificate {
    int tunnel = -1;
    int t = 0;        // cube position; a pair certificate covers t and t+1
    bool pair = false;
    OrientedBox region;
    Point p_plus, p_minus;
    double v_plus = 0, v_minus = 0;
};

/// Result of bisecting a certificate segment: the located zero and the final
/// bracket (still strictly signed, tiny, inside the original segment).
struct ZeroBracket {
    Point zero, plus, minus;
    double value = 0;  // u at the returned zero point
};

struct TunnelReport {
    LayerWindow window;
    TunnelParams params;
    TunnelGeometry geometry;
    Point max_point;
    double K = 0;  // sup |u| on the sphere of radius s
    double good_threshold = 0;
    std::vector<int> good_tunnels;
    std::vector<SignChangeCertificate> certificates;  // from good tunnels
    std::vector<BallSpec> balls;                      // disjoint, each holds a zero
    std::vector<ZeroBracket> zeros;                   // one per packed ball
    double ball_radius = 0;
    double beta_r = 0, beta_3r2 = 0;  // N bracket: beta(p,r)/10 <= N <= 2 beta(p,3r/2)
};

/// Argmax of |u| over a deterministic sphere sample (angle grid in the
/// plane, Fibonacci lattice in 3-d; resolution^2 points there) refined by
/// tangential ascent. Ties break to the smallest sample index.
std::pair<Point, double> max_on_sphere(const FieldOracle& f, const Point& p, double s,
                                       int resolution);

/// The box T between x_tilde = p + (1-delta)(x-p) and x, subdivided into
/// tunnels along the radial axis and cubes along each tunnel, cubes ordered
/// from the inner end toward x.
TunnelGeometry build_tunnels(const FieldOracle& f, const Point& p, const Point& x,
                             const TunnelParams& params);

/// Indices of tunnels all of whose cubes have doubling index <= threshold.
std::vector<int> classify_good_tunnels(const FieldOracle& f, const TunnelGeometry& geom,
                                       double threshold, const CubeIndexParams& params = {});

/// Deterministic per-cube lattice sampling (samples_per_axis^n points per
/// cube). Certificates are sound by construction; completeness is
/// resolution-limited. Pair certificates are emitted only when the sign
/// change shows across a consecutive closed pair but inside neither cube.
std::vector<SignChangeCertificate> detect_sign_changes(const FieldOracle& f,
                                                       const TunnelGeometry& geom,
                                                       int samples_per_axis,
                                                       const std::vector<int>* tunnels = nullptr);

/// Bisects the [p_minus, p_plus] segment until its length is below tol_len,
/// keeping a strictly signed bracket.
ZeroBracket bisect_zero(const FieldOracle& f, const Point& p_plus, const Point& p_minus,
                        double tol_len);

/// Greedy maximal packing in certificate order: a ball centered at the
/// bisected zero is accepted iff disjoint from all accepted balls and inside
/// the container.
std::vector<BallSpec> pack_disjoint_balls(const FieldOracle& f,
                                          const std::vector<SignChangeCertificate>& certs,
                                          double radius, const BallSpec& container,
                                          std::vector<ZeroBracket>* zeros = nullptr);

struct TunnelConfig {
    int sphere_resolution = 1024;
    int samples_per_axis = 12;
    double alpha = 0.5;  // packed balls have radius r / N^alpha
    double c1 = 0.1;     // good-tunnel threshold max(N 2^(-c1 lnN/lnlnN), N0)
    double N0 = 10.0;
    CubeIndexParams cube_index;
    int window_order = 0;
    double beta_gate = 10.0;  // frequency-window hypothesis; >= 2e
    bool paper_constants = false;
    std::optional<TunnelParams> params_override;
};

/// End-to-end pipeline: window -> sphere max -> box -> good tunnels -> sign
/// changes -> packed zero balls. Raises LowFrequencyError when
/// beta(p, r/2) <= 10. With paper_constants the geometry is built and the
/// report returned with below_resolution flagged and no detection run.
TunnelReport run_tunnel_construction(const FieldOracle& f, const Point& p, double r,
                                     const TunnelConfig& config = {});

/// Instance-wise measurements of the layer growth estimates: both sides of
/// the H-ratio sandwich and the sup bounds near the maximum, reported as the
/// smallest constants making each inequality true for this field.
struct LayerDiagnostics {
    double s = 0, N = 0, delta = 0, K = 0;
    Point max_point;
    double t1 = 0, t2 = 0, H1 = 0, H2 = 0;
    double h_ratio_exponent = 0;  // ln(H2/H1) / (2 ln(t2/t1)), in [N, 2eN]
    double sup_inner = 0;         // sup over B(p, s(1-delta))
    double implied_c_decay = 0;   // -log2(sup_inner/K) / (delta N)
    double sup_outer = 0;         // sup over B(p, s(1+delta))
    double implied_C_growth = 0;  // log2(sup_outer/K) / (delta N)
    double sup_near_max = 0;      // sup over B(x, delta s)
    double implied_C_near_max = 0;
    double max_doubling_near_max = 0;  // max doubling index at delta s/4 probes
    double implied_C_doubling = 0;
    double sup_small_ball = 0;  // sup over B(x, delta s / (10N))
    double implied_C_small_ball = 0;
};

LayerDiagnostics layer_growth_report(const FieldOracle& f, const Point& p,
                                     const LayerWindow& window, double delta,
                                     int sphere_resolution = 1024, int sup_resolution = 32);

}  // namespace nlab
