#pragma once

#include <vector>

#include "nlab/field.hpp"
#include "nlab/geometry.hpp"

namespace nlab {

/// Nondecreasing function given by samples on [a, b]; evaluated with
/// left-step interpolation, which is conservative for monotone functions.
struct SampledFunction {
    std::vector<double> t;  // strictly increasing, covering [a, b]
    std::vector<double> v;  // nondecreasing
    double a = 0, b = 1;

    /// Value at the largest sample point <= x (>= the true inf right of x).
    double at(double x) const;
    /// Value at the smallest sample point >= x (>= the true sup left of x).
    double right_of(double x) const;
    double max_gap() const;
};

/// A level N and a window on which N <= f <= e N.
struct PlateauResult {
    double x = 0;          // in [a, (a+b)/2)
    double N = 0;          // >= e
    double window_lo = 0;  // the verified window [window_lo, window_hi]
    double window_hi = 0;
};

/// Walks the sequence x_{i+1} = x_i + (b-a) / (10 ln^2 f(x_i)) and returns
/// the first midpoint whose window [x_i, x_{i+1}] satisfies the sandwich.
/// The accept test compares against the first sample right of the window, so
/// a returned plateau is valid for any monotone function consistent with the
/// samples (denser re-sampling cannot break it).
PlateauResult find_plateau(const SampledFunction& f);

/// Radius window with a frequency sandwich N <= beta(p,t) <= 2eN.
struct LayerWindow {
    double s = 0;                  // in [r, 3r/2)
    double N = 0;                  // >= 5
    double rel_halfwidth = 0;      // 1 / (1000 ln^2 N)
    double max_rel_halfwidth = 0;  // widest symmetric window that still verified
    int verification_samples = 0;
};

/// Applies the plateau lemma to the running-max envelope of beta(p, .) on
/// [r, 2r]. Requires beta(p, r/2) > gate (default 10, which forces N >= 5);
/// otherwise raises LowFrequencyError to signal the naive lower-bound path.
/// Desk-scale experiments may lower the gate as far as 2e.
LayerWindow find_frequency_window(const FieldOracle& f, const Point& p, double r,
                                  int order = 0, int verification_samples = 32,
                                  double gate = 10.0);

}  // namespace nlab
