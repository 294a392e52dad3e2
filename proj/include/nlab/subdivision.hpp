#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nlab/field.hpp"
#include "nlab/geometry.hpp"
#include "nlab/growth.hpp"

namespace nlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Parses "num/den" or an integer literal (exact; no floating point).
BigRat parse_rational(const std::string& s);
std::string rational_str(const BigRat& q);

/// B^n axis-aligned subcubes of side side(Q)/B tiling Q exactly, ordered
/// lexicographically by integer grid coordinates with the first axis fastest.
std::vector<CubeSpec> partition_cube(const CubeSpec& Q, int B,
                                     std::int64_t budget = 10'000'000);

struct CensusParams {
    CubeIndexParams cube_index;
    std::int64_t budget = 10'000'000;
    double c = 0.25;   // default threshold rule: max(N(Q)/(1+c), N0)
    double N0 = 10.0;
};

/// Per-subcube doubling indices for one partition level. parent_index is
/// max(coarse N(Q), max over subcube indices), so subcube indices never
/// exceed it (aligned-candidate monotonicity by construction).
struct SubdivisionCensus {
    CubeSpec parent;
    int B = 0;
    double threshold = 0;
    double parent_index = 0;
    std::vector<double> indices;
    int count_above = 0;
};

int count_above_threshold(const std::vector<double>& indices, double threshold);

/// Census of N(q) over the B^n subcubes. Pass threshold = NaN to use the
/// rule max(N(Q)/(1+c), N0) with c, N0 from params.
SubdivisionCensus census_high_index(const FieldOracle& f, const CubeSpec& Q, int B,
                                    double threshold, const CensusParams& params = {});

/// Exact binomial lower tail  sum_{i=0}^{l-1} C(k,i) p^{k-i} (1-p)^i.
BigRat binomial_tail_exact(const BigRat& p, int k, int l);

struct TailParams {
    BigRat p;
    double epsilon = 0;
    double sigma = 0;
    int k0 = 0;
};

/// Smallest k0 <= k_max such that for every k in [k0, k_max] and every
/// l <= sigma k / ln k the exact tail is at most p^ceil(k (1-epsilon))
/// (conservative one-sided rounding of the irrational exponent).
/// Requires sigma < (epsilon/3) ln(1/p).
TailParams claim_k0_search(const BigRat& p, double epsilon, double sigma, int k_max);

struct IterationOutcome {
    int reductions = 0;
    double final_value = 0;
    BigRat exact_prob;
    double empirical_prob = 0;
};

/// The extremal child process saturating the census hypothesis: with
/// probability p the index is kept, otherwise divided by (1+c) and floored
/// at N0. Carries both the exact reduction-count distribution (Pascal
/// recurrence over rationals) and a seeded Monte Carlo estimate.
struct IterationProcess {
    BigRat p;
    double c = 0, N_start = 0, N0 = 0;
    int k = 0, trials = 0;
    std::uint64_t seed = 0;
    std::vector<IterationOutcome> outcomes;  // indexed by reduction count 0..k

    /// P(#reductions >= l), exact.
    BigRat exact_tail_ge(int l) const;
    /// Empirical P(final N <= max(N_start/(1+c)^l, N0)).
    double empirical_cdf_at(int l) const;
};

IterationProcess simulate_iteration_process(const BigRat& p, double c, double N_start,
                                            double N0, int k, int trials, std::uint64_t seed);

struct LevelCensus {
    int level = 0;  // 1-based; B = A^level
    SubdivisionCensus census;
    double fraction = 0;  // count_above / B^(n-1)
};

/// Censuses at levels A, A^2, ..., A^k with per-level threshold
/// max(N(Q) 2^(-c1 ln B / max(ln ln B, 1)), N0); N(Q) is taken from the
/// level-1 census parent index. The ln ln clamp keeps the rule monotone for
/// the smallest levels (ln ln B <= 0 for B <= e).
std::vector<LevelCensus> iterated_census(const FieldOracle& f, const CubeSpec& Q, int A, int k,
                                         double c1, double N0, const CensusParams& params = {});

}  // namespace nlab
