#include "nlab/subdivision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"

namespace nlab {

BigRat parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return BigRat(BigInt(s));
        const BigInt num(s.substr(0, slash));
        const BigInt den(s.substr(slash + 1));
        if (den == 0) throw PreconditionError("rational with zero denominator: " + s);
        return BigRat(num, den);
    } catch (const std::runtime_error&) {
        throw PreconditionError("cannot parse rational \"" + s + "\" (want num/den)");
    }
}

std::string rational_str(const BigRat& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

std::vector<CubeSpec> partition_cube(const CubeSpec& Q, int B, std::int64_t budget) {
    if (B < 1) throw PreconditionError("partition needs B >= 1");
    if (Q.side <= 0) throw PreconditionError("cube side must be positive");
    const int n = Q.dim();
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) {
        total *= B;
        if (total > budget)
            throw BudgetError("partition into B^n = " + std::to_string(B) + "^" +
                              std::to_string(n) + " subcubes exceeds budget " +
                              std::to_string(budget));
    }
    const double side = Q.side / B;
    std::vector<CubeSpec> cubes;
    cubes.reserve(static_cast<std::size_t>(total));
    for (std::int64_t idx = 0; idx < total; ++idx) {
        std::int64_t rem = idx;
        CubeSpec q;
        q.min_corner = Q.min_corner;
        q.side = side;
        for (int a = 0; a < n; ++a) {
            q.min_corner[a] += side * static_cast<double>(rem % B);
            rem /= B;
        }
        cubes.push_back(q);
    }
    return cubes;
}

int count_above_threshold(const std::vector<double>& indices, double threshold) {
    int c = 0;
    for (double v : indices)
        if (v > threshold) ++c;
    return c;
}

SubdivisionCensus census_high_index(const FieldOracle& f, const CubeSpec& Q, int B,
                                    double threshold, const CensusParams& params) {
    const auto cubes = partition_cube(Q, B, params.budget);
    SubdivisionCensus census;
    census.parent = Q;
    census.B = B;
    census.indices.assign(cubes.size(), 0.0);

    std::vector<std::string> errors(cubes.size());
    par::parallel_for_dynamic(static_cast<std::int64_t>(cubes.size()), [&](std::int64_t i) {
        try {
            census.indices[static_cast<std::size_t>(i)] =
                doubling_index_cube(f, cubes[static_cast<std::size_t>(i)], params.cube_index);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw DomainError("census subcube failed: " + e);

    const double coarse = doubling_index_cube(f, Q, params.cube_index);
    double child_max = 0;
    for (double v : census.indices) child_max = std::max(child_max, v);
    census.parent_index = std::max(coarse, child_max);

    census.threshold = std::isnan(threshold)
                           ? std::max(census.parent_index / (1.0 + params.c), params.N0)
                           : threshold;
    census.count_above = count_above_threshold(census.indices, census.threshold);
    return census;
}

namespace {

BigRat rational_pow(BigRat base, int e) {
    BigRat out(1);
    while (e > 0) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

}  // namespace

BigRat binomial_tail_exact(const BigRat& p, int k, int l) {
    if (k < 0 || l < 0 || l > k) throw PreconditionError("binomial tail needs 0 <= l <= k");
    if (!(p > 0 && p < 1)) throw PreconditionError("binomial tail needs p in (0,1)");
    // term_i = C(k,i) p^(k-i) (1-p)^i, advanced incrementally.
    BigRat term = rational_pow(p, k);
    const BigRat ratio = (BigRat(1) - p) / p;
    BigRat sum(0);
    for (int i = 0; i < l; ++i) {
        sum += term;
        term *= ratio;
        term *= BigRat(k - i, i + 1);
    }
    return sum;
}

TailParams claim_k0_search(const BigRat& p, double epsilon, double sigma, int k_max) {
    if (!(p > 0 && p < 1)) throw PreconditionError("claim needs p in (0,1)");
    if (!(epsilon > 0 && epsilon < 1)) throw PreconditionError("claim needs epsilon in (0,1)");
    const double log_inv_p = -std::log(static_cast<double>(p));
    if (!(sigma > 0 && sigma < (epsilon / 3.0) * log_inv_p))
        throw PreconditionError("claim needs 0 < sigma < (epsilon/3) log(1/p)");
    if (k_max < 10) throw PreconditionError("claim search needs k_max >= 10");

    int last_violation = -1;
    for (int k = 2; k <= k_max; ++k) {
        const int lmax = std::min(k, static_cast<int>(std::floor(sigma * k / std::log(k))));
        const int rhs_exp = static_cast<int>(std::ceil(k * (1.0 - epsilon)));
        const BigRat rhs = rational_pow(p, rhs_exp);
        for (int l = 0; l <= lmax; ++l) {
            if (binomial_tail_exact(p, k, l) > rhs) {
                last_violation = k;
                break;
            }
        }
    }
    if (last_violation == k_max)
        throw Error("no valid k0 <= " + std::to_string(k_max) +
                    ": k = " + std::to_string(last_violation) + " still violates the claim");
    TailParams out;
    out.p = p;
    out.epsilon = epsilon;
    out.sigma = sigma;
    out.k0 = (last_violation < 0) ? 2 : last_violation + 1;
    return out;
}

BigRat IterationProcess::exact_tail_ge(int l) const {
    BigRat s(0);
    for (int i = std::max(l, 0); i <= k; ++i) s += outcomes[static_cast<std::size_t>(i)].exact_prob;
    return s;
}

double IterationProcess::empirical_cdf_at(int l) const {
    const double level = std::max(N_start / std::pow(1.0 + c, l), N0);
    double s = 0;
    for (const auto& o : outcomes)
        if (o.final_value <= level * (1 + 1e-12)) s += o.empirical_prob;
    return s;
}

IterationProcess simulate_iteration_process(const BigRat& p, double c, double N_start, double N0,
                                            int k, int trials, std::uint64_t seed) {
    if (!(p > 0 && p < 1)) throw PreconditionError("process needs p in (0,1)");
    if (k < 1) throw PreconditionError("process needs k >= 1");
    if (trials < 1) throw PreconditionError("process needs trials >= 1");
    if (!(c > 0)) throw PreconditionError("process needs c > 0");

    IterationProcess proc;
    proc.p = p;
    proc.c = c;
    proc.N_start = N_start;
    proc.N0 = N0;
    proc.k = k;
    proc.trials = trials;
    proc.seed = seed;

    // Exact distribution of the reduction count by the Pascal recurrence.
    std::vector<BigRat> dist(1, BigRat(1));
    const BigRat q = BigRat(1) - p;
    for (int step = 0; step < k; ++step) {
        std::vector<BigRat> next(dist.size() + 1, BigRat(0));
        for (std::size_t i = 0; i < dist.size(); ++i) {
            next[i] += p * dist[i];
            next[i + 1] += q * dist[i];
        }
        dist.swap(next);
    }

    // Seeded Monte Carlo of the same process.
    std::mt19937_64 rng(seed);
    auto unif = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    const double pd = static_cast<double>(p);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k) + 1, 0);
    for (int t = 0; t < trials; ++t) {
        int reductions = 0;
        for (int step = 0; step < k; ++step)
            if (unif() >= pd) ++reductions;
        ++counts[static_cast<std::size_t>(reductions)];
    }

    proc.outcomes.resize(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
        auto& o = proc.outcomes[static_cast<std::size_t>(i)];
        o.reductions = i;
        o.final_value = std::max(N_start / std::pow(1.0 + c, i), N0);
        o.exact_prob = dist[static_cast<std::size_t>(i)];
        o.empirical_prob = static_cast<double>(counts[static_cast<std::size_t>(i)]) / trials;
    }
    return proc;
}

std::vector<LevelCensus> iterated_census(const FieldOracle& f, const CubeSpec& Q, int A, int k,
                                         double c1, double N0, const CensusParams& params) {
    if (A < 2) throw PreconditionError("iterated census needs A >= 2");
    if (k < 1) throw PreconditionError("iterated census needs k >= 1");
    const int n = Q.dim();
    std::int64_t final_count = 1;
    for (int j = 0; j < k * n; ++j) {
        final_count *= A;
        if (final_count > params.budget)
            throw BudgetError("A^(k n) exceeds the census budget");
    }

    std::vector<LevelCensus> levels;
    double NQ = 0;
    int B = 1;
    for (int level = 1; level <= k; ++level) {
        B *= A;
        LevelCensus lc;
        lc.level = level;
        lc.census = census_high_index(f, Q, B, std::numeric_limits<double>::quiet_NaN(), params);
        if (level == 1) NQ = lc.census.parent_index;
        const double loglogB = std::max(std::log(std::log(static_cast<double>(B))), 1.0);
        const double drop = std::exp2(-c1 * std::log(static_cast<double>(B)) / loglogB);
        lc.census.threshold = std::max(NQ * drop, N0);
        lc.census.count_above = count_above_threshold(lc.census.indices, lc.census.threshold);
        lc.fraction = lc.census.count_above / std::pow(static_cast<double>(B), n - 1);
        levels.push_back(std::move(lc));
    }
    return levels;
}

}  // namespace nlab
