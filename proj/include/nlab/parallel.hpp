#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlab::par {

/// Thread cap: min(omp_get_max_threads(), $NODAL_LAB_THREADS if set).
inline int max_threads() {
#ifdef _OPENMP
    int t = omp_get_max_threads();
#else
    int t = 1;
#endif
    if (const char* env = std::getenv("NODAL_LAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < t) t = cap;
    }
    return t;
}

// All reductions below chunk [0,n) into fixed-size blocks and combine the
// per-block partials in block order. The block layout does not depend on the
// thread count, so results are identical for any number of threads and
// identical to the serial reference twins.
inline constexpr std::int64_t kBlock = 2048;

template <class F>
double block_sum_serial(std::int64_t n, F&& term) {
    const std::int64_t nb = (n + kBlock - 1) / kBlock;
    double total = 0;
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::int64_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double s = 0;
        for (std::int64_t i = lo; i < hi; ++i) s += term(i);
        total += s;
    }
    return total;
}

template <class F>
double block_sum(std::int64_t n, F&& term) {
    const std::int64_t nb = (n + kBlock - 1) / kBlock;
    if (nb <= 1) return block_sum_serial(n, term);
    std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::int64_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double s = 0;
        for (std::int64_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0;
    for (double s : partial) total += s;
    return total;
}

/// Kahan-compensated variant for long accumulations (nodal measure cells).
template <class F>
double block_sum_kahan_serial(std::int64_t n, F&& term) {
    const std::int64_t nb = (n + kBlock - 1) / kBlock;
    double total = 0, comp = 0;
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::int64_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double s = 0, c = 0;
        for (std::int64_t i = lo; i < hi; ++i) {
            double y = term(i) - c;
            double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        double y = s - comp;
        double t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    return total;
}

template <class F>
double block_sum_kahan(std::int64_t n, F&& term) {
    const std::int64_t nb = (n + kBlock - 1) / kBlock;
    if (nb <= 1) return block_sum_kahan_serial(n, term);
    std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::int64_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double s = 0, c = 0;
        for (std::int64_t i = lo; i < hi; ++i) {
            double y = term(i) - c;
            double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0, comp = 0;
    for (double s : partial) {
        double y = s - comp;
        double t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    return total;
}

struct MaxResult {
    double value = 0;
    std::int64_t index = -1;
};

/// Max of term(i) over [0,n); ties resolved to the smallest index.
template <class F>
MaxResult block_max_serial(std::int64_t n, F&& term) {
    MaxResult best;
    for (std::int64_t i = 0; i < n; ++i) {
        double v = term(i);
        if (best.index < 0 || v > best.value) best = {v, i};
    }
    return best;
}

template <class F>
MaxResult block_max(std::int64_t n, F&& term) {
    const std::int64_t nb = (n + kBlock - 1) / kBlock;
    if (nb <= 1) return block_max_serial(n, term);
    std::vector<MaxResult> partial(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::int64_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        MaxResult best;
        for (std::int64_t i = lo; i < hi; ++i) {
            double v = term(i);
            if (best.index < 0 || v > best.value) best = {v, i};
        }
        partial[static_cast<std::size_t>(b)] = best;
    }
    MaxResult best;
    for (const auto& p : partial) {
        if (p.index < 0) continue;
        if (best.index < 0 || p.value > best.value) best = p;
    }
    return best;
}

/// Independent tasks, results stored by index (deterministic merge).
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

/// Variant for coarse, imbalanced tasks (census subcubes, tunnel cubes).
template <class F>
void parallel_for_dynamic(std::int64_t n, F&& body) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

template <class F>
void serial_for(std::int64_t n, F&& body) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace nlab::par
