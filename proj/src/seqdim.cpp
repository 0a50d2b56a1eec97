#include "seqdim.hpp"

#include <algorithm>
#include <cmath>

namespace entdim {

std::size_t default_window(std::size_t n_max) {
    return std::max<std::size_t>(10, n_max / 10);
}

DimProfile dim_profile(IntSeq& s, double tau, std::size_t n_max) {
    if (tau < 0.0 || tau > 1.0) throw Error(ErrorCode::invalid_argument, "tau must lie in [0,1]");
    if (n_max == 0) throw Error(ErrorCode::invalid_argument, "n_max must be positive");
    s.extend_to(n_max);
    DimProfile p;
    p.tau = tau;
    p.window = default_window(n_max);
    p.points.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const long double log2_sn = log2_big(s.term(n));
        p.points.push_back(std::exp2(std::log2(static_cast<long double>(n)) - tau * log2_sn));
    }
    return p;
}

DimEstimate estimate_dims(IntSeq& s, std::size_t n_max, std::size_t window) {
    if (window == 0) window = default_window(n_max);
    if (window < 10 || n_max < 2 * window)
        throw Error(ErrorCode::invalid_argument, "estimate_dims needs n_max >= 2*window >= 20");
    s.extend_to(n_max);
    DimEstimate est;
    est.n_max = n_max;
    est.window = window;
    long double lo = 2.0L, hi = 0.0L;
    for (std::size_t n = n_max - window; n <= n_max; ++n) {
        const long double r = std::log2(static_cast<long double>(n)) / log2_big(s.term(n));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    est.lower = static_cast<double>(lo);
    est.upper = static_cast<double>(hi);
    return est;
}

DimEstimate estimate_dims_at(const std::vector<std::pair<BigInt, BigInt>>& checkpoints,
                             std::size_t window) {
    if (checkpoints.empty() || window == 0)
        throw Error(ErrorCode::invalid_argument, "estimate_dims_at needs checkpoints and a window");
    window = std::min(window, checkpoints.size());
    DimEstimate est;
    est.window = window;
    long double lo = 2.0L, hi = 0.0L;
    for (std::size_t i = checkpoints.size() - window; i < checkpoints.size(); ++i) {
        const auto& [n, sn] = checkpoints[i];
        const long double r = log2_big(n) / log2_big(sn);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    est.lower = static_cast<double>(lo);
    est.upper = static_cast<double>(hi);
    return est;
}

namespace {

// Checks oracle(F') >= |F'|*b/4 for every nonempty F' of the candidate set.
bool hereditary_ok(const std::vector<std::uint64_t>& cand, const SubsetOracle& oracle, double b) {
    const std::size_t k = cand.size();
    std::vector<std::uint64_t> subset;
    for (std::uint64_t mask = 1; mask < (1ULL << k); ++mask) {
        subset.clear();
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (1ULL << i)) subset.push_back(cand[i]);
        if (oracle(subset) < static_cast<double>(subset.size()) * b / 4.0 - 1e-12) return false;
    }
    return true;
}

}  // namespace

std::vector<std::uint64_t> hereditary_extract(const std::vector<std::uint64_t>& window_indices,
                                              const SubsetOracle& oracle, double b) {
    if (window_indices.size() > 20)
        throw Error(ErrorCode::budget_exceeded, "hereditary_extract window limited to 20 indices");

    // Order candidates by descending singleton entropy, first index on ties.
    std::vector<std::uint64_t> order = window_indices;
    std::vector<double> singleton(window_indices.size());
    for (std::size_t i = 0; i < window_indices.size(); ++i)
        singleton[i] = oracle({window_indices[i]});
    std::stable_sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b2) {
        double va = 0, vb = 0;
        for (std::size_t i = 0; i < window_indices.size(); ++i) {
            if (window_indices[i] == a) va = singleton[i];
            if (window_indices[i] == b2) vb = singleton[i];
        }
        if (va != vb) return va > vb;
        return a < b2;
    });

    std::vector<std::uint64_t> result;
    for (std::uint64_t idx : order) {
        std::vector<std::uint64_t> trial = result;
        trial.push_back(idx);
        std::sort(trial.begin(), trial.end());
        if (hereditary_ok(trial, oracle, b)) result = std::move(trial);
    }
    std::sort(result.begin(), result.end());
    return result;
}

}  // namespace entdim
