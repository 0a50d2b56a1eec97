// Dimension profiles n/(s_n)^tau and the tail-window log-ratio estimator for
// the upper/lower dimension of an integer sequence.
#pragma once

#include <functional>
#include <set>
#include <vector>

#include "intseq.hpp"

namespace entdim {

struct DimProfile {
    double tau = 0.0;
    std::vector<long double> points;  // points[n-1] = n/(s_n)^tau
    std::size_t window = 0;
};

struct DimEstimate {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t n_max = 0;
    std::size_t window = 0;
};

// Default tail window: last 10% of terms, at least 10.
std::size_t default_window(std::size_t n_max);

DimProfile dim_profile(IntSeq& s, double tau, std::size_t n_max);

// (min, max) of log(n)/log(s_n) over n in [n_max - window, n_max].
// Requires n_max >= 2*window >= 20 when window is explicit; window=0 selects
// the default.
DimEstimate estimate_dims(IntSeq& s, std::size_t n_max, std::size_t window = 0);

// Same estimator over explicit (n, s_n) checkpoints (used for sequences whose
// indices are too large to materialize term-by-term). Takes the min/max of
// log(n)/log(s_n) over the last `window` checkpoints.
DimEstimate estimate_dims_at(const std::vector<std::pair<BigInt, BigInt>>& checkpoints,
                             std::size_t window);

// Greedy extraction of a subset F of `window_indices` such that every
// nonempty subset F' of F has oracle(F') >= |F'| * b / 4, verified
// exhaustively over all 2^|F| subsets. Growth order: descending singleton
// oracle value, ties broken by lower index.
using SubsetOracle = std::function<double(const std::vector<std::uint64_t>&)>;
std::vector<std::uint64_t> hereditary_extract(const std::vector<std::uint64_t>& window_indices,
                                              const SubsetOracle& oracle, double b);

}  // namespace entdim
