// Entropy-dimension estimation for partitions and machine checks of the
// quantitative lemmas: entropy generating tests, the name-count upper-bound
// fit, the insertion-tower entropy lower bound, and the block-extraction
// inequalities behind Fact A.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "entropy.hpp"
#include "seqdim.hpp"

namespace entdim {

// True iff min over the tail window of H_n/n >= threshold.
bool egs_test(const EntropyProfile& prof, double threshold);

struct CandidateResult {
    std::string seq;
    bool fits = false;
    bool egs = false;
    double dim_lo = 0.0;
    double dim_hi = 0.0;
    std::size_t profile_n = 0;
};

struct PartitionDimReport {
    std::vector<CandidateResult> candidates;
    bool has_lower = false;
    double lower = 0.0;
    bool has_upper = false;
    double upper = 0.0;
    std::vector<double> upper_fit_residuals;
    bool inconclusive = false;  // lower > upper: windows too short
    std::string to_json() const;
};

struct DimEstimateConfig {
    double egs_threshold = 0.05;
    std::size_t dim_n_max = 10000;  // terms used for candidate dimension estimates
    bool sampled = false;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::size_t max_profile_n = 24;  // cap on offsets per profile
};

PartitionDimReport partition_dim_estimate(const TowerLadder& L, std::uint32_t stage_idx,
                                          const Partition& alpha, std::vector<IntSeq> candidates,
                                          const DimEstimateConfig& cfg);

struct LowerBoundRow {
    std::uint64_t m = 0;
    double H = 0.0;
    double rhs = 0.0;
    bool ok = false;
    double stderr_bits = 0.0;
    double margin_se = 0.0;  // (H - rhs)/stderr, sampled mode
};

struct LowerBoundReport {
    bool structural_ok = false;   // A a union of W_l level sets, mu(A) <= xi_l/2, l_t >= l
    bool smallness_ok = false;    // log2((1+h_l/c_nt)/xi_l) < per-step bound
    double smallness_lhs = 0.0;
    double per_step_bound = 0.0;  // -(1/2) mu log2(mu/(1-mu)) bits
    std::string mu_a;
    std::vector<LowerBoundRow> rows;
    bool all_ok = false;
    bool sampled = false;
    std::uint64_t samples = 0;
    std::string to_json() const;
};

// Checks H_m >= m * (-(1/2) mu(A) log2(mu(A)/(1-mu(A)))) along F^t.
LowerBoundReport verify_lower_bound(const TowerLadder& L, const Partition& alpha, std::uint32_t t,
                                    std::uint64_t m_max, std::uint32_t stage_idx, bool sampled,
                                    std::uint64_t samples, std::uint64_t seed, unsigned workers = 1);

struct FactAReport {
    struct Block {
        std::uint64_t lo = 0, hi = 0;  // index range (inclusive)
        std::vector<std::uint64_t> extracted;
        bool nonempty = false;
    };
    std::vector<Block> blocks;
    double b = 0.0, c = 0.0, d = 0.0;
    std::uint64_t pairs_checked = 0;
    std::uint64_t pairs_failed = 0;
    bool hypothesis_ok = false;  // every block produced a nonempty extraction
    bool all_ok = false;
    std::string to_json() const;
};

// Runs hereditary_extract on each block, assembles F, and checks the three
// case inequalities H(F[m1..m2]) >= (m2-m1+1)*const for all m1 <= m2, where
// const is b/4 within one block, b/8 across adjacent blocks, and bc/8 in
// general, with c = b/(4(H(alpha)+1)) and d = bc/8.
FactAReport verify_fact_a(const SubsetOracle& oracle,
                          const std::vector<std::pair<std::uint64_t, std::uint64_t>>& blocks, double b,
                          double h_alpha);

}  // namespace entdim
