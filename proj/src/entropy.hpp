// Pattern distributions along offset sets, Shannon entropy, conditional
// entropy, name counting, and the insertion-independence bound check.
//
// Window convention: base levels j with j + max(offset) < height, uniform
// over (column, j); exact because all columns of a stage share one width.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "partition.hpp"

namespace entdim {

struct PatternDist {
    std::vector<std::uint64_t> positions;
    std::vector<const Partition*> parts;  // not owned
    std::map<std::string, std::uint64_t> counts;  // pattern -> weight (cells or samples)
    std::uint64_t total = 0;
    bool sampled = false;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t window_len = 0;
    std::uint32_t stage_idx = 0;

    std::uint64_t support() const { return counts.size(); }
    // Exact probability of one pattern.
    Rational probability(const std::string& key) const;
    // Human-readable pattern string (cell labels joined with '.').
    std::string pretty(const std::string& key) const;
    std::string to_json() const;
};

// Encoded cell width is 2 bytes per (position, part).
std::string encode_cells(const std::vector<std::uint16_t>& cells);

PatternDist join_dist_exact(const TowerLadder& L, std::uint32_t stage_idx,
                            const std::vector<const Partition*>& parts,
                            const std::vector<std::uint64_t>& positions, unsigned workers = 1);

PatternDist join_dist_sample(const TowerLadder& L, std::uint32_t stage_idx,
                             const std::vector<const Partition*>& parts,
                             const std::vector<std::uint64_t>& positions, std::uint64_t samples,
                             std::uint64_t seed, unsigned workers = 1);

// Keeps the chosen positions (by index into dist.positions) and parts.
PatternDist marginal(const PatternDist& dist, const std::vector<std::size_t>& position_indices,
                     const std::vector<std::size_t>& part_indices);

enum class EntropyEstimator { plug_in, miller_madow };

// Shannon entropy in bits.
long double shannon(const PatternDist& dist, EntropyEstimator est = EntropyEstimator::plug_in);

// Asymptotic standard error of the plug-in estimate (sampled dists).
long double shannon_stderr(const PatternDist& dist);

// Exact check of H <= log2(support): D^D <= N^D * prod a_i^{a_i} in big
// integers. Used when the floating comparison is too close to call.
bool entropy_leq_log2_support_exact(const PatternDist& dist);
// Floating check with exact fallback near the boundary.
bool entropy_leq_log2_support(const PatternDist& dist);

// (H(alpha|beta), H(beta|alpha)) from the joint single-position distribution.
std::pair<long double, long double> cond_entropy(const TowerLadder& L, const Partition& alpha,
                                                 const Partition& beta, std::uint32_t stage_idx,
                                                 unsigned workers = 1);

struct EntropyProfilePoint {
    std::uint64_t n = 0;
    std::uint64_t s_n = 0;  // the n-th offset
    long double H = 0;      // plug-in, bits
    long double H_mm = 0;   // Miller-Madow corrected
    std::uint64_t name_count = 0;
    std::uint64_t window_len = 0;
};

struct EntropyProfile {
    std::vector<EntropyProfilePoint> points;
    bool sampled = false;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string to_csv() const;
};

EntropyProfile entropy_profile(const TowerLadder& L, std::uint32_t stage_idx, const Partition& alpha,
                               const std::vector<std::uint64_t>& offsets, std::size_t n_max,
                               bool sampled, std::uint64_t samples, std::uint64_t seed,
                               unsigned workers = 1);

// Support size of the pattern distribution (exact count, or the distinct
// observed count in sampling mode, which is only a lower bound).
std::uint64_t name_count(const TowerLadder& L, std::uint32_t stage_idx, const Partition& alpha,
                         const std::vector<std::uint64_t>& positions, bool sampled,
                         std::uint64_t samples, std::uint64_t seed, unsigned workers = 1);

// Lemma-style independence bound on an insertion tower: for B inside F_0^t
// and level sets E_b of W_{l_t},
//   mu_window(cap_b T^{-b} E_b) <= (1+h_l/c_n)^|B| (1/xi_l)^|B| prod mu(E_b).
struct IndependenceRow {
    std::vector<std::uint64_t> offsets;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> level_sets;
    std::string lhs;  // exact rationals
    std::string rhs;
    bool ok = true;
};

struct IndependenceReport {
    std::uint32_t t = 0;
    std::uint32_t stage_checked = 0;
    std::uint64_t checks = 0;
    std::uint64_t violations = 0;
    std::string bound_factor;  // (1+h_l/c_n)/xi_l as exact rational
    std::vector<IndependenceRow> rows;  // all rows if small, else violations only
    bool hypothesis_met = true;         // h* = h_{l_t} and no insertion in [l_t, n_t)
    std::string note;
    std::string to_json() const;
};

IndependenceReport independence_check(const TowerLadder& L, std::uint32_t t, std::uint32_t max_b,
                                      bool enforce_membership = true,
                                      const std::vector<std::uint64_t>& custom_offsets = {});

}  // namespace entdim
