// Strictly increasing integer sequences with lazy generators, plus the
// constructive transforms used in the sequence-calculus proofs.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "numeric.hpp"

namespace entdim {

class IntSeq {
public:
    // Extender appends terms until the sequence has at least `target` of them
    // (or returns false if it cannot). Previously produced terms never change.
    using Extender = std::function<bool(std::vector<BigInt>&, std::size_t target)>;

    IntSeq() = default;
    IntSeq(std::string desc, std::vector<BigInt> terms, Extender ext = nullptr, bool zero_based_offsets = false)
        : desc_(std::move(desc)), terms_(std::move(terms)), ext_(std::move(ext)),
          zero_based_offsets_(zero_based_offsets) {
        check_monotone();
    }

    const std::string& desc() const { return desc_; }
    std::size_t size() const { return terms_.size(); }
    const BigInt& term(std::size_t n) const { return terms_.at(n - 1); }  // 1-based, the paper's s_n
    const std::vector<BigInt>& terms() const { return terms_; }

    // Ensures at least n terms exist; throws "insufficient sequence" if the
    // generator cannot reach n.
    void extend_to(std::size_t n);
    // Same but reports failure instead of throwing.
    bool try_extend_to(std::size_t n);

    // Offsets handed to the entropy machinery. Sequences derived from F^t are
    // stored shifted by one (0 becomes 1) so they remain valid IntSeqs; the
    // offset view undoes the shift.
    std::vector<std::uint64_t> offsets(std::size_t n_max) const;
    bool zero_based_offsets() const { return zero_based_offsets_; }

private:
    void check_monotone() const;

    std::string desc_;
    std::vector<BigInt> terms_;
    Extender ext_;
    bool zero_based_offsets_ = false;
};

// Built-in generators.
IntSeq seq_naturals();
IntSeq seq_squares();
IntSeq seq_powers(std::uint64_t base);
IntSeq seq_arith(const BigInt& a, const BigInt& d);
// { floor(n^(p/q)) : n in N }, deduplicated; exponent is the paper's 1/tau.
IntSeq seq_floor_power(const Fraction& exponent);
IntSeq seq_explicit(std::vector<BigInt> terms, std::string desc = "explicit");

// F = S u {1..n_1} u union_j {s_{n_j}+1, ..., n_{j+1}}. Anchors are indices
// into S and must satisfy n_{j+1} >= 2*s_{n_j}.
IntSeq densify(IntSeq s, const std::vector<std::uint64_t>& anchors);

// F = S u { floor(n^(1/tau)) }, 0 < tau < 1.
IntSeq power_merge(IntSeq s, const Fraction& tau);

// kS = {k*s : s in S}.
IntSeq seq_scale(IntSeq s, std::uint64_t k);

// { floor(s_i/k) }, deduplicated; requires s_1 >= k.
IntSeq seq_floor_div(IntSeq s, std::uint64_t k);

// Block reversal f_m = s_{n_j} - s_{n_j - m} for n_{j-1} < m <= n_j.
// Anchor condition: n_1 >= 2 and n_{i+1} >= 1 + 2*sum_{j<=i} n_j.
// Throws "non-monotone reversal" when the result fails to increase.
IntSeq reverse_blocks(IntSeq s, const std::vector<std::uint64_t>& anchors);

// CLI mini-language: squares | nat | pow2 | floorpow:<1/tau> | arith:<a>,<d>
// | file:<path> | ft:<schedule-file>:<t>. The ft form needs a resolver so
// this module stays independent of the schedule module.
using FtResolver = std::function<IntSeq(const std::string& schedule_id, std::uint32_t t)>;
IntSeq parse_seq_spec(const std::string& spec, const FtResolver& ft = nullptr);

}  // namespace entdim
