// Parameter schedules for the cutting-and-stacking construction: the r_n /
// e_n / h_n / w_n / c_n / xi_n family, generated either from a target
// dimension tau or from explicit toy lists, with exact integer arithmetic
// throughout.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intseq.hpp"
#include "numeric.hpp"

namespace entdim {

struct StageParams {
    std::uint32_t n = 0;
    std::uint64_t e = 0;  // 0 when the trailing stage has no e yet
    std::uint64_t r = 1;
    BigInt h;        // height of W_n
    BigInt h_tilde;  // height of tilde(W_n) = h*r
    BigInt w;        // the paper's w_n
    BigInt c;        // column count of W_n
    Rational xi;     // measure of W_n (and of tilde(W_n))
    bool insertion = false;  // n = n_t for some t
    std::uint32_t event_t = 0;
    BigInt h_star;           // spacer height used when building W_{n+1}
    bool e_below_2 = false;  // paper bound e_n >= 2 violated at this stage
};

struct Insertion {
    std::uint32_t t = 0;  // 1-based event index
    std::uint32_t n = 0;  // the paper's n_t
    std::uint32_t l = 0;  // the paper's l_t
    BigInt h_star;        // h_{l_t} unless a toy overrides it
    bool h_star_is_height = true;  // h_star == h_{l_t}
};

struct Schedule {
    enum class Kind { paper, toy };
    Kind kind = Kind::paper;
    std::optional<Fraction> tau;
    std::uint64_t c_tau = 0;  // paper only
    std::uint32_t depth = 0;  // stages 0..depth populated
    std::vector<StageParams> stages;
    std::vector<Insertion> insertions;  // sorted by t; all have n < depth
    Rational xi;       // truncated product over scheduled insertions
    Rational xi_tail;  // certified bound on the omitted tail sum 1/r_{n_t}

    const StageParams& stage(std::uint32_t n) const;
    // Product e_0*e_1*...*e_{n-1}.
    BigInt e_product(std::uint32_t n) const;
    const Insertion* insertion_at(std::uint32_t n) const;
    const Insertion* insertion_event(std::uint32_t t) const;

    std::string to_json() const;
    static Schedule from_json(const std::string& text);
};

// Smallest integer C with C^(tau/(1-tau)) > 2, i.e. C^p > 2^(q-p).
std::uint64_t c_tau_for(const Fraction& tau);

// Builds the paper schedule for tau to the given depth. Insertion events are
// (n_t, l_t) pairs; when `insertions` is empty the default family n_t = 3t,
// l_t = 3t-1 is used (restricted to n_t < depth). Throws "schedule
// degeneracy" if some e_n floors to zero.
Schedule paper_schedule(const Fraction& tau, std::uint32_t depth,
                        std::vector<std::pair<std::uint32_t, std::uint32_t>> insertions = {},
                        bool default_insertions = true);

struct ToyInsertionSpec {
    std::uint32_t n = 0;
    std::uint32_t l = 0;
    std::optional<BigInt> h_star;  // defaults to h_{l}
};

// e = [e_0..], r = [r_1..]; depth = min(|e|, |r|). Column counts are capped
// by the enumeration budget ("enumeration infeasible; use sampling mode").
Schedule toy_schedule(const std::vector<std::uint64_t>& e, const std::vector<std::uint64_t>& r,
                      const std::vector<ToyInsertionSpec>& insertions = {},
                      std::optional<Fraction> tau = std::nullopt,
                      std::optional<Rational> xi_override = std::nullopt);

struct ConditionReport {
    struct Stage {
        std::uint32_t n = 0;
        bool cond3_exact = false;     // w_n^p >= (e_0..e_{n-1})^q
        bool e_at_least_2 = false;    // the paper's bound
        double cond1_ratio = 0.0;     // e_0..e_n / (w_n e_n)^tau
        std::string cond1_ratio_pow_q;  // exact rational (ratio)^q as "p/q"
    };
    std::vector<Stage> stages;
    bool all_cond3 = true;
    bool has_tau = false;
    std::string to_json() const;
};

ConditionReport validate_conditions(const Schedule& s, std::uint32_t depth);

// Truncated product and its certified tail bound (already stored on the
// schedule; recomputed here from first principles for the verify suites).
std::pair<Rational, Rational> xi_of(const Schedule& s);

// The sequence F^t of eq. (def-fl), as a 1-based IntSeq (offsets shifted by
// one; IntSeq::offsets undoes the shift). Lazily extendable while stage
// parameters exist; checks the non-overlap condition and throws "sumset
// collision" when a toy schedule violates it.
IntSeq ft_sequence(const Schedule& s, std::uint32_t t);

// Exact (n, s_n) profile checkpoints of F^t at block boundaries k = 0,1,...:
// n = e_{n_t}...e_{n_t+k}, s_n = 1 + sum_j (e_{n_t+j}-1) w_{n_t+j}. These are
// genuine terms of the (shifted) sequence, evaluated without materializing
// the astronomically many terms in between.
std::vector<std::pair<BigInt, BigInt>> ft_checkpoints(const Schedule& s, std::uint32_t t);

}  // namespace entdim
