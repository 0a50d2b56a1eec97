// Cutting-and-stacking engine. Towers are kept as a ladder of operation
// descriptors with exact rational widths; columns are never materialized.
// A column of a deep stage is addressed by digits: every Ind/Ins step
// contributes one digit per segment (the parent-column choice, slot 0 at the
// base), and level queries walk the descriptors downward in O(steps).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rng.hpp"
#include "schedule.hpp"

namespace entdim {

struct TowerOp {
    enum class Kind { initial, ind, rep, ins };
    Kind kind = Kind::initial;
    std::uint64_t e = 0;
    std::uint64_t r = 0;
    std::uint64_t h_star = 0;
    std::uint32_t event_t = 0;
};

struct TowerStage {
    std::uint32_t index = 0;  // ladder position: 2n = W_n, 2n+1 = tilde(W_n)
    std::string label;        // "W0", "W~0", "W1", ...
    std::uint32_t sched_n = 0;
    bool tilde = false;
    TowerOp op;
    std::uint64_t height = 1;
    BigInt columns;
    std::optional<std::uint64_t> columns_u64;
    Rational width;    // width of each column (all equal)
    Rational measure;  // height * columns * width
    Rational spacer_consumed;  // consumed by this step (nonzero only for ins)
    std::uint64_t parent_height = 0;
    BigInt parent_columns;
    std::optional<std::uint64_t> parent_columns_u64;
    std::uint32_t digit_slots = 0;  // ind: e, ins: e+1, otherwise 0
};

struct SpacerPool {
    Rational total;     // 1 - xi
    Rational consumed;  // sum of insertion masses so far
    Rational remainder() const {
        Rational r = total - consumed;
        r.canonicalize();
        return r;
    }
};

// Identity of a level set: either a level of a reference stage or a spacer
// from a specific insertion event (segment + slot within the inserted run).
struct LineageTag {
    bool spacer = false;
    std::uint32_t stage_idx = 0;  // ladder index: ref stage, or the ins stage for spacers
    std::uint64_t column = 0;
    std::uint64_t level = 0;  // level kind: 0-based from base; spacer kind: slot in [0, h*)
    std::uint32_t event_t = 0;
    std::uint64_t segment = 0;

    bool operator==(const LineageTag&) const = default;
};

// A sampled deep column: digits of the topmost Ind/Ins step, drawn uniformly.
// All column counts below that step must fit in 64 bits.
struct SampledColumn {
    std::uint32_t digits_stage_idx = 0;  // the Ind/Ins step whose digits these are
    std::vector<std::uint64_t> digits;
};

class TowerLadder {
public:
    // Builds W_0, tilde(W_0), W_1, ..., W_depth from the schedule, checking
    // every height/count/measure against the schedule's ladder exactly.
    static TowerLadder build(const Schedule& s, std::uint32_t depth);

    // Manual construction for tests and toy experiments.
    static TowerLadder initial(const Rational& xi);
    void apply_ind(std::uint64_t e);
    void apply_rep(std::uint64_t r);
    void apply_ins(std::uint64_t e, std::uint64_t h_star, std::uint32_t event_t = 0);

    const TowerStage& stage(std::uint32_t idx) const { return stages_.at(idx); }
    const TowerStage& top() const { return stages_.back(); }
    std::uint32_t ladder_index(std::uint32_t n, bool tilde) const;
    std::size_t size() const { return stages_.size(); }
    const SpacerPool& pool() const { return pool_; }
    const Schedule* schedule() const { return sched_ ? &*sched_ : nullptr; }

    // Level query: walks (column, level) at stage `from_idx` down to
    // `ref_idx`, returning the lineage tag there (or the spacer event hit on
    // the way). Column counts at and below from_idx must fit in u64.
    LineageTag resolve(std::uint32_t from_idx, std::uint64_t column, std::uint64_t level,
                       std::uint32_t ref_idx) const;

    // Same walk capturing tags at several reference stages (descending order
    // not required). refs must be <= from_idx; returns tags in refs' order.
    void resolve_multi(std::uint32_t from_idx, std::uint64_t column, std::uint64_t level,
                       const std::vector<std::uint32_t>& refs, std::vector<LineageTag>& out) const;

    // Sampled variants for stages whose column count exceeds the enumeration
    // budget. Digits are drawn uniformly per sample.
    SampledColumn sample_column(std::uint32_t stage_idx, Rng& rng) const;
    LineageTag resolve_sampled(std::uint32_t from_idx, const SampledColumn& col, std::uint64_t level,
                               std::uint32_t ref_idx) const;
    void resolve_sampled_multi(std::uint32_t from_idx, const SampledColumn& col, std::uint64_t level,
                               const std::vector<std::uint32_t>& refs, std::vector<LineageTag>& out) const;

    // Name of a column as a word over {0,1,s}, base level first.
    std::string name_of(std::uint32_t stage_idx, std::uint64_t column) const;

    // Distinct names of an enumerable stage (the paper's N(W)).
    std::uint64_t distinct_name_count(std::uint32_t stage_idx) const;

    bool enumerable(std::uint32_t stage_idx) const;

    std::string to_json(bool dump_names) const;
    static TowerLadder from_json(const std::string& text);

private:
    TowerLadder() = default;
    void push_stage(TowerStage st);
    std::uint64_t digit_of(const TowerStage& st, std::uint64_t column, std::uint32_t slot) const;

    std::vector<TowerStage> stages_;
    SpacerPool pool_;
    std::optional<Schedule> sched_;
    std::uint32_t requested_depth_ = 0;
};

}  // namespace entdim
