#include "tower.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

namespace entdim {

using nlohmann::json;

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    if (p > UINT64_MAX)
        throw Error(ErrorCode::budget_exceeded, std::string(what) + " exceeds 64-bit range");
    return static_cast<std::uint64_t>(p);
}

}  // namespace

TowerLadder TowerLadder::initial(const Rational& xi) {
    Rational x = xi;
    x.canonicalize();
    if (sgn(x) <= 0 || x > 1) throw Error(ErrorCode::invalid_argument, "initial tower needs 0 < xi <= 1");
    TowerLadder L;
    TowerStage st;
    st.index = 0;
    st.label = "W0";
    st.op.kind = TowerOp::Kind::initial;
    st.height = 1;
    st.columns = 2;
    st.columns_u64 = 2;
    st.width = x / 2;
    st.width.canonicalize();
    st.measure = x;
    st.parent_columns = 0;
    L.stages_.push_back(std::move(st));
    L.pool_.total = Rational(1) - x;
    L.pool_.total.canonicalize();
    L.pool_.consumed = 0;
    return L;
}

void TowerLadder::push_stage(TowerStage st) {
    st.index = static_cast<std::uint32_t>(stages_.size());
    if (st.label.empty()) st.label = "s" + std::to_string(st.index);
    st.columns_u64 = to_u64(st.columns);
    stages_.push_back(std::move(st));
}

void TowerLadder::apply_ind(std::uint64_t e) {
    if (e < 1) throw Error(ErrorCode::invalid_argument, "ind needs e >= 1");
    const TowerStage& p = stages_.back();
    TowerStage st;
    st.op.kind = TowerOp::Kind::ind;
    st.op.e = e;
    st.height = checked_mul(e, p.height, "tower height");
    st.columns = ipow(p.columns, e);
    // width' = width / (e * c^(e-1))
    st.width = p.width / (Rational(BigInt(static_cast<unsigned long>(e))) * Rational(ipow(p.columns, e - 1)));
    st.width.canonicalize();
    st.measure = p.measure;
    st.spacer_consumed = 0;
    st.parent_height = p.height;
    st.parent_columns = p.columns;
    st.parent_columns_u64 = p.columns_u64;
    st.digit_slots = static_cast<std::uint32_t>(e);
    push_stage(std::move(st));
}

void TowerLadder::apply_rep(std::uint64_t r) {
    if (r < 1) throw Error(ErrorCode::invalid_argument, "rep needs r >= 1");
    const TowerStage& p = stages_.back();
    TowerStage st;
    st.op.kind = TowerOp::Kind::rep;
    st.op.r = r;
    st.height = checked_mul(r, p.height, "tower height");
    st.columns = p.columns;
    st.width = p.width / Rational(BigInt(static_cast<unsigned long>(r)));
    st.width.canonicalize();
    st.measure = p.measure;
    st.spacer_consumed = 0;
    st.parent_height = p.height;
    st.parent_columns = p.columns;
    st.parent_columns_u64 = p.columns_u64;
    st.digit_slots = 0;
    push_stage(std::move(st));
}

void TowerLadder::apply_ins(std::uint64_t e, std::uint64_t h_star, std::uint32_t event_t) {
    if (e < 1 || h_star < 1) throw Error(ErrorCode::invalid_argument, "ins needs e, h* >= 1");
    const TowerStage& p = stages_.back();
    TowerStage st;
    st.op.kind = TowerOp::Kind::ins;
    st.op.e = e;
    st.op.h_star = h_star;
    st.op.event_t = event_t;
    st.height = checked_mul(e, p.height + h_star, "tower height");
    st.columns = ipow(p.columns, e + 1);
    st.width = p.width / (Rational(BigInt(static_cast<unsigned long>(e))) * Rational(ipow(p.columns, e)));
    st.width.canonicalize();
    // spacer mass: c^{e+1} columns, e*h* spacer levels each
    Rational mass = Rational(st.columns) * Rational(BigInt(static_cast<unsigned long>(e * h_star))) * st.width;
    mass.canonicalize();
    st.spacer_consumed = mass;
    st.measure = p.measure + mass;
    st.measure.canonicalize();
    st.parent_height = p.height;
    st.parent_columns = p.columns;
    st.parent_columns_u64 = p.columns_u64;
    st.digit_slots = static_cast<std::uint32_t>(e + 1);

    pool_.consumed += mass;
    pool_.consumed.canonicalize();
    if (pool_.consumed > pool_.total)
        throw Error(ErrorCode::pool_overdrawn,
                    "spacer pool overdrawn: consumed " + rational_str(pool_.consumed) + " of " +
                        rational_str(pool_.total));
    push_stage(std::move(st));
}

TowerLadder TowerLadder::build(const Schedule& s, std::uint32_t depth) {
    if (depth > s.depth)
        throw Error(ErrorCode::invalid_argument, "build depth exceeds schedule depth");
    TowerLadder L = initial(s.xi);
    L.sched_ = s;
    L.requested_depth_ = depth;
    L.stages_[0].sched_n = 0;

    auto check_stage = [&](std::uint32_t n, bool tilde) {
        const TowerStage& st = L.stages_.back();
        const StageParams& sp = s.stage(n);
        const BigInt want_h = tilde ? sp.h_tilde : sp.h;
        if (BigInt(static_cast<unsigned long>(st.height)) != want_h)
            throw Error(ErrorCode::internal, "height mismatch vs schedule at stage " + st.label);
        if (st.columns != sp.c)
            throw Error(ErrorCode::internal, "column count mismatch vs schedule at stage " + st.label);
        Rational m = st.measure;
        m.canonicalize();
        if (m != sp.xi)
            throw Error(ErrorCode::internal, "measure mismatch vs schedule at stage " + st.label);
    };

    for (std::uint32_t n = 0; n <= depth; ++n) {
        if (n > 0) {
            const StageParams& prev = s.stage(n - 1);
            if (prev.insertion)
                L.apply_ins(prev.e, to_u64_or_throw(prev.h_star, "h_star"), prev.event_t);
            else
                L.apply_ind(prev.e);
            L.stages_.back().label = "W" + std::to_string(n);
            L.stages_.back().sched_n = n;
            check_stage(n, false);
        }
        if (n < depth) {
            L.apply_rep(n == 0 ? 1 : s.stage(n).r);
            L.stages_.back().label = "W~" + std::to_string(n);
            L.stages_.back().sched_n = n;
            L.stages_.back().tilde = true;
            check_stage(n, true);
        }
    }
    return L;
}

std::uint32_t TowerLadder::ladder_index(std::uint32_t n, bool tilde) const {
    const std::uint32_t idx = 2 * n + (tilde ? 1 : 0);
    if (idx >= stages_.size())
        throw Error(ErrorCode::invalid_argument, "stage W" + std::string(tilde ? "~" : "") +
                                                     std::to_string(n) + " not built");
    return idx;
}

bool TowerLadder::enumerable(std::uint32_t stage_idx) const {
    const TowerStage& st = stage(stage_idx);
    if (!st.columns_u64) return false;
    return BigInt(st.columns) * BigInt(static_cast<unsigned long>(st.height)) <=
           BigInt(static_cast<unsigned long>(enumeration_budget()));
}

std::uint64_t TowerLadder::digit_of(const TowerStage& st, std::uint64_t column, std::uint32_t slot) const {
    // slot 0 is the base segment i_1 (most significant digit).
    const std::uint64_t c = *st.parent_columns_u64;
    std::uint64_t div = 1;
    for (std::uint32_t j = st.digit_slots - 1 - slot; j > 0; --j) div = checked_mul(div, c, "digit radix");
    return (column / div) % c;
}

namespace {

LineageTag spacer_tag(const TowerStage& st, std::uint64_t segment, std::uint64_t slot) {
    LineageTag t;
    t.spacer = true;
    t.stage_idx = st.index;
    t.event_t = st.op.event_t;
    t.segment = segment;
    t.level = slot;
    return t;
}

}  // namespace

LineageTag TowerLadder::resolve(std::uint32_t from_idx, std::uint64_t column, std::uint64_t level,
                                std::uint32_t ref_idx) const {
    std::vector<LineageTag> out;
    resolve_multi(from_idx, column, level, {ref_idx}, out);
    return out[0];
}

void TowerLadder::resolve_multi(std::uint32_t from_idx, std::uint64_t column, std::uint64_t level,
                                const std::vector<std::uint32_t>& refs, std::vector<LineageTag>& out) const {
    out.assign(refs.size(), LineageTag{});
    std::vector<bool> done(refs.size(), false);
    std::uint32_t cur = from_idx;
    std::uint32_t remaining = static_cast<std::uint32_t>(refs.size());

    auto capture_levels = [&](std::uint32_t at, std::uint64_t col, std::uint64_t lev) {
        for (std::size_t i = 0; i < refs.size(); ++i) {
            if (!done[i] && refs[i] == at) {
                out[i] = LineageTag{false, at, col, lev, 0, 0};
                done[i] = true;
                --remaining;
            }
        }
    };
    auto capture_spacer = [&](const LineageTag& tag) {
        for (std::size_t i = 0; i < refs.size(); ++i) {
            if (!done[i]) {
                out[i] = tag;
                done[i] = true;
                --remaining;
            }
        }
    };

    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (refs[i] > from_idx) throw Error(ErrorCode::invalid_argument, "ref stage above query stage");
    }
    if (stage(from_idx).columns_u64 == std::nullopt)
        throw Error(ErrorCode::invalid_argument, "column index at stage " + stage(from_idx).label +
                                                     " does not fit 64 bits; use sampling");
    if (level >= stage(from_idx).height || column >= *stage(from_idx).columns_u64)
        throw Error(ErrorCode::invalid_argument, "column/level out of range");

    capture_levels(cur, column, level);
    while (remaining > 0) {
        const TowerStage& st = stage(cur);
        switch (st.op.kind) {
            case TowerOp::Kind::initial:
                throw Error(ErrorCode::internal, "resolve descended past the initial stage");
            case TowerOp::Kind::rep:
                level %= st.parent_height;
                break;
            case TowerOp::Kind::ind: {
                const std::uint64_t k = level / st.parent_height;
                level %= st.parent_height;
                column = digit_of(st, column, static_cast<std::uint32_t>(k));
                break;
            }
            case TowerOp::Kind::ins: {
                const std::uint64_t seg_len = st.parent_height + st.op.h_star;
                const std::uint64_t k = level / seg_len;
                const std::uint64_t m = level % seg_len;
                // segment k (0-based) takes l = i_{k+2} mod h* spacers below,
                // with 1-based digit values i.
                const std::uint64_t off =
                    (digit_of(st, column, static_cast<std::uint32_t>(k + 1)) + 1) % st.op.h_star;
                if (m < off) {
                    capture_spacer(spacer_tag(st, k, m));
                    return;
                }
                if (m >= off + st.parent_height) {
                    capture_spacer(spacer_tag(st, k, m - st.parent_height));
                    return;
                }
                column = digit_of(st, column, static_cast<std::uint32_t>(k));
                level = m - off;
                break;
            }
        }
        --cur;
        capture_levels(cur, column, level);
    }
}

SampledColumn TowerLadder::sample_column(std::uint32_t stage_idx, Rng& rng) const {
    // Walk down through rep stages (they do not split columns) to the topmost
    // Ind/Ins step and draw its digits uniformly.
    std::uint32_t cur = stage_idx;
    while (cur > 0 && stage(cur).op.kind == TowerOp::Kind::rep) --cur;
    SampledColumn col;
    col.digits_stage_idx = cur;
    if (cur == 0) {  // initial stage: the digit is the column itself
        col.digits.push_back(rng.below(2));
        return col;
    }
    const TowerStage& st = stage(cur);
    if (!st.parent_columns_u64)
        throw Error(ErrorCode::budget_exceeded,
                    "sampling needs parent column counts within 64 bits at " + st.label);
    col.digits.resize(st.digit_slots);
    for (auto& d : col.digits) d = rng.below(*st.parent_columns_u64);
    return col;
}

void TowerLadder::resolve_sampled_multi(std::uint32_t from_idx, const SampledColumn& col,
                                        std::uint64_t level, const std::vector<std::uint32_t>& refs,
                                        std::vector<LineageTag>& out) const {
    // Handle rep stages above the digit step, then the digit step itself,
    // then fall through to the small-index walk.
    std::uint32_t cur = from_idx;
    std::uint64_t lev = level;
    if (level >= stage(from_idx).height) throw Error(ErrorCode::invalid_argument, "level out of range");

    for (auto r : refs)
        if (r > from_idx) throw Error(ErrorCode::invalid_argument, "ref stage above query stage");

    while (cur > col.digits_stage_idx) {
        const TowerStage& st = stage(cur);
        if (st.op.kind != TowerOp::Kind::rep)
            throw Error(ErrorCode::internal, "sampled column digits below a non-rep stage");
        for (auto r : refs)
            if (r == cur)
                throw Error(ErrorCode::invalid_argument,
                            "ref stage " + st.label + " has non-enumerable columns");
        lev %= st.parent_height;
        --cur;
    }

    if (cur == 0) {
        resolve_multi(0, col.digits.at(0), lev, refs, out);
        return;
    }

    const TowerStage& st = stage(cur);
    std::uint64_t column = 0;
    bool spacer_hit = false;
    LineageTag sp_tag;
    switch (st.op.kind) {
        case TowerOp::Kind::ind: {
            const std::uint64_t k = lev / st.parent_height;
            lev %= st.parent_height;
            column = col.digits.at(k);
            break;
        }
        case TowerOp::Kind::ins: {
            const std::uint64_t seg_len = st.parent_height + st.op.h_star;
            const std::uint64_t k = lev / seg_len;
            const std::uint64_t m = lev % seg_len;
            const std::uint64_t off = (col.digits.at(k + 1) + 1) % st.op.h_star;
            if (m < off) {
                spacer_hit = true;
                sp_tag = spacer_tag(st, k, m);
            } else if (m >= off + st.parent_height) {
                spacer_hit = true;
                sp_tag = spacer_tag(st, k, m - st.parent_height);
            } else {
                column = col.digits.at(k);
                lev = m - off;
            }
            break;
        }
        default:
            throw Error(ErrorCode::internal, "unexpected op at sampled digit stage");
    }

    if (!spacer_hit && std::find(refs.begin(), refs.end(), cur) != refs.end())
        throw Error(ErrorCode::invalid_argument, "ref stage " + st.label + " has non-enumerable columns");

    if (spacer_hit) {
        out.assign(refs.size(), sp_tag);
        return;
    }
    resolve_multi(cur - 1, column, lev, refs, out);
}

LineageTag TowerLadder::resolve_sampled(std::uint32_t from_idx, const SampledColumn& col,
                                        std::uint64_t level, std::uint32_t ref_idx) const {
    std::vector<LineageTag> out;
    resolve_sampled_multi(from_idx, col, level, {ref_idx}, out);
    return out[0];
}

std::string TowerLadder::name_of(std::uint32_t stage_idx, std::uint64_t column) const {
    const TowerStage& st = stage(stage_idx);
    if (BigInt(static_cast<unsigned long>(st.height)) > BigInt(static_cast<unsigned long>(enumeration_budget())))
        throw Error(ErrorCode::budget_exceeded, "name materialization beyond budget");
    std::string name;
    name.reserve(st.height);
    for (std::uint64_t lev = 0; lev < st.height; ++lev) {
        LineageTag tag = resolve(stage_idx, column, lev, 0);
        if (tag.spacer)
            name.push_back('s');
        else
            name.push_back(tag.column == 0 ? '0' : '1');
    }
    return name;
}

std::uint64_t TowerLadder::distinct_name_count(std::uint32_t stage_idx) const {
    const TowerStage& st = stage(stage_idx);
    if (!enumerable(stage_idx))
        throw Error(ErrorCode::budget_exceeded, "name counting beyond enumeration budget");
    std::set<std::string> names;
    for (std::uint64_t c = 0; c < *st.columns_u64; ++c) names.insert(name_of(stage_idx, c));
    return names.size();
}

std::string TowerLadder::to_json(bool dump_names) const {
    json j;
    j["schema_version"] = 1;
    if (sched_) j["schedule"] = json::parse(sched_->to_json());
    j["depth"] = requested_depth_;
    j["pool"] = {{"total", rational_str(pool_.total)}, {"consumed", rational_str(pool_.consumed)}};
    j["stages"] = json::array();
    for (const auto& st : stages_) {
        json js;
        js["label"] = st.label;
        switch (st.op.kind) {
            case TowerOp::Kind::initial: js["op"] = "initial"; break;
            case TowerOp::Kind::ind: js["op"] = "ind"; js["e"] = st.op.e; break;
            case TowerOp::Kind::rep: js["op"] = "rep"; js["r"] = st.op.r; break;
            case TowerOp::Kind::ins:
                js["op"] = "ins";
                js["e"] = st.op.e;
                js["h_star"] = st.op.h_star;
                js["event_t"] = st.op.event_t;
                js["ins_offset_convention"] = "segment k takes (i_{k+1} mod h*) spacers below, 1-based digits";
                break;
        }
        js["height"] = std::to_string(st.height);
        js["columns"] = to_decimal(st.columns);
        js["width"] = rational_str(st.width);
        js["measure"] = rational_str(st.measure);
        if (st.op.kind == TowerOp::Kind::ins) js["spacer_consumed"] = rational_str(st.spacer_consumed);
        if (dump_names) {
            if (!enumerable(st.index))
                throw Error(ErrorCode::budget_exceeded, "name dump refused: stage " + st.label +
                                                            " beyond enumeration budget");
            json names = json::array();
            for (std::uint64_t c = 0; c < *st.columns_u64; ++c) names.push_back(name_of(st.index, c));
            js["names"] = names;
        }
        j["stages"].push_back(js);
    }
    return j.dump(2);
}

TowerLadder TowerLadder::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::io, std::string("tower JSON parse error: ") + e.what());
    }
    if (!j.contains("schedule"))
        throw Error(ErrorCode::io, "tower JSON lacks an embedded schedule");
    Schedule s = Schedule::from_json(j["schedule"].dump());
    const std::uint32_t depth = j.at("depth").get<std::uint32_t>();
    TowerLadder L = build(s, depth);
    // Sanity: the serialized ladder must match the rebuilt one.
    if (j.at("stages").size() != L.stages_.size())
        throw Error(ErrorCode::io, "tower JSON stage count mismatch");
    for (std::size_t i = 0; i < L.stages_.size(); ++i) {
        const auto& js = j["stages"][i];
        if (parse_bigint(js.at("columns").get<std::string>()) != L.stages_[i].columns ||
            parse_rational(js.at("measure").get<std::string>()) != L.stages_[i].measure)
            throw Error(ErrorCode::io, "tower JSON inconsistent with its schedule at stage " +
                                           L.stages_[i].label);
    }
    return L;
}

}  // namespace entdim
