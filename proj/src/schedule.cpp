#include "schedule.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace entdim {

using nlohmann::json;

const StageParams& Schedule::stage(std::uint32_t n) const {
    if (n >= stages.size()) throw Error(ErrorCode::invalid_argument, "stage " + std::to_string(n) + " beyond schedule depth");
    return stages[n];
}

BigInt Schedule::e_product(std::uint32_t n) const {
    BigInt p = 1;
    for (std::uint32_t j = 0; j < n; ++j) p *= BigInt(static_cast<unsigned long>(stage(j).e));
    return p;
}

const Insertion* Schedule::insertion_at(std::uint32_t n) const {
    for (const auto& ins : insertions)
        if (ins.n == n) return &ins;
    return nullptr;
}

const Insertion* Schedule::insertion_event(std::uint32_t t) const {
    for (const auto& ins : insertions)
        if (ins.t == t) return &ins;
    return nullptr;
}

std::uint64_t c_tau_for(const Fraction& tau) {
    if (tau.num == 0 || tau.num >= tau.den)
        throw Error(ErrorCode::invalid_argument, "tau must lie strictly in (0,1)");
    const std::uint64_t p = tau.num, q = tau.den;
    const BigInt rhs = ipow(BigInt(2), q - p);
    BigInt c = floor_rational_root(rhs, BigInt(1), p);  // largest c with c^p <= 2^(q-p)
    ++c;                                                // smallest with c^p > 2^(q-p)
    if (c < 2) c = 2;
    return to_u64_or_throw(c, "C_tau");
}

namespace {

void check_insertion_points(const std::vector<Insertion>& ins, bool paper) {
    for (std::size_t i = 0; i < ins.size(); ++i) {
        if (ins[i].l >= ins[i].n)
            throw Error(ErrorCode::invalid_argument, "insertion needs l_t < n_t");
        if (ins[i].l < (paper ? 2u : 1u))
            throw Error(ErrorCode::invalid_argument,
                        paper ? "paper insertions need l_t > 1" : "insertions need l_t >= 1");
        if (i > 0 && (ins[i].n <= ins[i - 1].n || ins[i].l <= ins[i - 1].l))
            throw Error(ErrorCode::invalid_argument, "insertion points must be strictly increasing");
    }
}

// Shared stage recursion. e_supplier(n, w_n, E_n) returns e_n (or 0 for
// "none"); r_supplier(n) returns r_n.
void fill_stages(Schedule& s, std::uint32_t depth,
                 const std::function<std::uint64_t(std::uint32_t)>& r_of,
                 const std::function<std::uint64_t(std::uint32_t, const BigInt&, const BigInt&)>& e_of) {
    s.stages.clear();
    s.stages.resize(depth + 1);
    BigInt e_prod = 1;

    for (std::uint32_t n = 0; n <= depth; ++n) {
        StageParams& sp = s.stages[n];
        sp.n = n;
        if (n == 0) {
            sp.h = 1;
            sp.c = 2;
            sp.r = 1;
            sp.h_tilde = 1;
            sp.w = 1;
        } else {
            const StageParams& prev = s.stages[n - 1];
            if (prev.e == 0)
                throw Error(ErrorCode::invalid_argument, "missing e_" + std::to_string(n - 1));
            sp.h = prev.w * BigInt(static_cast<unsigned long>(prev.e));
            sp.c = prev.insertion ? ipow(prev.c, prev.e + 1) : ipow(prev.c, prev.e);
            sp.r = r_of(n);
            if (sp.r < 1) throw Error(ErrorCode::invalid_argument, "r_n must be >= 1");
            sp.h_tilde = sp.h * BigInt(static_cast<unsigned long>(sp.r));
            sp.w = sp.h_tilde;
        }
        if (const Insertion* ins = s.insertion_at(n)) {
            sp.insertion = true;
            sp.event_t = ins->t;
            sp.h_star = ins->h_star_is_height ? s.stages[ins->l].h : ins->h_star;
            sp.w = sp.h_tilde + sp.h_star;
        }
        sp.e = e_of(n, sp.w, e_prod);
        sp.e_below_2 = (sp.e < 2);
        if (sp.e > 0) e_prod *= BigInt(static_cast<unsigned long>(sp.e));
    }
}

void fill_xi(Schedule& s) {
    // xi = product over scheduled insertions of (1 + h*/h_tilde)^{-1}
    Rational xi(1);
    for (const auto& ins : s.insertions) {
        const StageParams& sp = s.stage(ins.n);
        Rational f(sp.h_star, sp.h_tilde);
        f.canonicalize();
        xi /= (Rational(1) + f);
    }
    xi.canonicalize();
    s.xi = xi;
    // Ladder: xi_0 = xi, bumped after each insertion step.
    Rational cur = xi;
    for (std::uint32_t n = 0; n <= s.depth; ++n) {
        s.stages[n].xi = cur;
        if (s.stages[n].insertion) {
            Rational f(s.stages[n].h_star, s.stages[n].h_tilde);
            f.canonicalize();
            cur *= (Rational(1) + f);
            cur.canonicalize();
        }
    }
}

}  // namespace

Schedule paper_schedule(const Fraction& tau, std::uint32_t depth,
                        std::vector<std::pair<std::uint32_t, std::uint32_t>> insertions,
                        bool default_insertions) {
    if (depth < 1) throw Error(ErrorCode::invalid_argument, "depth must be >= 1");
    Schedule s;
    s.kind = Schedule::Kind::paper;
    s.tau = tau;
    s.c_tau = c_tau_for(tau);
    s.depth = depth;

    if (insertions.empty() && default_insertions)
        for (std::uint32_t t = 1; 3 * t < depth; ++t) insertions.emplace_back(3 * t, 3 * t - 1);

    std::uint32_t t = 1;
    Rational tail(0);
    for (const auto& [n, l] : insertions) {
        if (n >= depth) {
            // Scheduled but beyond build depth: contributes only to the tail bound.
            tail += Rational(1, static_cast<unsigned long>(s.c_tau) * n * n);
            continue;
        }
        Insertion ins;
        ins.t = t++;
        ins.n = n;
        ins.l = l;
        ins.h_star_is_height = true;
        s.insertions.push_back(ins);
    }
    check_insertion_points(s.insertions, true);
    // Beyond the last explicit event the default family continues forever;
    // sum_{t>T} 1/(C 9 t^2) < 1/(9 C T) certifies the omitted mass.
    if (default_insertions) {
        const std::uint32_t T = s.insertions.empty() ? 1 : s.insertions.back().t + 1;
        tail += Rational(1, static_cast<unsigned long>(9) * s.c_tau * T);
    }
    tail.canonicalize();
    s.xi_tail = tail;

    const std::uint64_t p = tau.num, q = tau.den;
    fill_stages(
        s, depth, [&](std::uint32_t n) { return s.c_tau * n * n; },
        [&](std::uint32_t n, const BigInt& w, const BigInt& e_prod) -> std::uint64_t {
            if (n == 0) return 2;  // e_0 = 2
            // e_n = floor((w^tau / prod)^{1/(1-tau)}) = floor((w^p / prod^q)^{1/(q-p)})
            BigInt e = floor_rational_root(ipow(w, p), ipow(e_prod, q), static_cast<unsigned long>(q - p));
            if (e < 1)
                throw Error(ErrorCode::degenerate_schedule,
                            "schedule degeneracy: e_" + std::to_string(n) + " < 1 for tau=" + tau.str());
            return to_u64_or_throw(e, "e_n");
        });
    fill_xi(s);
    return s;
}

Schedule toy_schedule(const std::vector<std::uint64_t>& e, const std::vector<std::uint64_t>& r,
                      const std::vector<ToyInsertionSpec>& insertions, std::optional<Fraction> tau,
                      std::optional<Rational> xi_override) {
    if (e.empty()) throw Error(ErrorCode::invalid_argument, "toy schedule needs at least e_0");
    for (auto v : e)
        if (v < 1) throw Error(ErrorCode::invalid_argument, "toy e_n must be >= 1");
    for (auto v : r)
        if (v < 1) throw Error(ErrorCode::invalid_argument, "toy r_n must be >= 1");
    const std::uint32_t depth = static_cast<std::uint32_t>(std::min(e.size(), r.size() + 0ul));
    if (depth < 1) throw Error(ErrorCode::invalid_argument, "toy schedule needs r_1 (depth >= 1)");

    Schedule s;
    s.kind = Schedule::Kind::toy;
    s.tau = tau;
    s.depth = depth;

    // First pass without h_star resolution to know heights? h_star for an
    // insertion at n references h_l with l < n, already computed when stage n
    // is reached, so a single pass works; record the specs up front.
    std::uint32_t t = 1;
    for (const auto& spec : insertions) {
        if (spec.n >= depth)
            throw Error(ErrorCode::invalid_argument, "toy insertion at n_t=" + std::to_string(spec.n) +
                                                         " is beyond depth " + std::to_string(depth));
        Insertion ins;
        ins.t = t++;
        ins.n = spec.n;
        ins.l = spec.l;
        if (spec.h_star) {
            ins.h_star = *spec.h_star;
            ins.h_star_is_height = false;
        }
        s.insertions.push_back(ins);
    }
    check_insertion_points(s.insertions, false);
    s.xi_tail = Rational(0);

    fill_stages(
        s, depth, [&](std::uint32_t n) { return r[n - 1]; },
        [&](std::uint32_t n, const BigInt&, const BigInt&) -> std::uint64_t {
            return n < e.size() ? e[n] : 0;
        });

    const BigInt cells = s.stages[depth].c * s.stages[depth].h;
    if (cells > BigInt(static_cast<unsigned long>(enumeration_budget())))
        throw Error(ErrorCode::budget_exceeded,
                    "enumeration infeasible; use sampling mode (projected cells " + cells.get_str() + ")");

    fill_xi(s);
    if (xi_override) {
        Rational xi = *xi_override;
        xi.canonicalize();
        if (sgn(xi) <= 0 || xi > 1) throw Error(ErrorCode::invalid_argument, "xi must lie in (0,1]");
        // Keep the ladder shape but rebase it at the override.
        Rational scale = xi / s.xi;
        s.xi = xi;
        for (auto& sp : s.stages) {
            sp.xi *= scale;
            sp.xi.canonicalize();
        }
    }
    return s;
}

ConditionReport validate_conditions(const Schedule& s, std::uint32_t depth) {
    depth = std::min(depth, s.depth);
    ConditionReport rep;
    rep.has_tau = s.tau.has_value();
    BigInt e_prod = 1;
    for (std::uint32_t n = 0; n <= depth; ++n) {
        const StageParams& sp = s.stage(n);
        ConditionReport::Stage row;
        row.n = n;
        row.e_at_least_2 = sp.e >= 2;
        if (rep.has_tau && n >= 1) {
            const std::uint64_t p = s.tau->num, q = s.tau->den;
            row.cond3_exact = ipow(sp.w, p) >= ipow(e_prod, q);
            if (sp.e > 0) {
                BigInt e_prod_next = e_prod * BigInt(static_cast<unsigned long>(sp.e));
                BigInt we = sp.w * BigInt(static_cast<unsigned long>(sp.e));
                Rational ratio_q(ipow(e_prod_next, q), ipow(we, p));
                ratio_q.canonicalize();
                row.cond1_ratio_pow_q = rational_str(ratio_q);
                row.cond1_ratio = static_cast<double>(
                    std::exp2((log2_big(BigInt(ratio_q.get_num())) - log2_big(BigInt(ratio_q.get_den()))) /
                              static_cast<long double>(q)));
            }
            if (!row.cond3_exact) rep.all_cond3 = false;
        }
        if (sp.e > 0) e_prod *= BigInt(static_cast<unsigned long>(sp.e));
        rep.stages.push_back(std::move(row));
    }
    return rep;
}

std::pair<Rational, Rational> xi_of(const Schedule& s) {
    Rational xi(1);
    for (const auto& ins : s.insertions) {
        const StageParams& sp = s.stage(ins.n);
        Rational f(sp.h_star, sp.h_tilde);
        f.canonicalize();
        xi /= (Rational(1) + f);
    }
    xi.canonicalize();
    return {xi, s.xi_tail};
}

namespace {

// Digits of m (0-based rank) in the mixed radix (e_{n_t}, e_{n_t+1}, ...).
// Because max F_{k-1} < w_{n_t+k}, lexicographic order on (.., d_1, d_0)
// equals numeric order of the sums, so rank m maps directly to a term.
BigInt ft_term(const Schedule& s, std::uint32_t nt, const BigInt& m) {
    BigInt rest = m;
    BigInt term = 0;
    std::uint32_t n = nt;
    while (rest > 0) {
        if (n > s.depth || s.stage(n).e == 0)
            throw Error(ErrorCode::invalid_argument, "F^t rank beyond schedule depth");
        const unsigned long e = static_cast<unsigned long>(s.stage(n).e);
        BigInt d = rest % e;
        rest /= e;
        term += d * s.stage(n).w;
        ++n;
    }
    return term;
}

void check_ft_nonoverlap(const Schedule& s, std::uint32_t nt, std::uint32_t n_hi) {
    BigInt max_prev = 0;
    for (std::uint32_t n = nt; n <= n_hi; ++n) {
        if (n > nt && max_prev >= s.stage(n).w)
            throw Error(ErrorCode::verify_failed,
                        "sumset collision: max F_{k-1} >= w_" + std::to_string(n));
        max_prev += BigInt(static_cast<unsigned long>(s.stage(n).e - 1)) * s.stage(n).w;
    }
}

}  // namespace

IntSeq ft_sequence(const Schedule& s, std::uint32_t t) {
    const Insertion* ins = s.insertion_event(t);
    if (!ins) throw Error(ErrorCode::invalid_argument, "no insertion event t=" + std::to_string(t));
    const std::uint32_t nt = ins->n;
    // Highest usable stage: params with e present.
    std::uint32_t n_hi = nt;
    while (n_hi < s.depth && s.stage(n_hi + 1).e > 0) ++n_hi;
    check_ft_nonoverlap(s, nt, n_hi);
    BigInt capacity = 1;
    for (std::uint32_t n = nt; n <= n_hi; ++n) capacity *= BigInt(static_cast<unsigned long>(s.stage(n).e));

    Schedule sched = s;  // captured by value; schedules are immutable
    auto ext = [sched, nt, capacity](std::vector<BigInt>& out, std::size_t n) {
        while (out.size() < n) {
            BigInt m(static_cast<unsigned long>(out.size()));
            if (m >= capacity) return false;
            out.push_back(ft_term(sched, nt, m) + 1);  // shifted to 1-based
        }
        return true;
    };
    return IntSeq("ft:t=" + std::to_string(t), {}, std::move(ext), /*zero_based_offsets=*/true);
}

std::vector<std::pair<BigInt, BigInt>> ft_checkpoints(const Schedule& s, std::uint32_t t) {
    const Insertion* ins = s.insertion_event(t);
    if (!ins) throw Error(ErrorCode::invalid_argument, "no insertion event t=" + std::to_string(t));
    const std::uint32_t nt = ins->n;
    std::vector<std::pair<BigInt, BigInt>> cps;
    BigInt count = 1;
    BigInt max_term = 0;
    for (std::uint32_t n = nt; n <= s.depth && s.stage(n).e > 0; ++n) {
        if (n > nt && max_term >= s.stage(n).w)
            throw Error(ErrorCode::verify_failed, "sumset collision: max F_{k-1} >= w_" + std::to_string(n));
        count *= BigInt(static_cast<unsigned long>(s.stage(n).e));
        max_term += BigInt(static_cast<unsigned long>(s.stage(n).e - 1)) * s.stage(n).w;
        cps.emplace_back(count, max_term + 1);  // same 1-based shift as ft_sequence
    }
    return cps;
}

namespace {

json stage_to_json(const StageParams& sp) {
    json j;
    j["n"] = sp.n;
    j["e"] = std::to_string(sp.e);
    j["r"] = std::to_string(sp.r);
    j["h"] = to_decimal(sp.h);
    j["h_tilde"] = to_decimal(sp.h_tilde);
    j["w"] = to_decimal(sp.w);
    j["c"] = to_decimal(sp.c);
    j["xi"] = rational_str(sp.xi);
    if (sp.insertion) {
        j["insertion"] = true;
        j["event_t"] = sp.event_t;
        j["h_star"] = to_decimal(sp.h_star);
    }
    return j;
}

}  // namespace

std::string Schedule::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = kind == Kind::paper ? "paper" : "toy";
    if (tau) j["tau"] = tau->str();
    if (kind == Kind::paper) j["c_tau"] = c_tau;
    j["depth"] = depth;
    j["xi"] = rational_str(xi);
    j["xi_tail_bound"] = rational_str(xi_tail);
    j["stages"] = json::array();
    for (const auto& sp : stages) j["stages"].push_back(stage_to_json(sp));
    j["insertions"] = json::array();
    for (const auto& ins : insertions) {
        json ji;
        ji["t"] = ins.t;
        ji["n"] = ins.n;
        ji["l"] = ins.l;
        ji["h_star"] = to_decimal(stage(ins.n).h_star);
        ji["h_star_is_height"] = ins.h_star_is_height;
        j["insertions"].push_back(ji);
    }
    return j.dump(2);
}

Schedule Schedule::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::io, std::string("schedule JSON parse error: ") + e.what());
    }
    try {
        Schedule s;
        s.kind = j.at("kind").get<std::string>() == "paper" ? Kind::paper : Kind::toy;
        if (j.contains("tau")) s.tau = parse_fraction(j["tau"].get<std::string>());
        if (j.contains("c_tau")) s.c_tau = j["c_tau"].get<std::uint64_t>();
        s.depth = j.at("depth").get<std::uint32_t>();
        s.xi = parse_rational(j.at("xi").get<std::string>());
        s.xi_tail = parse_rational(j.at("xi_tail_bound").get<std::string>());
        for (const auto& js : j.at("stages")) {
            StageParams sp;
            sp.n = js.at("n").get<std::uint32_t>();
            sp.e = std::stoull(js.at("e").get<std::string>());
            sp.r = std::stoull(js.at("r").get<std::string>());
            sp.h = parse_bigint(js.at("h").get<std::string>());
            sp.h_tilde = parse_bigint(js.at("h_tilde").get<std::string>());
            sp.w = parse_bigint(js.at("w").get<std::string>());
            sp.c = parse_bigint(js.at("c").get<std::string>());
            sp.xi = parse_rational(js.at("xi").get<std::string>());
            sp.e_below_2 = sp.e < 2;
            if (js.contains("insertion")) {
                sp.insertion = true;
                sp.event_t = js.at("event_t").get<std::uint32_t>();
                sp.h_star = parse_bigint(js.at("h_star").get<std::string>());
            }
            s.stages.push_back(std::move(sp));
        }
        for (const auto& ji : j.at("insertions")) {
            Insertion ins;
            ins.t = ji.at("t").get<std::uint32_t>();
            ins.n = ji.at("n").get<std::uint32_t>();
            ins.l = ji.at("l").get<std::uint32_t>();
            ins.h_star = parse_bigint(ji.at("h_star").get<std::string>());
            ins.h_star_is_height = ji.at("h_star_is_height").get<bool>();
            s.insertions.push_back(std::move(ins));
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::io, std::string("schedule JSON missing field: ") + e.what());
    }
}

std::string ConditionReport::to_json() const {
    json j;
    j["all_cond3"] = all_cond3;
    j["has_tau"] = has_tau;
    j["stages"] = json::array();
    for (const auto& st : stages) {
        json js;
        js["n"] = st.n;
        js["cond3_exact"] = st.cond3_exact;
        js["e_at_least_2"] = st.e_at_least_2;
        js["cond1_ratio"] = st.cond1_ratio;
        js["cond1_ratio_pow_q"] = st.cond1_ratio_pow_q;
        j["stages"].push_back(js);
    }
    return j.dump(2);
}

}  // namespace entdim
