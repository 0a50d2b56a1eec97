#include "entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace entdim {

using nlohmann::json;

std::string encode_cells(const std::vector<std::uint16_t>& cells) {
    std::string s;
    s.reserve(cells.size() * 2);
    for (auto c : cells) {
        s.push_back(static_cast<char>(c >> 8));
        s.push_back(static_cast<char>(c & 0xff));
    }
    return s;
}

Rational PatternDist::probability(const std::string& key) const {
    auto it = counts.find(key);
    if (it == counts.end()) return Rational(0);
    Rational p(BigInt(static_cast<unsigned long>(it->second)), BigInt(static_cast<unsigned long>(total)));
    p.canonicalize();
    return p;
}

std::string PatternDist::pretty(const std::string& key) const {
    std::string out;
    const std::size_t width = 2 * parts.size();
    for (std::size_t i = 0; i + width <= key.size(); i += width) {
        if (!out.empty()) out.push_back('.');
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const std::uint16_t cell = static_cast<std::uint16_t>(
                (static_cast<unsigned char>(key[i + 2 * p]) << 8) |
                static_cast<unsigned char>(key[i + 2 * p + 1]));
            out += parts[p]->label(cell);
        }
    }
    return out;
}

std::string PatternDist::to_json() const {
    json j;
    j["mode"] = sampled ? "sample" : "exact";
    j["total"] = total;
    j["window"] = window_len;
    if (sampled) {
        j["samples"] = samples;
        j["seed"] = seed;
    }
    json pats = json::object();
    for (const auto& [k, v] : counts) {
        if (sampled)
            pats[pretty(k)] = v;
        else
            pats[pretty(k)] = std::to_string(v) + "/" + std::to_string(total);
    }
    j["patterns"] = pats;
    return j.dump(2);
}

namespace {

struct JoinContext {
    const TowerLadder* L = nullptr;
    std::uint32_t stage_idx = 0;
    std::vector<const Partition*> parts;
    std::vector<std::uint64_t> positions;
    std::vector<std::uint32_t> refs;  // per part
    std::uint64_t window = 0;
};

JoinContext make_context(const TowerLadder& L, std::uint32_t stage_idx,
                         const std::vector<const Partition*>& parts,
                         const std::vector<std::uint64_t>& positions) {
    if (parts.empty() || positions.empty())
        throw Error(ErrorCode::invalid_argument, "join needs at least one partition and one position");
    JoinContext ctx;
    ctx.L = &L;
    ctx.stage_idx = stage_idx;
    ctx.parts = parts;
    ctx.positions = positions;
    std::sort(ctx.positions.begin(), ctx.positions.end());
    if (std::adjacent_find(ctx.positions.begin(), ctx.positions.end()) != ctx.positions.end())
        throw Error(ErrorCode::invalid_argument, "duplicate offsets");
    const TowerStage& st = L.stage(stage_idx);
    const std::uint64_t max_off = ctx.positions.back();
    if (max_off >= st.height)
        throw Error(ErrorCode::tower_too_shallow,
                    "tower too shallow: max offset " + std::to_string(max_off) + " >= height " +
                        std::to_string(st.height));
    ctx.window = st.height - max_off;
    for (const auto* p : ctx.parts) {
        if (p->ref_ladder_idx() > stage_idx)
            throw Error(ErrorCode::invalid_argument, "partition reference stage above query stage");
        ctx.refs.push_back(p->ref_ladder_idx());
    }
    return ctx;
}

// Reads one pattern: cells of every part at every position.
template <typename ResolveFn>
std::string read_pattern(const JoinContext& ctx, std::uint64_t base_level, ResolveFn&& res) {
    std::vector<std::uint16_t> cells;
    cells.reserve(ctx.positions.size() * ctx.parts.size());
    std::vector<LineageTag> tags;
    for (std::uint64_t off : ctx.positions) {
        res(base_level + off, tags);
        for (std::size_t p = 0; p < ctx.parts.size(); ++p) cells.push_back(ctx.parts[p]->cell_of(tags[p]));
    }
    return encode_cells(cells);
}

void merge_counts(std::map<std::string, std::uint64_t>& into,
                  const std::map<std::string, std::uint64_t>& from) {
    for (const auto& [k, v] : from) into[k] += v;
}

}  // namespace

PatternDist join_dist_exact(const TowerLadder& L, std::uint32_t stage_idx,
                            const std::vector<const Partition*>& parts,
                            const std::vector<std::uint64_t>& positions, unsigned workers) {
    JoinContext ctx = make_context(L, stage_idx, parts, positions);
    const TowerStage& st = L.stage(stage_idx);
    if (!L.enumerable(stage_idx))
        throw Error(ErrorCode::budget_exceeded,
                    "stage " + st.label + " not enumerable within budget; use sampling mode");
    const std::uint64_t cols = *st.columns_u64;

    PatternDist dist;
    dist.positions = ctx.positions;
    dist.parts = ctx.parts;
    dist.window_len = ctx.window;
    dist.stage_idx = stage_idx;
    dist.total = cols * ctx.window;

    workers = std::max(1u, workers);
    std::vector<std::map<std::string, std::uint64_t>> partial(workers);
    auto run = [&](unsigned w) {
        auto& local = partial[w];
        for (std::uint64_t col = w; col < cols; col += workers) {
            for (std::uint64_t j = 0; j < ctx.window; ++j) {
                std::string key = read_pattern(ctx, j, [&](std::uint64_t lev, std::vector<LineageTag>& tags) {
                    L.resolve_multi(stage_idx, col, lev, ctx.refs, tags);
                });
                ++local[key];
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run, w);
        for (auto& t : threads) t.join();
    }
    for (auto& p : partial) merge_counts(dist.counts, p);
    return dist;
}

PatternDist join_dist_sample(const TowerLadder& L, std::uint32_t stage_idx,
                             const std::vector<const Partition*>& parts,
                             const std::vector<std::uint64_t>& positions, std::uint64_t samples,
                             std::uint64_t seed, unsigned workers) {
    JoinContext ctx = make_context(L, stage_idx, parts, positions);
    PatternDist dist;
    dist.positions = ctx.positions;
    dist.parts = ctx.parts;
    dist.window_len = ctx.window;
    dist.stage_idx = stage_idx;
    dist.sampled = true;
    dist.samples = samples;
    dist.seed = seed;
    dist.total = samples;

    workers = std::max(1u, workers);
    std::vector<std::map<std::string, std::uint64_t>> partial(workers);
    auto run = [&](unsigned w) {
        auto& local = partial[w];
        for (std::uint64_t i = w; i < samples; i += workers) {
            Rng rng(mix_seed(seed, i));  // per-sample stream: worker-count independent
            SampledColumn col = L.sample_column(stage_idx, rng);
            const std::uint64_t j = rng.below(ctx.window);
            std::string key = read_pattern(ctx, j, [&](std::uint64_t lev, std::vector<LineageTag>& tags) {
                L.resolve_sampled_multi(stage_idx, col, lev, ctx.refs, tags);
            });
            ++local[key];
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run, w);
        for (auto& t : threads) t.join();
    }
    for (auto& p : partial) merge_counts(dist.counts, p);
    return dist;
}

PatternDist marginal(const PatternDist& dist, const std::vector<std::size_t>& position_indices,
                     const std::vector<std::size_t>& part_indices) {
    PatternDist out;
    for (auto pi : position_indices) out.positions.push_back(dist.positions.at(pi));
    for (auto qi : part_indices) out.parts.push_back(dist.parts.at(qi));
    out.total = dist.total;
    out.sampled = dist.sampled;
    out.samples = dist.samples;
    out.seed = dist.seed;
    out.window_len = dist.window_len;
    out.stage_idx = dist.stage_idx;
    const std::size_t np = dist.parts.size();
    for (const auto& [key, cnt] : dist.counts) {
        std::vector<std::uint16_t> cells;
        cells.reserve(position_indices.size() * part_indices.size());
        for (auto pi : position_indices) {
            for (auto qi : part_indices) {
                const std::size_t at = 2 * (pi * np + qi);
                cells.push_back(static_cast<std::uint16_t>(
                    (static_cast<unsigned char>(key[at]) << 8) | static_cast<unsigned char>(key[at + 1])));
            }
        }
        out.counts[encode_cells(cells)] += cnt;
    }
    return out;
}

long double shannon(const PatternDist& dist, EntropyEstimator est) {
    if (dist.total == 0) return 0.0L;
    const long double total = static_cast<long double>(dist.total);
    long double sum = 0.0L;
    for (const auto& [k, v] : dist.counts) {
        if (v == 0) continue;
        sum += static_cast<long double>(v) * std::log2(static_cast<long double>(v));
    }
    long double h = std::log2(total) - sum / total;
    // Miller-Madow bias correction, (m-1)/(2 N ln 2) bits; sampled mode only.
    if (est == EntropyEstimator::miller_madow && dist.sampled && dist.samples > 0)
        h += static_cast<long double>(dist.support() - 1) /
             (2.0L * static_cast<long double>(dist.samples) * std::log(2.0L));
    return h;
}

long double shannon_stderr(const PatternDist& dist) {
    if (!dist.sampled || dist.samples < 2) return 0.0L;
    const long double n = static_cast<long double>(dist.samples);
    long double h = 0.0L, m2 = 0.0L;
    for (const auto& [k, v] : dist.counts) {
        const long double p = static_cast<long double>(v) / n;
        const long double lg = -std::log2(p);
        h += p * lg;
        m2 += p * lg * lg;
    }
    long double var = m2 - h * h;
    if (var < 0) var = 0;
    return std::sqrt(var / n);
}

bool entropy_leq_log2_support_exact(const PatternDist& dist) {
    // H <= log2 N  <=>  D^D <= N^D * prod a_i^{a_i}, with D the total weight.
    bool uniform = true;
    std::uint64_t first = dist.counts.empty() ? 0 : dist.counts.begin()->second;
    for (const auto& [k, v] : dist.counts)
        if (v != first) { uniform = false; break; }
    if (uniform) return true;  // equality case
    const unsigned long D = static_cast<unsigned long>(dist.total);
    BigInt lhs = ipow(BigInt(D), D);
    BigInt rhs = ipow(BigInt(static_cast<unsigned long>(dist.support())), D);
    for (const auto& [k, v] : dist.counts)
        rhs *= ipow(BigInt(static_cast<unsigned long>(v)), v);
    return lhs <= rhs;
}

bool entropy_leq_log2_support(const PatternDist& dist) {
    const long double h = shannon(dist);
    const long double cap = std::log2(static_cast<long double>(dist.support()));
    if (h <= cap - 1e-9L) return true;
    if (h > cap + 1e-9L) return false;
    return entropy_leq_log2_support_exact(dist);
}

std::pair<long double, long double> cond_entropy(const TowerLadder& L, const Partition& alpha,
                                                 const Partition& beta, std::uint32_t stage_idx,
                                                 unsigned workers) {
    PatternDist joint = join_dist_exact(L, stage_idx, {&alpha, &beta}, {0}, workers);
    const long double h_ab = shannon(joint);
    const long double h_a = shannon(marginal(joint, {0}, {0}));
    const long double h_b = shannon(marginal(joint, {0}, {1}));
    return {h_ab - h_b, h_ab - h_a};  // H(a|b), H(b|a)
}

EntropyProfile entropy_profile(const TowerLadder& L, std::uint32_t stage_idx, const Partition& alpha,
                               const std::vector<std::uint64_t>& offsets, std::size_t n_max,
                               bool sampled, std::uint64_t samples, std::uint64_t seed,
                               unsigned workers) {
    if (offsets.size() < n_max)
        throw Error(ErrorCode::invalid_argument, "not enough offsets for requested profile length");
    EntropyProfile prof;
    prof.sampled = sampled;
    prof.samples = samples;
    prof.seed = seed;
    for (std::size_t n = 1; n <= n_max; ++n) {
        std::vector<std::uint64_t> pos(offsets.begin(), offsets.begin() + n);
        PatternDist d = sampled
                            ? join_dist_sample(L, stage_idx, {&alpha}, pos, samples,
                                               mix_seed(seed, static_cast<std::uint64_t>(n)), workers)
                            : join_dist_exact(L, stage_idx, {&alpha}, pos, workers);
        EntropyProfilePoint pt;
        pt.n = n;
        pt.s_n = pos.back();
        pt.H = shannon(d);
        pt.H_mm = shannon(d, EntropyEstimator::miller_madow);
        pt.name_count = d.support();
        pt.window_len = d.window_len;
        if (!entropy_leq_log2_support(d))
            throw Error(ErrorCode::internal, "entropy exceeded log2(name count) at n=" + std::to_string(n));
        prof.points.push_back(pt);
    }
    return prof;
}

std::string EntropyProfile::to_csv() const {
    std::ostringstream os;
    os << "n,s_n,H_n,H_n_over_n,name_count,mode\n";
    os.precision(12);
    for (const auto& p : points) {
        os << p.n << "," << p.s_n << "," << static_cast<double>(p.H) << ","
           << static_cast<double>(p.H / static_cast<long double>(p.n)) << "," << p.name_count << ","
           << (sampled ? "sample" : "exact") << "\n";
    }
    return os.str();
}

std::uint64_t name_count(const TowerLadder& L, std::uint32_t stage_idx, const Partition& alpha,
                         const std::vector<std::uint64_t>& positions, bool sampled,
                         std::uint64_t samples, std::uint64_t seed, unsigned workers) {
    PatternDist d = sampled ? join_dist_sample(L, stage_idx, {&alpha}, positions, samples, seed, workers)
                            : join_dist_exact(L, stage_idx, {&alpha}, positions, workers);
    return d.support();
}

namespace {

std::uint16_t tag_code(const LineageTag& tag, std::uint64_t ref_height) {
    // level sets get col*h+lev; spacers share one bucket per (segment, slot)
    // shifted past the level range
    if (!tag.spacer) return static_cast<std::uint16_t>(tag.column * ref_height + tag.level);
    return static_cast<std::uint16_t>(60000 + (tag.segment * 97 + tag.level) % 5000);
}

}  // namespace

IndependenceReport independence_check(const TowerLadder& L, std::uint32_t t, std::uint32_t max_b,
                                      bool enforce_membership,
                                      const std::vector<std::uint64_t>& custom_offsets) {
    const Schedule* s = L.schedule();
    if (!s) throw Error(ErrorCode::invalid_argument, "independence check needs a schedule-built tower");
    const Insertion* ins = s->insertion_event(t);
    if (!ins) throw Error(ErrorCode::invalid_argument, "no insertion event t=" + std::to_string(t));

    IndependenceReport rep;
    rep.t = t;
    const std::uint32_t nt = ins->n, lt = ins->l;

    if (!ins->h_star_is_height) {
        rep.hypothesis_met = false;
        rep.note = "h* differs from h_{l_t}; the bound is only claimed for h* = h_{l_t}";
        return rep;
    }
    for (const auto& other : s->insertions)
        if (other.t != t && other.n >= lt && other.n < nt) {
            rep.hypothesis_met = false;
            rep.note = "insertion event between l_t and n_t breaks the W_{l_t}-segment structure";
            return rep;
        }

    const std::uint32_t check_idx = L.ladder_index(nt + 1, false);
    rep.stage_checked = check_idx;
    const TowerStage& stK = L.stage(check_idx);
    if (!L.enumerable(check_idx))
        throw Error(ErrorCode::budget_exceeded, "insertion stage not enumerable; reduce the toy schedule");

    // F_0^t = {0, w_{n_t}, ..., (e_{n_t}-1) w_{n_t}}
    const std::uint64_t w_nt = to_u64_or_throw(s->stage(nt).w, "w_{n_t}");
    const std::uint64_t e_nt = s->stage(nt).e;
    std::vector<std::uint64_t> offsets = custom_offsets;
    if (offsets.empty())
        for (std::uint64_t k = 0; k < e_nt; ++k) offsets.push_back(k * w_nt);
    if (enforce_membership) {
        for (auto o : offsets) {
            // membership in F_0^t (multiples of w_{n_t} below e_{n_t} w_{n_t})
            if (o % w_nt != 0 || o / w_nt >= e_nt)
                throw Error(ErrorCode::invalid_argument,
                            "offset " + std::to_string(o) + " outside F_0^t; bound only claimed there");
        }
    }

    const std::uint32_t ref_idx = L.ladder_index(lt, false);
    const TowerStage& stL = L.stage(ref_idx);
    const std::uint64_t c_l = *stL.columns_u64;
    const std::uint64_t h_l = stL.height;
    if (c_l * h_l > 60000)
        throw Error(ErrorCode::budget_exceeded, "too many W_{l_t} level sets for tuple coding");

    // One enumeration pass: joint tag tuple counts over the window.
    const std::uint64_t max_off = *std::max_element(offsets.begin(), offsets.end());
    if (max_off >= stK.height) throw Error(ErrorCode::tower_too_shallow, "offsets exceed tower height");
    const std::uint64_t window = stK.height - max_off;
    std::map<std::vector<std::uint16_t>, std::uint64_t> tuple_counts;
    std::vector<std::uint32_t> refs(offsets.size(), ref_idx);
    std::vector<LineageTag> tags;
    for (std::uint64_t col = 0; col < *stK.columns_u64; ++col) {
        for (std::uint64_t j = 0; j < window; ++j) {
            std::vector<std::uint16_t> tuple;
            tuple.reserve(offsets.size());
            for (auto o : offsets) {
                LineageTag tag = L.resolve(check_idx, col, j + o, ref_idx);
                tuple.push_back(tag_code(tag, h_l));
            }
            ++tuple_counts[tuple];
        }
    }

    // Bound pieces, exact.
    Rational mu_e = stL.xi / (Rational(BigInt(static_cast<unsigned long>(c_l))) *
                              Rational(BigInt(static_cast<unsigned long>(h_l))));
    mu_e.canonicalize();
    Rational factor = (Rational(1) + Rational(stL.h, s->stage(nt).c)) / stL.xi;
    factor.canonicalize();
    rep.bound_factor = rational_str(factor);

    // All nonempty B subsets of the offsets with |B| <= max_b, all level-set
    // choices for each b.
    const std::size_t m = offsets.size();
    std::vector<std::uint16_t> level_codes;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> level_ids;
    for (std::uint64_t c = 0; c < c_l; ++c)
        for (std::uint64_t l = 0; l < h_l; ++l) {
            level_codes.push_back(static_cast<std::uint16_t>(c * h_l + l));
            level_ids.emplace_back(c, l);
        }

    for (std::uint64_t mask = 1; mask < (1ULL << m); ++mask) {
        std::vector<std::size_t> picks;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1ULL << i)) picks.push_back(i);
        if (picks.size() > max_b) continue;

        std::vector<std::size_t> choice(picks.size(), 0);
        for (;;) {
            // LHS: window measure of the intersection
            std::uint64_t cnt = 0;
            for (const auto& [tuple, c] : tuple_counts) {
                bool match = true;
                for (std::size_t i = 0; i < picks.size(); ++i)
                    if (tuple[picks[i]] != level_codes[choice[i]]) { match = false; break; }
                if (match) cnt += c;
            }
            Rational lhs = Rational(BigInt(static_cast<unsigned long>(cnt))) * stK.width;
            lhs.canonicalize();
            Rational rhs(1);
            for (std::size_t i = 0; i < picks.size(); ++i) rhs *= factor * mu_e;
            rhs.canonicalize();

            ++rep.checks;
            const bool ok = lhs <= rhs;
            if (!ok) ++rep.violations;
            if (!ok || rep.checks <= 64) {
                IndependenceRow row;
                for (auto i : picks) row.offsets.push_back(offsets[i]);
                for (auto c : choice) row.level_sets.push_back(level_ids[c]);
                row.lhs = rational_str(lhs);
                row.rhs = rational_str(rhs);
                row.ok = ok;
                rep.rows.push_back(std::move(row));
            }

            // next level-set choice
            std::size_t pos = 0;
            while (pos < choice.size()) {
                if (++choice[pos] < level_codes.size()) break;
                choice[pos] = 0;
                ++pos;
            }
            if (pos == choice.size()) break;
        }
    }
    return rep;
}

std::string IndependenceReport::to_json() const {
    json j;
    j["t"] = t;
    j["stage_checked"] = stage_checked;
    j["checks"] = checks;
    j["violations"] = violations;
    j["bound_factor"] = bound_factor;
    j["hypothesis_met"] = hypothesis_met;
    if (!note.empty()) j["note"] = note;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json jr;
        jr["offsets"] = r.offsets;
        json ls = json::array();
        for (const auto& [c, l] : r.level_sets) ls.push_back({{"col", c}, {"lev", l}});
        jr["level_sets"] = ls;
        jr["lhs"] = r.lhs;
        jr["rhs"] = r.rhs;
        jr["ok"] = r.ok;
        j["rows"].push_back(jr);
    }
    return j.dump(2);
}

}  // namespace entdim
