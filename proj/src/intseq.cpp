#include "intseq.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace entdim {

void IntSeq::check_monotone() const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i] < 1) throw Error(ErrorCode::invalid_argument, "sequence terms must be >= 1");
        if (i > 0 && terms_[i] <= terms_[i - 1])
            throw Error(ErrorCode::invalid_argument, "sequence not strictly increasing at index " + std::to_string(i + 1));
    }
}

bool IntSeq::try_extend_to(std::size_t n) {
    if (terms_.size() >= n) return true;
    if (ext_) {
        const std::size_t before = terms_.size();
        const BigInt last = before ? terms_.back() : BigInt(0);
        if (ext_(terms_, n)) {
            if (before && terms_.size() > before && terms_[before - 1] != last)
                throw Error(ErrorCode::internal, "generator mutated existing prefix");
            check_monotone();
        }
    }
    return terms_.size() >= n;
}

void IntSeq::extend_to(std::size_t n) {
    if (!try_extend_to(n))
        throw Error(ErrorCode::invalid_argument,
                    "insufficient sequence: " + desc_ + " has " + std::to_string(terms_.size()) +
                        " terms, need " + std::to_string(n));
}

std::vector<std::uint64_t> IntSeq::offsets(std::size_t n_max) const {
    std::vector<std::uint64_t> out;
    out.reserve(n_max);
    for (std::size_t i = 0; i < n_max && i < terms_.size(); ++i) {
        BigInt v = zero_based_offsets_ ? BigInt(terms_[i] - 1) : terms_[i];
        out.push_back(to_u64_or_throw(v, "offset"));
    }
    if (out.size() < n_max)
        throw Error(ErrorCode::invalid_argument, "insufficient sequence for " + std::to_string(n_max) + " offsets");
    return out;
}

IntSeq seq_naturals() {
    return IntSeq("nat", {}, [](std::vector<BigInt>& t, std::size_t n) {
        while (t.size() < n) t.emplace_back(static_cast<unsigned long>(t.size() + 1));
        return true;
    });
}

IntSeq seq_squares() {
    return IntSeq("squares", {}, [](std::vector<BigInt>& t, std::size_t n) {
        while (t.size() < n) {
            BigInt k(static_cast<unsigned long>(t.size() + 1));
            t.push_back(k * k);
        }
        return true;
    });
}

IntSeq seq_powers(std::uint64_t base) {
    if (base < 2) throw Error(ErrorCode::invalid_argument, "powers base must be >= 2");
    return IntSeq("pow" + std::to_string(base), {}, [base](std::vector<BigInt>& t, std::size_t n) {
        while (t.size() < n) t.push_back(ipow(BigInt(static_cast<unsigned long>(base)), t.size() + 1));
        return true;
    });
}

IntSeq seq_arith(const BigInt& a, const BigInt& d) {
    if (a < 1 || d < 1) throw Error(ErrorCode::invalid_argument, "arith needs a >= 1, d >= 1");
    return IntSeq("arith:" + a.get_str() + "," + d.get_str(), {}, [a, d](std::vector<BigInt>& t, std::size_t n) {
        while (t.size() < n) t.push_back(a + d * BigInt(static_cast<unsigned long>(t.size())));
        return true;
    });
}

IntSeq seq_floor_power(const Fraction& exponent) {
    if (exponent.num <= exponent.den)
        throw Error(ErrorCode::invalid_argument, "floorpow exponent must exceed 1");
    const std::uint64_t p = exponent.num, q = exponent.den;
    // For exponent > 1 the gaps (k+1)^(p/q) - k^(p/q) exceed 1 on k >= 1, so
    // the floors are already strictly increasing: term k is floor(k^(p/q)).
    auto ext = [p, q](std::vector<BigInt>& t, std::size_t n) {
        while (t.size() < n) {
            BigInt k(static_cast<unsigned long>(t.size() + 1));
            t.push_back(iroot_floor(ipow(k, p), q));
        }
        return true;
    };
    return IntSeq("floorpow:" + exponent.str(), {}, ext);
}

IntSeq seq_explicit(std::vector<BigInt> terms, std::string desc) {
    return IntSeq(std::move(desc), std::move(terms));
}

namespace {

IntSeq sorted_union(std::vector<BigInt> values, std::string desc) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return IntSeq(std::move(desc), std::move(values));
}

}  // namespace

IntSeq densify(IntSeq s, const std::vector<std::uint64_t>& anchors) {
    if (anchors.empty()) throw Error(ErrorCode::invalid_argument, "densify needs at least one anchor");
    for (std::size_t i = 1; i < anchors.size(); ++i)
        if (anchors[i] <= anchors[i - 1])
            throw Error(ErrorCode::invalid_argument, "anchors must be increasing");
    s.extend_to(anchors.back());
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        if (BigInt(static_cast<unsigned long>(anchors[i + 1])) < 2 * s.term(anchors[i]))
            throw Error(ErrorCode::invalid_argument,
                        "anchor spacing violated: n_" + std::to_string(i + 2) + " < 2*s_{n_" +
                            std::to_string(i + 1) + "}");
    }

    std::vector<BigInt> out(s.terms().begin(), s.terms().end());
    for (std::uint64_t v = 1; v <= anchors[0]; ++v) out.emplace_back(static_cast<unsigned long>(v));
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        BigInt lo = s.term(anchors[i]) + 1;
        BigInt hi(static_cast<unsigned long>(anchors[i + 1]));
        for (BigInt v = lo; v <= hi; ++v) out.push_back(v);
    }
    return sorted_union(std::move(out), "densify(" + s.desc() + ")");
}

IntSeq power_merge(IntSeq s, const Fraction& tau) {
    if (tau.num >= tau.den) throw Error(ErrorCode::invalid_argument, "power_merge needs 0 < tau < 1");
    IntSeq fp = seq_floor_power(Fraction{tau.den, tau.num});  // exponent 1/tau
    // Lazy union: the floor-power component alone supplies n terms below its
    // n-th value B; S contributes whatever it has below B. Rebuilding the
    // union from scratch is deterministic, so the produced prefix is stable.
    auto ext = [s, fp](std::vector<BigInt>& out, std::size_t n) mutable {
        fp.extend_to(std::max<std::size_t>(n, 16));
        const BigInt bound = fp.terms().back();
        while (s.terms().empty() || s.terms().back() < bound) {
            if (!s.try_extend_to(s.size() + 1024)) break;
        }
        std::vector<BigInt> vals;
        for (const auto& v : fp.terms()) vals.push_back(v);
        for (const auto& v : s.terms())
            if (v <= bound) vals.push_back(v);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        out = std::move(vals);
        return true;
    };
    IntSeq merged("power_merge(" + s.desc() + "," + tau.str() + ")", {}, std::move(ext));
    return merged;
}

IntSeq seq_scale(IntSeq s, std::uint64_t k) {
    if (k < 1) throw Error(ErrorCode::invalid_argument, "scale factor must be >= 1");
    std::vector<BigInt> out;
    out.reserve(s.size());
    for (const auto& v : s.terms()) out.push_back(v * static_cast<unsigned long>(k));
    return IntSeq(std::to_string(k) + "*(" + s.desc() + ")", std::move(out));
}

IntSeq seq_floor_div(IntSeq s, std::uint64_t k) {
    if (k < 1) throw Error(ErrorCode::invalid_argument, "divisor must be >= 1");
    if (s.size() == 0) throw Error(ErrorCode::invalid_argument, "empty sequence");
    if (s.term(1) < static_cast<unsigned long>(k))
        throw Error(ErrorCode::invalid_argument, "seq_floor_div requires s_1 >= k");
    std::vector<BigInt> out;
    for (const auto& v : s.terms()) {
        BigInt t = v / static_cast<unsigned long>(k);
        if (out.empty() || t > out.back()) out.push_back(t);
    }
    return IntSeq("floor(" + s.desc() + "/" + std::to_string(k) + ")", std::move(out));
}

IntSeq reverse_blocks(IntSeq s, const std::vector<std::uint64_t>& anchors) {
    if (anchors.empty() || anchors[0] < 2)
        throw Error(ErrorCode::invalid_argument, "reverse_blocks needs n_1 >= 2");
    s.extend_to(anchors.back());
    BigInt running = 0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (i > 0 && BigInt(static_cast<unsigned long>(anchors[i])) < 1 + 2 * running)
            throw Error(ErrorCode::invalid_argument, "reverse_blocks anchor condition violated at j=" + std::to_string(i + 1));
        running += static_cast<unsigned long>(anchors[i]);
    }

    const std::uint64_t n_last = anchors.back();
    std::vector<BigInt> f;
    f.reserve(n_last);
    auto s_at = [&](std::uint64_t idx) { return idx == 0 ? BigInt(0) : s.term(idx); };  // s_0 = 0
    std::size_t j = 0;
    for (std::uint64_t m = 1; m <= n_last; ++m) {
        while (m > anchors[j]) ++j;
        const std::uint64_t nj = anchors[j];
        f.push_back(s_at(nj) - s_at(nj - m));
    }
    for (std::uint64_t m = 1; m < f.size(); ++m)
        if (f[m] <= f[m - 1])
            throw Error(ErrorCode::verify_failed,
                        "non-monotone reversal at m=" + std::to_string(m + 1) + " (f=" + f[m].get_str() + ")");
    // f_{n_j} = s_{n_j} by construction; assert it anyway.
    for (auto nj : anchors)
        if (f[nj - 1] != s.term(nj))
            throw Error(ErrorCode::internal, "reversal fixed point failed at anchor " + std::to_string(nj));
    return IntSeq("reverse(" + s.desc() + ")", std::move(f));
}

IntSeq parse_seq_spec(const std::string& spec, const FtResolver& ft) {
    if (spec == "squares") return seq_squares();
    if (spec == "nat") return seq_naturals();
    if (spec == "pow2") return seq_powers(2);
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    if (head == "floorpow" && colon != std::string::npos)
        return seq_floor_power(parse_fraction(spec.substr(colon + 1)));
    if (head == "arith" && colon != std::string::npos) {
        const std::string rest = spec.substr(colon + 1);
        const auto comma = rest.find(',');
        if (comma == std::string::npos) throw Error(ErrorCode::invalid_argument, "arith spec needs a,d");
        return seq_arith(parse_bigint(rest.substr(0, comma)), parse_bigint(rest.substr(comma + 1)));
    }
    if (head == "file" && colon != std::string::npos) {
        std::ifstream in(spec.substr(colon + 1));
        if (!in) throw Error(ErrorCode::io, "cannot open sequence file: " + spec.substr(colon + 1));
        std::vector<BigInt> terms;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            terms.push_back(parse_bigint(line));
        }
        return IntSeq("file", std::move(terms));
    }
    if (head == "ft" && colon != std::string::npos) {
        const std::string rest = spec.substr(colon + 1);
        const auto last = rest.rfind(':');
        if (last == std::string::npos) throw Error(ErrorCode::invalid_argument, "ft spec needs ft:<schedule>:<t>");
        if (!ft) throw Error(ErrorCode::invalid_argument, "ft sequence requires a schedule context");
        return ft(rest.substr(0, last), static_cast<std::uint32_t>(std::stoul(rest.substr(last + 1))));
    }
    throw Error(ErrorCode::invalid_argument, "unknown sequence spec: " + spec);
}

}  // namespace entdim
