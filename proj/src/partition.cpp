#include "partition.hpp"

#include <algorithm>

namespace entdim {

namespace {

void require_enumerable_ref(const TowerLadder& L, std::uint32_t idx) {
    const TowerStage& st = L.stage(idx);
    if (!st.columns_u64)
        throw Error(ErrorCode::invalid_argument,
                    "reference stage " + st.label + " has too many columns for tagging");
}

std::uint64_t checked_cell_total(const TowerStage& st) {
    const std::uint64_t cells = *st.columns_u64 * st.height;
    if (cells > 60000)
        throw Error(ErrorCode::budget_exceeded, "levels partition too fine (" + std::to_string(cells) + " cells)");
    return cells;
}

}  // namespace

Partition Partition::symbols(const TowerLadder& L) {
    Partition p;
    p.kind_ = Kind::symbols;
    p.ref_idx_ = 0;
    p.cell_count_ = 3;
    p.labels_ = {"0", "1", "s"};
    p.spec_ = "symbols";
    (void)L;
    return p;
}

Partition Partition::levels_all(const TowerLadder& L, std::uint32_t n) {
    const std::uint32_t idx = L.ladder_index(n, false);
    require_enumerable_ref(L, idx);
    const TowerStage& st = L.stage(idx);
    const std::uint64_t cells = checked_cell_total(st);
    Partition p;
    p.kind_ = Kind::levels_all;
    p.ref_idx_ = idx;
    p.ref_height_ = st.height;
    p.cell_count_ = static_cast<std::uint32_t>(cells + 1);
    p.labels_.reserve(cells + 1);
    for (std::uint64_t c = 0; c < *st.columns_u64; ++c)
        for (std::uint64_t l = 0; l < st.height; ++l)
            p.labels_.push_back("c" + std::to_string(c) + "L" + std::to_string(l));
    p.labels_.push_back("s");
    p.spec_ = "levels:" + std::to_string(n);
    return p;
}

Partition Partition::two_cell(const TowerLadder& L, std::uint32_t n,
                              std::vector<std::pair<std::uint64_t, std::uint64_t>> a_members) {
    const std::uint32_t idx = L.ladder_index(n, false);
    require_enumerable_ref(L, idx);
    const TowerStage& st = L.stage(idx);
    std::sort(a_members.begin(), a_members.end());
    a_members.erase(std::unique(a_members.begin(), a_members.end()), a_members.end());
    for (const auto& [c, l] : a_members)
        if (c >= *st.columns_u64 || l >= st.height)
            throw Error(ErrorCode::invalid_argument, "level set out of range in partition spec");
    Partition p;
    p.kind_ = Kind::two_cell;
    p.ref_idx_ = idx;
    p.ref_height_ = st.height;
    p.cell_count_ = 2;
    p.labels_ = {"A", "a"};
    p.mu_a_ = Rational(BigInt(static_cast<unsigned long>(a_members.size()))) * st.width;
    p.mu_a_.canonicalize();
    p.a_members_ = std::move(a_members);
    std::string spec = "union:" + std::to_string(n) + ":";
    for (std::size_t i = 0; i < p.a_members_.size(); ++i) {
        if (i) spec += ";";
        spec += std::to_string(p.a_members_[i].first) + "," + std::to_string(p.a_members_[i].second);
    }
    p.spec_ = spec;
    return p;
}

Partition Partition::random_union(const TowerLadder& L, std::uint32_t n, std::uint64_t count,
                                  std::uint64_t seed) {
    const std::uint32_t idx = L.ladder_index(n, false);
    require_enumerable_ref(L, idx);
    const TowerStage& st = L.stage(idx);
    const std::uint64_t total = *st.columns_u64 * st.height;
    if (count == 0 || count > total)
        throw Error(ErrorCode::invalid_argument, "random union size out of range");
    Rng rng(mix_seed(seed, 0x7061727469746eULL));
    std::vector<std::pair<std::uint64_t, std::uint64_t>> members;
    std::vector<bool> used(total, false);
    while (members.size() < count) {
        std::uint64_t pick = rng.below(total);
        if (used[pick]) continue;
        used[pick] = true;
        members.emplace_back(pick / st.height, pick % st.height);
    }
    Partition p = two_cell(L, n, std::move(members));
    p.spec_ = "randunion:" + std::to_string(n) + ":" + std::to_string(count) + ":" + std::to_string(seed);
    return p;
}

std::uint16_t Partition::cell_of(const LineageTag& tag) const {
    switch (kind_) {
        case Kind::symbols:
            if (tag.spacer) return 2;
            return static_cast<std::uint16_t>(tag.column);
        case Kind::levels_all:
            if (tag.spacer) return static_cast<std::uint16_t>(cell_count_ - 1);
            return static_cast<std::uint16_t>(tag.column * ref_height_ + tag.level);
        case Kind::two_cell: {
            if (tag.spacer) return 1;
            const auto key = std::make_pair(tag.column, tag.level);
            return std::binary_search(a_members_.begin(), a_members_.end(), key) ? 0 : 1;
        }
    }
    return 0;
}

const Rational& Partition::mu_a() const {
    if (kind_ != Kind::two_cell)
        throw Error(ErrorCode::invalid_argument, "mu(A) only defined for two-cell partitions");
    return mu_a_;
}

Partition parse_partition_spec(const TowerLadder& L, const std::string& spec) {
    if (spec == "symbols") return Partition::symbols(L);
    auto parts = std::vector<std::string>{};
    std::size_t start = 0;
    while (start <= spec.size()) {
        auto pos = spec.find(':', start);
        if (pos == std::string::npos) {
            parts.push_back(spec.substr(start));
            break;
        }
        parts.push_back(spec.substr(start, pos - start));
        start = pos + 1;
    }
    try {
        if (parts[0] == "levels" && parts.size() == 2)
            return Partition::levels_all(L, static_cast<std::uint32_t>(std::stoul(parts[1])));
        if (parts[0] == "union" && parts.size() == 3) {
            std::vector<std::pair<std::uint64_t, std::uint64_t>> members;
            std::size_t p = 0;
            const std::string& body = parts[2];
            while (p < body.size()) {
                auto semi = body.find(';', p);
                std::string item = body.substr(p, semi == std::string::npos ? std::string::npos : semi - p);
                auto comma = item.find(',');
                if (comma == std::string::npos) throw Error(ErrorCode::invalid_argument, "union member needs col,lev");
                members.emplace_back(std::stoull(item.substr(0, comma)), std::stoull(item.substr(comma + 1)));
                if (semi == std::string::npos) break;
                p = semi + 1;
            }
            return Partition::two_cell(L, static_cast<std::uint32_t>(std::stoul(parts[1])), std::move(members));
        }
        if (parts[0] == "randunion" && parts.size() == 4)
            return Partition::random_union(L, static_cast<std::uint32_t>(std::stoul(parts[1])),
                                           std::stoull(parts[2]), std::stoull(parts[3]));
    } catch (const Error&) {
        throw;
    } catch (...) {
        throw Error(ErrorCode::invalid_argument, "malformed partition spec: " + spec);
    }
    throw Error(ErrorCode::invalid_argument, "unknown partition spec: " + spec);
}

}  // namespace entdim
