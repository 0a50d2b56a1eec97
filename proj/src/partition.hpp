// Partitions of the space defined through lineage tags: cells are unions of
// level sets of a reference stage; spacers created after the reference stage
// fall in a residual cell.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"
#include "tower.hpp"

namespace entdim {

class Partition {
public:
    enum class Kind { symbols, levels_all, two_cell };

    // {P_0, P_1, spacer}: reference stage 0.
    static Partition symbols(const TowerLadder& L);
    // Every level set of W_n its own cell, plus a residual spacer cell.
    static Partition levels_all(const TowerLadder& L, std::uint32_t n);
    // {A, A^c} with A a union of level sets of W_n; spacers belong to A^c.
    static Partition two_cell(const TowerLadder& L, std::uint32_t n,
                              std::vector<std::pair<std::uint64_t, std::uint64_t>> a_members);
    // Random union of `count` distinct level sets of W_n.
    static Partition random_union(const TowerLadder& L, std::uint32_t n, std::uint64_t count,
                                  std::uint64_t seed);

    std::uint32_t ref_ladder_idx() const { return ref_idx_; }
    std::uint32_t cell_count() const { return cell_count_; }
    std::uint16_t cell_of(const LineageTag& tag) const;
    const std::string& label(std::uint16_t cell) const { return labels_[cell]; }
    Kind kind() const { return kind_; }

    // mu(A) for two-cell partitions, exact.
    const Rational& mu_a() const;
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& members() const { return a_members_; }
    std::string spec() const { return spec_; }

private:
    Kind kind_ = Kind::symbols;
    std::uint32_t ref_idx_ = 0;
    std::uint32_t cell_count_ = 0;
    std::uint64_t ref_height_ = 1;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> a_members_;  // sorted
    std::vector<std::string> labels_;
    Rational mu_a_;
    std::string spec_;
};

// Parses "symbols" | "levels:<n>" | "union:<n>:<col>,<lev>[;<col>,<lev>...]"
// | "randunion:<n>:<count>:<seed>".
Partition parse_partition_spec(const TowerLadder& L, const std::string& spec);

}  // namespace entdim
