#ifndef LDSIM_GENOME_H_
#define LDSIM_GENOME_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ldsim {

enum class Nucleotide : uint8_t { A = 0, C = 1, G = 2, T = 3 };

inline constexpr int k_num_nucleotides = 4;
inline constexpr std::array<Nucleotide, 4> k_nucleotides{Nucleotide::A, Nucleotide::C, Nucleotide::G, Nucleotide::T};

constexpr auto index_of(Nucleotide n) -> int { return static_cast<int>(n); }

auto to_char(Nucleotide n) -> char;
auto nucleotide_from_char(char c) -> std::optional<Nucleotide>;

using Site_index = uint32_t;

// One entry of a sparse genome: a site that has seen at least one mutation
// event in the cell's ancestry, together with its current nucleotide. The
// nucleotide may equal the reference (a reverted site).
struct Site_state {
  Site_index site;
  Nucleotide nucleotide;

  friend auto operator<=>(const Site_state&, const Site_state&) = default;
};

// Sorted by site. Sites absent from the vector carry the reference nucleotide
// and have never mutated in the lineage.
using Genome_diff = std::vector<Site_state>;

// Row-stochastic 4x4 matrix: entry [from][to] is the probability that a
// daughter carries `to` when the parent carries `from`.
using Seq_matrix = std::array<std::array<double, 4>, 4>;

auto format_genome(const Genome_diff& genome) -> std::string;

}  // namespace ldsim

#endif  // LDSIM_GENOME_H_
