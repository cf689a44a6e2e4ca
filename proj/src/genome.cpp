#include "ldsim/genome.h"

namespace ldsim {

auto to_char(Nucleotide n) -> char {
  switch (n) {
    case Nucleotide::A: return 'A';
    case Nucleotide::C: return 'C';
    case Nucleotide::G: return 'G';
    case Nucleotide::T: return 'T';
  }
  return '?';
}

auto nucleotide_from_char(char c) -> std::optional<Nucleotide> {
  switch (c) {
    case 'A': case 'a': return Nucleotide::A;
    case 'C': case 'c': return Nucleotide::C;
    case 'G': case 'g': return Nucleotide::G;
    case 'T': case 't': return Nucleotide::T;
    default: return std::nullopt;
  }
}

auto format_genome(const Genome_diff& genome) -> std::string {
  auto out = std::string{};
  for (const auto& s : genome) {
    if (!out.empty()) { out += ';'; }
    out += std::to_string(s.site);
    out += ':';
    out += to_char(s.nucleotide);
  }
  return out;
}

}  // namespace ldsim
