#ifndef LDSIM_INFERENCE_H_
#define LDSIM_INFERENCE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ldsim/genome.h"
#include "ldsim/random.h"
#include "ldsim/simulate.h"

namespace ldsim {

struct Vaf_record {
  double frequency = 0.0;
  std::optional<Nucleotide> reference;
  long line = 0;  // source line, 0 when not read from a file
};

// Observed mutation frequencies. The data lists mutated positions only, so
// the number of sites screened is supplied by the caller.
struct Vaf_dataset {
  std::vector<Vaf_record> records;
  int64_t total_sites = 0;
  std::optional<std::map<Nucleotide, int64_t>> per_nucleotide_sites;

  auto validate() const -> void;
};

// Parses CSV with a `vaf` column and an optional `ref` column. Throws
// Data_error on malformed rows and on frequencies outside [0,1].
auto parse_vaf(std::istream& in) -> std::vector<Vaf_record>;
auto load_vaf(const std::filesystem::path& path, int64_t total_sites,
              std::optional<std::map<Nucleotide, int64_t>> per_nucleotide_sites = std::nullopt) -> Vaf_dataset;

struct Window {
  double lo = 0.1;
  double hi = 0.25;

  auto validate() const -> void;
  // 1/lo - 1/hi
  auto width() const -> double { return 1.0 / lo - 1.0 / hi; }
};

struct Estimate_result {
  double mu_hat = 0.0;
  Window window;
  int64_t count = 0;
  int64_t total_sites = 0;
  std::optional<std::map<Nucleotide, double>> per_nucleotide;
  std::optional<std::map<Nucleotide, int64_t>> per_nucleotide_count;
  std::optional<std::pair<double, double>> bootstrap_ci;
};

// Records with frequency strictly inside (lo, hi).
auto count_in_range(const Vaf_dataset& data, double lo, double hi) -> int64_t;

// count / (sites (1/lo - 1/hi)).
auto estimate_from_count(int64_t count, int64_t sites, const Window& window) -> double;

auto estimate_mu(const Vaf_dataset& data, double lo, double hi) -> Estimate_result;
auto estimate_mu_by_nucleotide(const Vaf_dataset& data, double lo, double hi) -> Estimate_result;

// Percentile interval of the estimate over record resamples. The point
// estimate itself is unchanged.
auto bootstrap_ci(const Vaf_dataset& data, const Window& window, int64_t resamples, double level, Rng& rng)
    -> std::pair<double, double>;

auto to_json(const Estimate_result& result) -> nlohmann::json;

// Published summary counts: total and per-nucleotide in-window mutation
// counts together with the site totals they are divided by.
struct Count_fixture {
  Window window;
  int64_t count = 0;
  int64_t total_sites = 0;
  std::map<Nucleotide, int64_t> per_nucleotide_count;
  std::map<Nucleotide, int64_t> per_nucleotide_sites;
};

auto load_count_fixture(const std::filesystem::path& path) -> Count_fixture;
auto estimate_from_fixture(const Count_fixture& fixture) -> Estimate_result;

using Site_pair = std::pair<Site_index, Site_index>;

// F_j = (B_{first} + B_{second}) / (2n) for each homologous site pair.
auto diploid_frequencies(const Sim_outcome& outcome, std::span<const Site_pair> pairing) -> std::vector<double>;

// Pairs site 2j with site 2j+1 for j < positions.
auto adjacent_pairing(int64_t positions) -> std::vector<Site_pair>;

}  // namespace ldsim

#endif  // LDSIM_INFERENCE_H_
