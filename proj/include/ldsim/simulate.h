#ifndef LDSIM_SIMULATE_H_
#define LDSIM_SIMULATE_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldsim/genome.h"
#include "ldsim/random.h"

namespace ldsim {

// Per-site nucleotide substitution probabilities applied independently to
// each daughter at every division.
class Mutation_model {
 public:
  // Off-diagonal mu/3, diagonal 1-mu at every site. An empty reference means
  // every site starts as A.
  static auto uniform(int64_t sites, double mu, std::vector<Nucleotide> reference = {}) -> Mutation_model;

  // `site_matrix[i]` indexes into `matrices`; an empty `site_matrix` applies
  // matrices[0] everywhere.
  static auto per_site(int64_t sites, std::vector<Seq_matrix> matrices, std::vector<uint32_t> site_matrix,
                       std::vector<Nucleotide> reference = {}) -> Mutation_model;

  auto sites() const -> int64_t { return sites_; }
  auto reference(Site_index i) const -> Nucleotide {
    return reference_.empty() ? Nucleotide::A : reference_[i];
  }
  auto matrix(Site_index i) const -> const Seq_matrix& {
    return matrices_[site_matrix_.empty() ? 0 : site_matrix_[i]];
  }
  // Probability that a daughter of a reference-state parent differs at site i.
  auto reference_escape(Site_index i) const -> double;
  auto max_reference_escape() const -> double { return max_escape_; }
  // mu for uniform models; nullopt otherwise.
  auto uniform_mu() const -> std::optional<double> { return uniform_mu_; }

 private:
  Mutation_model() = default;
  auto finish() -> void;

  int64_t sites_ = 0;
  std::vector<Seq_matrix> matrices_;
  std::vector<uint32_t> site_matrix_;
  std::vector<Nucleotide> reference_;
  std::vector<double> matrix_escape_;  // escape per matrix, for the reference row of each site
  double max_escape_ = 0.0;
  std::optional<double> uniform_mu_;
};

struct Rates {
  double division = 1.0;
  double death = 0.0;
};

// Genotype restricted to the selective sites, listing only sites that differ
// from the reference.
using Selective_genotype = std::vector<Site_state>;

// Division and death rates as a function of the selective-site genotype.
// Genotypes absent from the table use the root rates.
class Fitness_model {
 public:
  Fitness_model() = default;
  explicit Fitness_model(Rates root, std::vector<Site_index> selective_sites = {},
                         std::map<Selective_genotype, Rates> table = {});

  static auto yule() -> Fitness_model { return Fitness_model{Rates{1.0, 0.0}}; }

  auto root() const -> const Rates& { return root_; }
  auto rates(const Selective_genotype& genotype) const -> Rates;
  auto selective_sites() const -> std::span<const Site_index> { return selective_sites_; }
  auto is_selective(Site_index i) const -> bool;
  auto has_selection() const -> bool { return !selective_sites_.empty(); }
  auto is_pure_birth() const -> bool;

  // Throws Config_error if rates are invalid or the root is not supercritical.
  auto validate(int64_t sites) const -> void;

 private:
  Rates root_{};
  std::vector<Site_index> selective_sites_;
  std::map<Selective_genotype, Rates> table_;
};

// Every cell that ever lived, in creation order. The root has parent -1;
// `end_event` is -1 while the cell is alive.
struct Lineage_node {
  int64_t parent = -1;
  int64_t birth_event = -1;
  int64_t end_event = -1;
  bool died = false;
  Genome_diff genome;
};

struct Lineage_tree {
  std::vector<Lineage_node> nodes;
  std::vector<int64_t> alive;  // sorted node ids
  int64_t divisions = 0;
  int64_t deaths = 0;
};

struct Sim_outcome {
  int64_t n = 0;
  std::vector<int64_t> b;       // cells whose nucleotide differs from the reference
  std::vector<int64_t> b_hat;   // cells descending from a cell mutated at the site
  std::vector<int64_t> events;  // mutation events at the site over the accepted run
  std::map<Genome_diff, int64_t> census;  // genome (true differences only) -> cells
  int64_t attempts = 0;                   // extinct runs discarded before success
  int64_t divisions = 0;
  int64_t deaths = 0;
  std::optional<Lineage_tree> tree;
};

struct Sim_limits {
  int64_t max_population = 100'000'000;
  int64_t max_sites = 4'000'000'000;
  int64_t max_attempts = 10'000'000;
};

struct Sim_options {
  bool keep_tree = false;
  // Use the rate-based class engine even where the pure-birth shortcut applies.
  bool force_general_path = false;
  Sim_limits limits{};
};

// Grows the population from one reference cell until it first holds n cells,
// restarting on extinction.
auto simulate_to_n(const Mutation_model& mutation, const Fitness_model& fitness, int64_t n, Rng& rng,
                   const Sim_options& options = {}) -> Sim_outcome;

// Fraction of the living population descending from each node (inclusive).
// Only nodes with at least one living descendant appear.
auto descendant_fractions(const Lineage_tree& tree) -> std::map<int64_t, double>;

// One step of the single-site mutant-count chain B^{r} -> B^{r+1} in the
// pure-birth model.
auto embedded_chain_step_b(int64_t r, int64_t j, double mu, Rng& rng) -> int64_t;
// Same for the mutant-descendant count.
auto embedded_chain_step_bhat(int64_t r, int64_t j, double mu, Rng& rng) -> int64_t;

// Transition probabilities of the two chains, for k = j-1, j, j+1, j+2.
auto embedded_chain_probs_b(int64_t r, int64_t j, double mu) -> std::array<double, 4>;
auto embedded_chain_probs_bhat(int64_t r, int64_t j, double mu) -> std::array<double, 4>;

struct Chain_pair {
  int64_t b = 0;
  int64_t b_hat = 0;
};

// Joint step of (B, B^) driven by one uniformly chosen division. Each marginal
// follows its own transition table and B <= B^ is preserved.
auto embedded_chain_step_pair(int64_t r, Chain_pair state, double mu, Rng& rng) -> Chain_pair;

// B^{n} for a single site, by running the chain from r = 1.
auto single_site_count(int64_t n, double mu, Rng& rng) -> int64_t;

struct Tail_curve {
  std::vector<double> grid;
  std::vector<double> tail;  // empirical P[B/n > a]
  std::vector<double> se;    // Monte Carlo standard error
  std::vector<int64_t> counts;  // the replicate draws of B
};

auto single_site_tail(int64_t n, double mu, int64_t replicates, std::span<const double> grid, Rng& rng)
    -> Tail_curve;

// CSV rows node_id,parent_id,mutated_sites with sites written as site:nucleotide
// pairs separated by semicolons.
auto write_tree_csv(const Lineage_tree& tree, const Mutation_model& mutation, std::ostream& out) -> void;

}  // namespace ldsim

#endif  // LDSIM_SIMULATE_H_
