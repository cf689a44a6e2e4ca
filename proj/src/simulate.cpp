#include "ldsim/simulate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "ldsim/errors.h"

namespace ldsim {

// ---------------------------------------------------------------------------
// Mutation_model

namespace {

auto check_row_stochastic(const Seq_matrix& m) -> void {
  for (const auto& row : m) {
    auto sum = 0.0;
    for (auto p : row) {
      if (!(p >= 0.0 && p <= 1.0)) { throw Config_error{"mutation matrix entries must lie in [0,1]"}; }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) { throw Config_error{"mutation matrix rows must sum to 1"}; }
  }
}

auto check_site_count(int64_t sites) -> void {
  if (sites <= 0) { throw Config_error{"the number of sites must be positive"}; }
}

}  // namespace

auto Mutation_model::uniform(int64_t sites, double mu, std::vector<Nucleotide> reference) -> Mutation_model {
  check_site_count(sites);
  if (!(mu >= 0.0 && mu <= 1.0)) { throw Config_error{"mu must lie in [0,1]"}; }
  auto m = Seq_matrix{};
  for (auto from = 0; from != k_num_nucleotides; ++from) {
    for (auto to = 0; to != k_num_nucleotides; ++to) { m[from][to] = from == to ? 1.0 - mu : mu / 3.0; }
  }
  auto model = Mutation_model{};
  model.sites_ = sites;
  model.matrices_ = {m};
  model.reference_ = std::move(reference);
  model.uniform_mu_ = mu;
  model.finish();
  return model;
}

auto Mutation_model::per_site(int64_t sites, std::vector<Seq_matrix> matrices, std::vector<uint32_t> site_matrix,
                              std::vector<Nucleotide> reference) -> Mutation_model {
  check_site_count(sites);
  if (matrices.empty()) { throw Config_error{"at least one mutation matrix is required"}; }
  for (const auto& m : matrices) { check_row_stochastic(m); }
  if (!site_matrix.empty()) {
    if (std::ssize(site_matrix) != sites) { throw Config_error{"site-to-matrix map must cover every site"}; }
    for (auto k : site_matrix) {
      if (k >= matrices.size()) { throw Config_error{"site-to-matrix map refers to a missing matrix"}; }
    }
  }
  auto model = Mutation_model{};
  model.sites_ = sites;
  model.matrices_ = std::move(matrices);
  model.site_matrix_ = std::move(site_matrix);
  model.reference_ = std::move(reference);
  model.finish();
  return model;
}

auto Mutation_model::finish() -> void {
  if (!reference_.empty() && std::ssize(reference_) != sites_) {
    throw Config_error{"reference genome length must equal the number of sites"};
  }
  // Escape probabilities depend on the (matrix, reference nucleotide) pair;
  // cache 1 - M[u][u] per matrix and nucleotide, then take the max over the
  // pairs that occur.
  matrix_escape_.assign(matrices_.size() * k_num_nucleotides, 0.0);
  for (auto k = size_t{0}; k != matrices_.size(); ++k) {
    for (auto u = 0; u != k_num_nucleotides; ++u) {
      matrix_escape_[k * k_num_nucleotides + u] = 1.0 - matrices_[k][u][u];
    }
  }
  max_escape_ = 0.0;
  if (site_matrix_.empty() && reference_.empty()) {
    max_escape_ = matrix_escape_[index_of(Nucleotide::A)];
  } else {
    for (auto i = Site_index{0}; i != static_cast<Site_index>(sites_); ++i) {
      max_escape_ = std::max(max_escape_, reference_escape(i));
    }
  }
}

auto Mutation_model::reference_escape(Site_index i) const -> double {
  auto k = site_matrix_.empty() ? size_t{0} : site_matrix_[i];
  return matrix_escape_[k * k_num_nucleotides + index_of(reference(i))];
}

// ---------------------------------------------------------------------------
// Fitness_model

Fitness_model::Fitness_model(Rates root, std::vector<Site_index> selective_sites,
                             std::map<Selective_genotype, Rates> table)
    : root_{root}, selective_sites_{std::move(selective_sites)}, table_{std::move(table)} {
  std::sort(selective_sites_.begin(), selective_sites_.end());
  selective_sites_.erase(std::unique(selective_sites_.begin(), selective_sites_.end()), selective_sites_.end());
}

auto Fitness_model::rates(const Selective_genotype& genotype) const -> Rates {
  if (genotype.empty()) { return root_; }
  auto it = table_.find(genotype);
  return it == table_.end() ? root_ : it->second;
}

auto Fitness_model::is_selective(Site_index i) const -> bool {
  return std::binary_search(selective_sites_.begin(), selective_sites_.end(), i);
}

auto Fitness_model::is_pure_birth() const -> bool {
  return selective_sites_.empty() && root_.death == 0.0;
}

auto Fitness_model::validate(int64_t sites) const -> void {
  auto check = [](const Rates& r) {
    if (!(std::isfinite(r.division) && std::isfinite(r.death) && r.division >= 0.0 && r.death >= 0.0)) {
      throw Config_error{"division and death rates must be finite and nonnegative"};
    }
  };
  check(root_);
  if (!(root_.division > root_.death)) {
    throw Config_error{"the unmutated genotype must be supercritical (division rate > death rate)"};
  }
  for (auto i : selective_sites_) {
    if (static_cast<int64_t>(i) >= sites) { throw Config_error{"selective site index out of range"}; }
  }
  for (const auto& [genotype, r] : table_) {
    check(r);
    for (const auto& s : genotype) {
      if (!is_selective(s.site)) { throw Config_error{"fitness table genotype refers to a non-selective site"}; }
    }
  }
}

// ---------------------------------------------------------------------------
// Forward simulation

namespace {

struct Cell {
  Genome_diff genome;
  int64_t node = -1;
  uint32_t cls = 0;
  uint32_t slot = 0;
};

struct Genotype_class {
  Selective_genotype key;
  Rates rates;
  double weight = 0.0;  // division + death
  std::vector<uint32_t> members;  // indices into the cell pool
};

class Engine {
 public:
  Engine(const Mutation_model& mutation, const Fitness_model& fitness, int64_t n, Rng& rng,
         const Sim_options& options)
      : mutation_{mutation}, fitness_{fitness}, n_{n}, rng_{rng}, options_{options},
        fast_path_{fitness.is_pure_birth() && !options.force_general_path} {}

  auto run() -> Sim_outcome {
    auto attempts = int64_t{0};
    while (!run_once()) {
      ++attempts;
      if (attempts >= options_.limits.max_attempts) {
        throw Resource_error{"population went extinct on every one of " + std::to_string(attempts) + " attempts"};
      }
    }
    auto outcome = collect();
    outcome.attempts = attempts;
    return outcome;
  }

 private:
  auto reset() -> void {
    cells_.clear();
    classes_.clear();
    class_index_.clear();
    events_.assign(static_cast<size_t>(mutation_.sites()), 0);
    tree_ = Lineage_tree{};
    event_counter_ = 0;
    divisions_ = 0;
    deaths_ = 0;

    auto root = Cell{};
    root.node = new_node(-1, Genome_diff{});
    cells_.push_back(std::move(root));
    if (!fast_path_) { attach(0); }
  }

  auto run_once() -> bool {
    reset();
    while (std::ssize(cells_) < n_) {
      if (cells_.empty()) { return false; }
      if (fast_path_) {
        divide(static_cast<uint32_t>(rng_.uniform_index(cells_.size())));
        continue;
      }
      auto [idx, divides] = choose_event();
      if (divides) {
        divide(idx);
      } else {
        die(idx);
      }
    }
    return true;
  }

  // Embedded jump chain of the multitype process: a class is chosen in
  // proportion to its total event rate, a cell uniformly inside it, and the
  // event type by the cell's division/death rates.
  auto choose_event() -> std::pair<uint32_t, bool> {
    auto total = 0.0;
    for (const auto& c : classes_) { total += c.weight * static_cast<double>(c.members.size()); }
    auto u = rng_.uniform() * total;
    auto chosen = size_t{0};
    for (; chosen + 1 < classes_.size(); ++chosen) {
      auto w = classes_[chosen].weight * static_cast<double>(classes_[chosen].members.size());
      if (u < w) { break; }
      u -= w;
    }
    // Float round-off can land on an empty trailing class.
    while (classes_[chosen].members.empty()) { chosen = (chosen + classes_.size() - 1) % classes_.size(); }
    auto& cls = classes_[chosen];
    auto idx = cls.members[rng_.uniform_index(cls.members.size())];
    auto divides = rng_.uniform() * cls.weight < cls.rates.division;
    return {idx, divides};
  }

  auto new_node(int64_t parent, const Genome_diff& genome) -> int64_t {
    if (!options_.keep_tree) { return -1; }
    auto& node = tree_.nodes.emplace_back();
    node.parent = parent;
    node.birth_event = parent < 0 ? -1 : event_counter_;
    node.genome = genome;
    return std::ssize(tree_.nodes) - 1;
  }

  auto end_node(int64_t node, bool died) -> void {
    if (!options_.keep_tree) { return; }
    tree_.nodes[node].end_event = event_counter_;
    tree_.nodes[node].died = died;
  }

  auto selective_key(const Genome_diff& genome) const -> Selective_genotype {
    auto key = Selective_genotype{};
    for (const auto& s : genome) {
      if (s.nucleotide != mutation_.reference(s.site) && fitness_.is_selective(s.site)) { key.push_back(s); }
    }
    return key;
  }

  auto class_for(const Genome_diff& genome) -> uint32_t {
    auto key = fitness_.has_selection() ? selective_key(genome) : Selective_genotype{};
    auto [it, inserted] = class_index_.try_emplace(key, static_cast<uint32_t>(classes_.size()));
    if (inserted) {
      auto& c = classes_.emplace_back();
      c.rates = fitness_.rates(key);
      c.weight = c.rates.division + c.rates.death;
      c.key = std::move(key);
    }
    return it->second;
  }

  auto attach(uint32_t idx) -> void {
    auto& cell = cells_[idx];
    cell.cls = class_for(cell.genome);
    auto& members = classes_[cell.cls].members;
    cell.slot = static_cast<uint32_t>(members.size());
    members.push_back(idx);
  }

  auto detach(uint32_t idx) -> void {
    auto& cell = cells_[idx];
    auto& members = classes_[cell.cls].members;
    auto moved = members.back();
    members[cell.slot] = moved;
    cells_[moved].slot = cell.slot;
    members.pop_back();
  }

  auto draw_from_row(const std::array<double, 4>& row) -> Nucleotide {
    auto u = rng_.uniform();
    for (auto k = 0; k != k_num_nucleotides - 1; ++k) {
      if (u < row[k]) { return k_nucleotides[k]; }
      u -= row[k];
    }
    return Nucleotide::T;
  }

  // Daughter genome given the parent's. Sites already in the parent's diff are
  // resampled from their own rows; the rest (all at the reference) are visited
  // by geometric skipping at the largest escape probability and thinned to
  // each site's own escape probability.
  auto make_daughter(const Genome_diff& parent) -> Genome_diff {
    fresh_.clear();
    auto p_max = mutation_.max_reference_escape();
    if (p_max > 0.0) {
      auto sites = mutation_.sites();
      auto pos = int64_t{-1};
      while (true) {
        pos += 1 + rng_.geometric_failures(p_max);
        if (pos >= sites) { break; }
        auto site = static_cast<Site_index>(pos);
        auto touched = std::binary_search(parent.begin(), parent.end(), Site_state{site, Nucleotide::A},
                                          [](const Site_state& l, const Site_state& r) { return l.site < r.site; });
        if (touched) { continue; }
        auto escape = mutation_.reference_escape(site);
        if (escape < p_max && rng_.uniform() * p_max >= escape) { continue; }
        auto u = mutation_.reference(site);
        const auto& row = mutation_.matrix(site)[index_of(u)];
        auto x = rng_.uniform() * escape;
        auto to = u;
        for (auto k : k_nucleotides) {
          if (k == u) { continue; }
          to = k;
          if (x < row[index_of(k)]) { break; }
          x -= row[index_of(k)];
        }
        fresh_.push_back(Site_state{site, to});
        ++events_[site];
      }
    }

    auto out = Genome_diff{};
    out.reserve(parent.size() + fresh_.size());
    auto f = fresh_.begin();
    for (const auto& s : parent) {
      while (f != fresh_.end() && f->site < s.site) { out.push_back(*f++); }
      auto next = draw_from_row(mutation_.matrix(s.site)[index_of(s.nucleotide)]);
      if (next != s.nucleotide) { ++events_[s.site]; }
      out.push_back(Site_state{s.site, next});
    }
    out.insert(out.end(), f, fresh_.end());
    return out;
  }

  auto divide(uint32_t idx) -> void {
    if (!fast_path_) { detach(idx); }
    auto parent_genome = std::move(cells_[idx].genome);
    auto parent_node = cells_[idx].node;
    end_node(parent_node, false);

    auto first = make_daughter(parent_genome);
    auto second = make_daughter(parent_genome);

    cells_[idx].node = new_node(parent_node, first);
    cells_[idx].genome = std::move(first);
    auto other = Cell{};
    other.node = new_node(parent_node, second);
    other.genome = std::move(second);
    cells_.push_back(std::move(other));

    if (!fast_path_) {
      attach(idx);
      attach(static_cast<uint32_t>(cells_.size() - 1));
    }
    ++divisions_;
    ++event_counter_;
  }

  auto die(uint32_t idx) -> void {
    detach(idx);
    end_node(cells_[idx].node, true);
    auto last = static_cast<uint32_t>(cells_.size() - 1);
    if (idx != last) {
      cells_[idx] = std::move(cells_[last]);
      classes_[cells_[idx].cls].members[cells_[idx].slot] = idx;
    }
    cells_.pop_back();
    ++deaths_;
    ++event_counter_;
  }

  auto collect() -> Sim_outcome {
    auto out = Sim_outcome{};
    auto sites = static_cast<size_t>(mutation_.sites());
    out.n = n_;
    out.b.assign(sites, 0);
    out.b_hat.assign(sites, 0);
    out.events = std::move(events_);
    out.divisions = divisions_;
    out.deaths = deaths_;
    auto key = Genome_diff{};
    for (const auto& cell : cells_) {
      key.clear();
      for (const auto& s : cell.genome) {
        ++out.b_hat[s.site];
        if (s.nucleotide != mutation_.reference(s.site)) {
          ++out.b[s.site];
          key.push_back(s);
        }
      }
      ++out.census[key];
    }
    if (options_.keep_tree) {
      tree_.divisions = divisions_;
      tree_.deaths = deaths_;
      for (const auto& cell : cells_) { tree_.alive.push_back(cell.node); }
      std::sort(tree_.alive.begin(), tree_.alive.end());
      out.tree = std::move(tree_);
    }
    return out;
  }

  const Mutation_model& mutation_;
  const Fitness_model& fitness_;
  int64_t n_;
  Rng& rng_;
  const Sim_options& options_;
  bool fast_path_;

  std::vector<Cell> cells_;
  std::vector<Genotype_class> classes_;
  std::map<Selective_genotype, uint32_t> class_index_;
  std::vector<int64_t> events_;
  Lineage_tree tree_;
  Genome_diff fresh_;
  int64_t event_counter_ = 0;
  int64_t divisions_ = 0;
  int64_t deaths_ = 0;
};

}  // namespace

auto simulate_to_n(const Mutation_model& mutation, const Fitness_model& fitness, int64_t n, Rng& rng,
                   const Sim_options& options) -> Sim_outcome {
  if (n < 1) { throw Config_error{"n must be at least 1"}; }
  if (n > options.limits.max_population || n > std::numeric_limits<uint32_t>::max()) {
    throw Resource_error{"n=" + std::to_string(n) + " exceeds the configured population budget"};
  }
  if (mutation.sites() > options.limits.max_sites ||
      mutation.sites() > static_cast<int64_t>(std::numeric_limits<Site_index>::max())) {
    throw Resource_error{"|S|=" + std::to_string(mutation.sites()) + " exceeds the configured site budget"};
  }
  fitness.validate(mutation.sites());
  return Engine{mutation, fitness, n, rng, options}.run();
}

auto descendant_fractions(const Lineage_tree& tree) -> std::map<int64_t, double> {
  auto living = std::vector<int64_t>(tree.nodes.size(), 0);
  for (auto id : tree.alive) { living[id] = 1; }
  // Parents precede children, so one reverse sweep accumulates subtree counts.
  for (auto id = std::ssize(tree.nodes) - 1; id > 0; --id) {
    auto parent = tree.nodes[id].parent;
    if (parent >= 0) { living[parent] += living[id]; }
  }
  auto n = static_cast<double>(tree.alive.size());
  auto out = std::map<int64_t, double>{};
  for (auto id = int64_t{0}; id != std::ssize(tree.nodes); ++id) {
    if (living[id] > 0) { out.emplace(id, static_cast<double>(living[id]) / n); }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Single-site embedded chains (pure-birth model)

namespace {

auto check_chain_args(int64_t r, int64_t j) -> void {
  if (r < 1) { throw Domain_error{"chain step requires r >= 1"}; }
  if (j < 0 || j > r) { throw Domain_error{"chain state must satisfy 0 <= j <= r"}; }
}

auto pick(const std::array<double, 4>& probs, Rng& rng) -> int {
  auto u = rng.uniform();
  for (auto k = 0; k != 3; ++k) {
    if (u < probs[k]) { return k; }
    u -= probs[k];
  }
  return 3;
}

}  // namespace

auto embedded_chain_probs_b(int64_t r, int64_t j, double mu) -> std::array<double, 4> {
  check_chain_args(r, j);
  auto mutant = static_cast<double>(j) / static_cast<double>(r);
  auto other = static_cast<double>(r - j) / static_cast<double>(r);
  auto back = mu / 3.0;
  return {
      mutant * back * back,
      mutant * 2.0 * back * (1.0 - back) + other * (1.0 - mu) * (1.0 - mu),
      mutant * (1.0 - back) * (1.0 - back) + other * 2.0 * mu * (1.0 - mu),
      other * mu * mu,
  };
}

auto embedded_chain_probs_bhat(int64_t r, int64_t j, double mu) -> std::array<double, 4> {
  check_chain_args(r, j);
  auto touched = static_cast<double>(j) / static_cast<double>(r);
  auto other = static_cast<double>(r - j) / static_cast<double>(r);
  return {0.0, other * (1.0 - mu) * (1.0 - mu), touched + other * 2.0 * mu * (1.0 - mu), other * mu * mu};
}

auto embedded_chain_step_b(int64_t r, int64_t j, double mu, Rng& rng) -> int64_t {
  return j - 1 + pick(embedded_chain_probs_b(r, j, mu), rng);
}

auto embedded_chain_step_bhat(int64_t r, int64_t j, double mu, Rng& rng) -> int64_t {
  return j - 1 + pick(embedded_chain_probs_bhat(r, j, mu), rng);
}

auto embedded_chain_step_pair(int64_t r, Chain_pair state, double mu, Rng& rng) -> Chain_pair {
  check_chain_args(r, state.b_hat);
  if (state.b < 0 || state.b > state.b_hat) { throw Domain_error{"chain pair requires 0 <= B <= B^"}; }
  auto cell = static_cast<int64_t>(rng.uniform_index(static_cast<uint64_t>(r)));
  auto changed_daughters = [&](double p) { return int64_t{rng.bernoulli(p)} + int64_t{rng.bernoulli(p)}; };
  if (cell < state.b) {
    // Mutant parent: each daughter reverts with probability mu/3.
    return {state.b + 1 - changed_daughters(mu / 3.0), state.b_hat + 1};
  }
  auto gained = changed_daughters(mu);
  if (cell < state.b_hat) {
    // Reverted descendant: already counted in B^.
    return {state.b + gained, state.b_hat + 1};
  }
  return {state.b + gained, state.b_hat + gained};
}

auto single_site_count(int64_t n, double mu, Rng& rng) -> int64_t {
  if (n < 1) { throw Domain_error{"n must be positive"}; }
  auto j = int64_t{0};
  for (auto r = int64_t{1}; r < n; ++r) { j = embedded_chain_step_b(r, j, mu, rng); }
  return j;
}

auto single_site_tail(int64_t n, double mu, int64_t replicates, std::span<const double> grid, Rng& rng)
    -> Tail_curve {
  for (auto a : grid) {
    if (!(a > 0.0 && a < 1.0)) { throw Domain_error{"tail grid values must lie strictly inside (0,1)"}; }
  }
  if (replicates < 1) { throw Domain_error{"replicates must be positive"}; }
  auto curve = Tail_curve{};
  curve.grid.assign(grid.begin(), grid.end());
  curve.counts.reserve(static_cast<size_t>(replicates));
  for (auto k = int64_t{0}; k != replicates; ++k) { curve.counts.push_back(single_site_count(n, mu, rng)); }
  auto reps = static_cast<double>(replicates);
  for (auto a : grid) {
    auto threshold = a * static_cast<double>(n);
    auto hits = std::count_if(curve.counts.begin(), curve.counts.end(),
                              [&](int64_t b) { return static_cast<double>(b) > threshold; });
    auto p = static_cast<double>(hits) / reps;
    curve.tail.push_back(p);
    curve.se.push_back(std::sqrt(p * (1.0 - p) / reps));
  }
  return curve;
}

auto write_tree_csv(const Lineage_tree& tree, const Mutation_model& mutation, std::ostream& out) -> void {
  out << "node_id,parent_id,mutated_sites\n";
  auto mutated = Genome_diff{};
  for (auto id = int64_t{0}; id != std::ssize(tree.nodes); ++id) {
    const auto& node = tree.nodes[id];
    mutated.clear();
    for (const auto& s : node.genome) {
      if (s.nucleotide != mutation.reference(s.site)) { mutated.push_back(s); }
    }
    out << id << ',' << node.parent << ',' << format_genome(mutated) << '\n';
  }
}

}  // namespace ldsim
