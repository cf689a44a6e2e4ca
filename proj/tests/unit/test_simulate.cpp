#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "ldsim/analytics.h"
#include "ldsim/errors.h"
#include "ldsim/simulate.h"

namespace ldsim {
namespace {

// Exact law of B at population n under pure birth with the uniform model
// (escape mu, reversion mu/3 per daughter), by forward recursion over the
// embedded chain.
auto chain_law(int64_t n, double mu) -> std::vector<double> {
  auto law = std::vector<double>(static_cast<size_t>(n) + 2, 0.0);
  law[0] = 1.0;
  auto r_mu = mu / 3.0;
  for (auto r = int64_t{1}; r < n; ++r) {
    auto next = std::vector<double>(law.size(), 0.0);
    for (auto j = int64_t{0}; j <= r; ++j) {
      auto p = law[j];
      if (p == 0.0) { continue; }
      auto fm = static_cast<double>(j) / r;
      auto fr = 1.0 - fm;
      if (j > 0) { next[j - 1] += p * fm * r_mu * r_mu; }
      next[j] += p * (fm * 2 * r_mu * (1 - r_mu) + fr * (1 - mu) * (1 - mu));
      next[j + 1] += p * (fm * (1 - r_mu) * (1 - r_mu) + fr * 2 * mu * (1 - mu));
      if (j + 2 < std::ssize(next)) { next[j + 2] += p * fr * mu * mu; }
    }
    law = next;
  }
  law.resize(static_cast<size_t>(n) + 1);
  return law;
}

auto collect_b(const Mutation_model& m, const Fitness_model& f, int64_t n, int reps, uint64_t seed,
               Sim_options options = {}) -> std::vector<int64_t> {
  auto out = std::vector<int64_t>{};
  for (auto i = 0; i != reps; ++i) {
    auto rng = Rng::for_replicate(seed, static_cast<uint64_t>(i));
    out.push_back(simulate_to_n(m, f, n, rng, options).b[0]);
  }
  return out;
}

TEST(Mutation_model, validation) {
  EXPECT_THROW(Mutation_model::uniform(0, 0.1), Config_error);
  EXPECT_THROW(Mutation_model::uniform(3, 1.5), Config_error);
  auto bad = Seq_matrix{};
  bad[0] = {0.5, 0.1, 0.1, 0.1};
  bad[1] = {0.0, 1.0, 0.0, 0.0};
  bad[2] = {0.0, 0.0, 1.0, 0.0};
  bad[3] = {0.0, 0.0, 0.0, 1.0};
  EXPECT_THROW(Mutation_model::per_site(2, {bad}, {}), Config_error);
}

TEST(Mutation_model, per_site_escape) {
  auto m = Seq_matrix{};
  for (auto r = 0; r != 4; ++r) {
    for (auto c = 0; c != 4; ++c) { m[r][c] = r == c ? 0.7 : 0.1; }
  }
  auto identity = Seq_matrix{};
  for (auto r = 0; r != 4; ++r) { identity[r][r] = 1.0; }
  auto model = Mutation_model::per_site(3, {identity, m}, {0, 1, 0}, {Nucleotide::A, Nucleotide::G, Nucleotide::T});
  EXPECT_DOUBLE_EQ(model.reference_escape(0), 0.0);
  EXPECT_NEAR(model.reference_escape(1), 0.3, 1e-15);
  EXPECT_NEAR(model.max_reference_escape(), 0.3, 1e-15);
  EXPECT_EQ(model.reference(2), Nucleotide::T);
  EXPECT_FALSE(model.uniform_mu().has_value());
}

TEST(Fitness_model, rejects_non_supercritical_root) {
  EXPECT_THROW(Fitness_model(Rates{1.0, 1.0}).validate(1), Config_error);
  EXPECT_THROW(Fitness_model(Rates{1.0, 0.0}, {5}).validate(3), Config_error);
  EXPECT_NO_THROW(Fitness_model(Rates{1.0, 0.9}).validate(1));
}

TEST(Simulate, single_cell_target) {
  auto rng = Rng{1};
  auto r = simulate_to_n(Mutation_model::uniform(4, 0.5), Fitness_model::yule(), 1, rng);
  EXPECT_EQ(r.n, 1);
  EXPECT_EQ(r.divisions, 0);
  EXPECT_EQ(std::accumulate(r.b.begin(), r.b.end(), int64_t{0}), 0);
  EXPECT_THROW(simulate_to_n(Mutation_model::uniform(4, 0.5), Fitness_model::yule(), 0, rng), Config_error);
}

// One division from the founder: the mutant count is Binomial(2, mu).
TEST(Simulate, two_cell_law_by_enumeration) {
  auto expected = std::vector{0.81, 0.18, 0.01};
  for (auto general : {false, true}) {
    auto options = Sim_options{.keep_tree = false, .force_general_path = general, .limits = {}};
    auto b = collect_b(Mutation_model::uniform(1, 0.1), Fitness_model::yule(), 2, 40'000, 3, options);
    for (auto k = 0; k != 3; ++k) {
      auto freq = static_cast<double>(std::count(b.begin(), b.end(), k)) / static_cast<double>(b.size());
      auto se = std::sqrt(expected[k] * (1 - expected[k]) / static_cast<double>(b.size()));
      EXPECT_NEAR(freq, expected[k], 4 * se) << "k=" << k << " general=" << general;
    }
  }
}

TEST(Simulate, finite_n_law_matches_chain_recursion) {
  auto n = int64_t{30};
  auto mu = 0.05;
  auto law = chain_law(n, mu);
  EXPECT_NEAR(std::accumulate(law.begin(), law.end(), 0.0), 1.0, 1e-12);
  auto b = collect_b(Mutation_model::uniform(1, mu), Fitness_model::yule(), n, 20'000, 4);
  EXPECT_LT(ks_distance(b, law), 0.015);
}

TEST(Simulate, fast_and_general_paths_agree) {
  auto model = Mutation_model::uniform(1, 0.01);
  auto fast = collect_b(model, Fitness_model::yule(), 200, 8000, 5);
  auto general = collect_b(model, Fitness_model::yule(), 200, 8000, 6,
                           Sim_options{.keep_tree = false, .force_general_path = true, .limits = {}});
  EXPECT_LT(ks_distance_two_sample(fast, general), 0.03);
}

TEST(Simulate, invariants_hold_on_every_run) {
  auto model = Mutation_model::uniform(40, 0.02);
  for (auto death : {0.0, 0.4}) {
    for (auto i = 0; i != 30; ++i) {
      auto rng = Rng::for_replicate(7, static_cast<uint64_t>(i));
      auto r = simulate_to_n(model, Fitness_model{Rates{1.0, death}}, 300, rng);
      auto cells = int64_t{0};
      auto from_census = std::vector<int64_t>(40, 0);
      for (const auto& [genome, count] : r.census) {
        cells += count;
        for (const auto& s : genome) {
          ASSERT_NE(s.nucleotide, Nucleotide::A);
          from_census[s.site] += count;
        }
      }
      EXPECT_EQ(cells, 300);
      EXPECT_EQ(r.divisions - r.deaths, 299);
      for (auto s = 0; s != 40; ++s) {
        EXPECT_LE(r.b[s], r.b_hat[s]);
        EXPECT_LE(r.b_hat[s], 300);
        EXPECT_EQ(r.b[s], from_census[s]);
      }
    }
  }
}

TEST(Simulate, extinction_restarts_are_counted) {
  auto total = int64_t{0};
  auto reps = 4000;
  for (auto i = 0; i != reps; ++i) {
    auto rng = Rng::for_replicate(8, static_cast<uint64_t>(i));
    total += simulate_to_n(Mutation_model::uniform(1, 0.0), Fitness_model{Rates{1.0, 0.5}}, 50, rng).attempts;
  }
  // Restarts are geometric with success probability from gambler's ruin,
  // ratio death/birth = 1/2, absorbing at 0 and 50.
  auto ratio = 0.5;
  auto ruin = (ratio - std::pow(ratio, 50)) / (1 - std::pow(ratio, 50));
  auto success = 1 - ruin;
  auto mean = (1 - success) / success;
  auto se = std::sqrt((1 - success) / (success * success) / reps);
  EXPECT_NEAR(static_cast<double>(total) / reps, mean, 4 * se);
}

TEST(Simulate, event_counts_pure_birth) {
  auto sum = 0.0;
  auto reps = 50;
  auto sites = 200;
  for (auto i = 0; i != reps; ++i) {
    auto rng = Rng::for_replicate(9, static_cast<uint64_t>(i));
    auto r = simulate_to_n(Mutation_model::uniform(sites, 0.01), Fitness_model::yule(), 100, rng);
    EXPECT_EQ(r.divisions, 99);
    for (auto e : r.events) { sum += static_cast<double>(e); }
  }
  auto count = static_cast<double>(reps * sites);
  auto mean = 198 * 0.01;
  EXPECT_NEAR(sum / count, mean, 4 * std::sqrt(mean / count));
}

TEST(Simulate, deterministic_for_a_seed) {
  auto model = Mutation_model::uniform(20, 0.01);
  auto a = Rng{42};
  auto b = Rng{42};
  auto ra = simulate_to_n(model, Fitness_model{Rates{1.0, 0.3}}, 200, a);
  auto rb = simulate_to_n(model, Fitness_model{Rates{1.0, 0.3}}, 200, b);
  EXPECT_EQ(ra.b, rb.b);
  EXPECT_EQ(ra.b_hat, rb.b_hat);
  EXPECT_EQ(ra.census, rb.census);
}

TEST(Simulate, advantageous_site_grows_faster) {
  auto model = Mutation_model::uniform(2, 0.01);
  auto table = std::map<Selective_genotype, Rates>{};
  for (auto n : {Nucleotide::C, Nucleotide::G, Nucleotide::T}) { table[{Site_state{0, n}}] = Rates{3.0, 0.0}; }
  auto fitness = Fitness_model{Rates{1.0, 0.0}, {0}, table};
  auto selected = 0.0;
  auto neutral = 0.0;
  for (auto i = 0; i != 400; ++i) {
    auto rng = Rng::for_replicate(10, static_cast<uint64_t>(i));
    auto r = simulate_to_n(model, fitness, 200, rng);
    selected += static_cast<double>(r.b[0]);
    neutral += static_cast<double>(r.b[1]);
  }
  EXPECT_GT(selected, 2 * neutral);
}

TEST(Simulate, resource_limits) {
  auto rng = Rng{1};
  auto options = Sim_options{.keep_tree = false, .force_general_path = false, .limits = {.max_population = 10}};
  EXPECT_THROW(simulate_to_n(Mutation_model::uniform(1, 0.1), Fitness_model::yule(), 100, rng, options),
               Resource_error);
}

TEST(Lineage_tree, structure_and_fractions) {
  auto rng = Rng{13};
  auto model = Mutation_model::uniform(10, 0.05);
  auto r = simulate_to_n(model, Fitness_model{Rates{1.0, 0.2}}, 60, rng,
                         Sim_options{.keep_tree = true, .force_general_path = false, .limits = {}});
  ASSERT_TRUE(r.tree.has_value());
  const auto& tree = *r.tree;
  EXPECT_EQ(std::ssize(tree.alive), 60);
  EXPECT_TRUE(std::is_sorted(tree.alive.begin(), tree.alive.end()));
  EXPECT_EQ(tree.nodes[0].parent, -1);
  auto fractions = descendant_fractions(tree);
  EXPECT_DOUBLE_EQ(fractions.at(0), 1.0);
  for (const auto& [id, f] : fractions) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
  auto out = std::ostringstream{};
  write_tree_csv(tree, model, out);
  EXPECT_EQ(out.str().rfind("node_id,parent_id,mutated_sites\n", 0), 0u);
}

TEST(Embedded_chain, transition_tables) {
  auto b = embedded_chain_probs_b(2, 1, 0.3);
  EXPECT_NEAR(b[2], 0.615, 1e-15);
  EXPECT_NEAR(b[0] + b[1] + b[2] + b[3], 1.0, 1e-15);
  auto bhat = embedded_chain_probs_bhat(2, 1, 0.3);
  EXPECT_NEAR(bhat[0], 0.0, 1e-15);
  EXPECT_NEAR(bhat[2], 0.5 + 0.5 * 2 * 0.3 * 0.7, 1e-15);
  EXPECT_NEAR(bhat[3], 0.5 * 0.09, 1e-15);
}

TEST(Embedded_chain, pair_step_preserves_order) {
  auto rng = Rng{14};
  for (auto rep = 0; rep != 200; ++rep) {
    auto state = Chain_pair{};
    for (auto r = int64_t{1}; r != 200; ++r) {
      state = embedded_chain_step_pair(r, state, 0.05, rng);
      ASSERT_LE(state.b, state.b_hat);
      ASSERT_LE(state.b_hat, r + 1);
      ASSERT_GE(state.b, 0);
    }
  }
}

TEST(Embedded_chain, single_site_count_matches_recursion) {
  auto rng = Rng{15};
  auto sample = std::vector<int64_t>{};
  for (auto i = 0; i != 20'000; ++i) { sample.push_back(single_site_count(40, 0.03, rng)); }
  EXPECT_LT(ks_distance(sample, chain_law(40, 0.03)), 0.015);
}

}  // namespace
}  // namespace ldsim
