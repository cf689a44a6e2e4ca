#ifndef LDSIM_LIMITS_H_
#define LDSIM_LIMITS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ldsim/random.h"

namespace ldsim {

// A node of the infinite binary tree, addressed by its path from the root
// ("" is the root, "01" the second daughter of the first daughter).
struct Yule_node {
  std::string address;
  double value = 0.0;  // limiting descendant fraction P_x

  auto depth() const -> int { return static_cast<int>(address.size()); }
};

// Limiting descendant fractions of a Yule tree, P_x = prod of U_y along the
// path with U_{y0} + U_{y1} = 1. Nodes are listed depth-first, parents before
// children, and the root is omitted.
struct Yule_fractions {
  std::vector<Yule_node> entries;
  double prune_eps = 1e-4;
  int full_depth = 0;
};

// Retains every node with P_x >= prune_eps, and additionally every node at
// depth <= full_depth regardless of its value. Descendants of a pruned node
// have smaller values, so counts above prune_eps are exact.
auto sample_yule_fractions(double prune_eps, Rng& rng, int full_depth = 0) -> Yule_fractions;

struct Atom {
  double location = 0.0;  // in (0,1]
  int64_t multiplicity = 0;
};

struct Point_measure {
  std::vector<Atom> atoms;

  // Total multiplicity of atoms with lo < location < hi.
  auto mass(double lo, double hi) const -> int64_t;
  // Total multiplicity of atoms with location > lo (including atoms at 1).
  auto mass_above(double lo) const -> int64_t;
  auto total_mass() const -> int64_t;
};

// Cox-process limit of the site frequency spectrum at positive fractions:
// atoms (P_x, M_x) with M_x ~ Poisson(eta) independently per node. Atoms with
// zero multiplicity are dropped.
auto sample_cox_sfs(double eta, double prune_eps, Rng& rng) -> Point_measure;

struct Skeleton_node {
  int64_t parent = -1;
  int depth = 0;
  double lifetime = 0.0;
  int64_t divisions_witnessed = 0;  // R_x
  double fraction = 0.0;            // immortal-descendant fraction at the stop
  bool completed = false;
};

struct Conjecture_draw {
  Point_measure measure;
  std::vector<Skeleton_node> skeleton;  // node 0 is the root
  int64_t skeleton_n = 0;
};

// Limit construction with death: the immortal skeleton grows as a Yule
// process at rate alpha - beta and each immortal cell seeds mortal lineages
// at rate 2 beta. A completed non-root node witnesses 1 + Poisson(2 beta
// A_x) divisions (the root only the Poisson part), each carrying
// Poisson(eta) mutations, all placed at the node's immortal-descendant
// fraction when the skeleton holds skeleton_n cells. Heuristic: the joint law
// of (P_x, R_x) for beta > 0 is not established.
auto sample_conjecture_sfs_detailed(double alpha, double beta, double eta, int64_t skeleton_n, Rng& rng)
    -> Conjecture_draw;
auto sample_conjecture_sfs(double alpha, double beta, double eta, int64_t skeleton_n, Rng& rng) -> Point_measure;

// Limiting mean number of sites mutated in a fraction > a of cells:
// 2 eta (1/a - 1).
auto mean_sfs_tail(double eta, double a) -> double;

// Small-mu limit of mu^{-1} P[B/n > a]: 2 (1/a - 1).
auto tail_prob_asymptote(double a) -> double;

// P[X >= 2] for X ~ Binomial(2n-2, mu), the chance that a site mutates more
// than once before the population reaches n cells.
auto isa_violation_prob(int64_t n, double mu) -> double;

auto expected_isa_violations(int64_t n, double mu, int64_t sites) -> double;

}  // namespace ldsim

#endif  // LDSIM_LIMITS_H_
