#ifndef LDSIM_ANALYTICS_H_
#define LDSIM_ANALYTICS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "ldsim/distributions.h"
#include "ldsim/random.h"
#include "ldsim/simulate.h"

namespace ldsim {

// Number of sites per mutant-cell count.
struct Empirical_sfs {
  std::map<int64_t, int64_t> counts;
  int64_t n = 0;
  int64_t sites = 0;

  auto count(int64_t k) const -> int64_t;
  auto normalized(int64_t k) const -> double;
  // Sites with B_i / n > a.
  auto tail(double a) const -> int64_t;
};

auto empirical_sfs(const Sim_outcome& outcome) -> Empirical_sfs;
auto empirical_sfs(std::span<const int64_t> b, int64_t n) -> Empirical_sfs;

// Number of sites with B_i / n > a at each grid point.
auto sfs_tail_curve(const Sim_outcome& outcome, std::span<const double> grid) -> std::vector<int64_t>;

// Default grid: `points` log-spaced values in [lo, hi].
auto log_grid(double lo = 0.05, double hi = 0.95, int points = 50) -> std::vector<double>;

// Sup-distance between the empirical CDF of `sample` and the CDF of `pmf`.
// Mass missing from a truncated pmf is treated as lying beyond its support.
auto ks_distance(std::span<const int64_t> sample, std::span<const double> pmf) -> double;

// Two-sample Kolmogorov-Smirnov statistic for integer samples.
auto ks_distance_two_sample(std::span<const int64_t> first, std::span<const int64_t> second) -> double;

struct Mixture_component {
  double weight = 0.0;
  Gen_ld_params law;
};

// Weighted mixture of generalised Luria-Delbrück laws.
struct Mixture_target {
  std::vector<Mixture_component> components;

  auto validate() const -> void;
};

struct Mixture_pmf {
  std::vector<double> mass;
  std::vector<double> se;  // Monte Carlo standard error per entry; zero on exact paths
  bool exact = true;       // every nonzero-weight component was evaluated exactly
};

// Components with b = 0 and a = lambda reduce to LD(c) and use the exact
// recursion; the rest are estimated from mc_draws samples each.
auto mixture_pmf(const Mixture_target& target, int64_t m_max, int64_t mc_draws, Rng& rng) -> Mixture_pmf;

auto write_sfs_csv(const Empirical_sfs& sfs, std::ostream& out) -> void;
// Columns a,count,theory_mean.
auto write_tail_csv(std::span<const double> grid, std::span<const double> counts, std::span<const double> theory,
                    std::ostream& out) -> void;

}  // namespace ldsim

#endif  // LDSIM_ANALYTICS_H_
