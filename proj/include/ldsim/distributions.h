#ifndef LDSIM_DISTRIBUTIONS_H_
#define LDSIM_DISTRIBUTIONS_H_

#include <cstdint>
#include <vector>

#include "ldsim/random.h"

namespace ldsim {

// Luria-Delbrück law with parameter c: B = Y_1 + ... + Y_K where
// K ~ Poisson(c) and P[Y = j] = 1/(j(j+1)).
struct Ld_params {
  double c = 0.0;

  auto validate() const -> void;
};

// Generalised Luria-Delbrück law (lambda, a, b, c): K ~ Poisson(c) clones,
// each seeded at an Exp(lambda) age and grown as a birth-death process with
// birth rate a and death rate b.
struct Gen_ld_params {
  double lambda = 1.0;
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;

  auto validate() const -> void;
};

// Time-t law of a birth-death process started from one individual.
struct Bd_time_law {
  double birth = 1.0;
  double death = 0.0;
  double t = 0.0;

  auto validate() const -> void;

  // P[Y(t) = 0] and the geometric ratio of Y(t) given Y(t) > 0.
  auto extinction_probability() const -> double;
  auto geometric_ratio() const -> double;
};

// P[Y >= j] = 1/j, so Y = floor(1/U) with U uniform on (0,1].
auto sample_y(Rng& rng) -> int64_t;
// Inversion map exposed for testing: u in (0,1].
auto y_from_uniform(double u) -> int64_t;

auto sample_ld(const Ld_params& p, Rng& rng) -> int64_t;

// (1-z)^{c(1/z-1)}, with its continuous limits at z = 0 and z = 1.
auto ld_pgf(const Ld_params& p, double z) -> double;

// Exact mass function on {0..m_max} by the compound-Poisson (Panjer)
// recursion P[B=m] = (c/m) sum_{j=1}^m j q_j P[B=m-j], q_j = 1/(j(j+1)).
auto ld_pmf(const Ld_params& p, int64_t m_max) -> std::vector<double>;

// c/m; m P[B >= m] -> c as m -> infinity.
auto ld_tail_asymptote(const Ld_params& p, int64_t m) -> double;

auto bd_time_law_sample(const Bd_time_law& law, Rng& rng) -> int64_t;

auto sample_gen_ld(const Gen_ld_params& p, Rng& rng) -> int64_t;

// Closed-form pgf, valid only for supercritical clones (a > b), z in [0,1).
auto gen_ld_pgf(const Gen_ld_params& p, double z) -> double;

// F[1, p; 1+p; x] for x < 1. Throws Convergence_error if the series does not
// reach the absolute tolerance within the term budget.
auto hyp2f1_special(double p, double x, double tol = 1e-12, int64_t max_terms = 1'000'000) -> double;

}  // namespace ldsim

#endif  // LDSIM_DISTRIBUTIONS_H_
