#include "ldsim/distributions.h"

#include <cmath>
#include <limits>
#include <string>

#include "ldsim/errors.h"

namespace ldsim {

namespace {

auto require_finite_nonnegative(double v, const char* name) -> void {
  if (!std::isfinite(v) || v < 0.0) {
    throw Domain_error{std::string{name} + " must be finite and nonnegative, got " + std::to_string(v)};
  }
}

}  // namespace

auto Ld_params::validate() const -> void { require_finite_nonnegative(c, "c"); }

auto Gen_ld_params::validate() const -> void {
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw Domain_error{"lambda must be finite and positive, got " + std::to_string(lambda)};
  }
  require_finite_nonnegative(a, "a");
  require_finite_nonnegative(b, "b");
  require_finite_nonnegative(c, "c");
}

auto Bd_time_law::validate() const -> void {
  require_finite_nonnegative(birth, "birth");
  require_finite_nonnegative(death, "death");
  require_finite_nonnegative(t, "t");
}

// With lambda = birth - death and E = e^{lambda t}:
//   alpha_t = death (E-1) / (birth E - death),  beta_t = birth (E-1) / (birth E - death).
// Written via expm1 so that small lambda t and huge E stay accurate.
auto Bd_time_law::extinction_probability() const -> double {
  if (t == 0.0 || death == 0.0) { return 0.0; }
  auto lambda = birth - death;
  if (lambda == 0.0) { return birth * t / (1.0 + birth * t); }
  auto em1 = std::expm1(lambda * t);
  if (std::isinf(em1)) { return death / birth; }
  return death * em1 / (birth * em1 + lambda);
}

auto Bd_time_law::geometric_ratio() const -> double {
  if (t == 0.0 || birth == 0.0) { return 0.0; }
  auto lambda = birth - death;
  if (lambda == 0.0) { return birth * t / (1.0 + birth * t); }
  auto em1 = std::expm1(lambda * t);
  if (std::isinf(em1)) { return 1.0; }
  return birth * em1 / (birth * em1 + lambda);
}

auto y_from_uniform(double u) -> int64_t {
  if (!(u > 0.0 && u <= 1.0)) { throw Domain_error{"inversion uniform must lie in (0,1]"}; }
  auto y = std::floor(1.0 / u);
  // U below ~1e-19 maps past int64; such draws have probability ~1e-19.
  constexpr auto cap = static_cast<double>(std::numeric_limits<int64_t>::max() / 2);
  return static_cast<int64_t>(std::min(y, cap));
}

auto sample_y(Rng& rng) -> int64_t { return y_from_uniform(rng.uniform_open_closed()); }

auto sample_ld(const Ld_params& p, Rng& rng) -> int64_t {
  auto k = rng.poisson(p.c);
  auto total = int64_t{0};
  for (auto i = int64_t{0}; i != k; ++i) { total += sample_y(rng); }
  return total;
}

auto ld_pgf(const Ld_params& p, double z) -> double {
  p.validate();
  if (!(z >= 0.0 && z <= 1.0)) { throw Domain_error{"ld_pgf: z must lie in [0,1], got " + std::to_string(z)}; }
  if (z == 1.0 || p.c == 0.0) { return 1.0; }
  if (z == 0.0) { return std::exp(-p.c); }
  return std::exp(p.c * (1.0 / z - 1.0) * std::log1p(-z));
}

auto ld_pmf(const Ld_params& p, int64_t m_max) -> std::vector<double> {
  p.validate();
  if (m_max < 0) { throw Domain_error{"ld_pmf: m_max must be nonnegative"}; }
  auto pmf = std::vector<double>(static_cast<size_t>(m_max) + 1, 0.0);
  pmf[0] = std::exp(-p.c);
  for (auto m = int64_t{1}; m <= m_max; ++m) {
    // j * q_j = 1/(j+1)
    auto acc = 0.0;
    for (auto j = int64_t{1}; j <= m; ++j) { acc += pmf[m - j] / static_cast<double>(j + 1); }
    pmf[m] = p.c * acc / static_cast<double>(m);
  }
  return pmf;
}

auto ld_tail_asymptote(const Ld_params& p, int64_t m) -> double {
  p.validate();
  if (m < 1) { throw Domain_error{"ld_tail_asymptote: m must be positive"}; }
  return p.c / static_cast<double>(m);
}

auto bd_time_law_sample(const Bd_time_law& law, Rng& rng) -> int64_t {
  if (law.t == 0.0 || (law.birth == 0.0 && law.death == 0.0)) { return 1; }
  auto extinct = law.extinction_probability();
  if (extinct > 0.0 && rng.uniform() < extinct) { return 0; }
  auto ratio = law.geometric_ratio();
  return 1 + rng.geometric_failures(1.0 - ratio);
}

auto sample_gen_ld(const Gen_ld_params& p, Rng& rng) -> int64_t {
  auto k = rng.poisson(p.c);
  auto total = int64_t{0};
  for (auto i = int64_t{0}; i != k; ++i) {
    auto age = rng.exponential(p.lambda);
    total += bd_time_law_sample(Bd_time_law{.birth = p.a, .death = p.b, .t = age}, rng);
  }
  return total;
}

auto gen_ld_pgf(const Gen_ld_params& p, double z) -> double {
  p.validate();
  if (!(p.a > p.b)) { throw Domain_error{"gen_ld_pgf: closed form requires a > b"}; }
  if (!(z >= 0.0 && z < 1.0)) { throw Domain_error{"gen_ld_pgf: z must lie in [0,1), got " + std::to_string(z)}; }
  if (p.c == 0.0) { return 1.0; }
  auto ratio = p.b / p.a;
  auto shape = p.lambda / (p.a - p.b);
  auto x = (ratio - z) / (1.0 - z);
  return std::exp(p.c * (ratio - 1.0) * hyp2f1_special(shape, x));
}

auto hyp2f1_special(double p, double x, double tol, int64_t max_terms) -> double {
  if (!(p > 0.0) || !std::isfinite(p)) { throw Domain_error{"hyp2f1_special: p must be positive"}; }
  if (!(x < 1.0)) { throw Domain_error{"hyp2f1_special: x must be < 1"}; }
  if (x == 0.0) { return 1.0; }

  if (x >= -0.5) {
    // p * sum_k x^k/(p+k). Term ratio is bounded by |x|, so the remainder
    // after term k is at most |term_k| / (1 - |x|).
    auto sum = 0.0;
    auto power = 1.0;
    auto tail_factor = 1.0 / (1.0 - std::abs(x));
    for (auto k = int64_t{0}; k < max_terms; ++k) {
      auto term = p * power / (p + static_cast<double>(k));
      sum += term;
      if (std::abs(term) * tail_factor < tol) { return sum; }
      power *= x;
    }
    throw Convergence_error{"hyp2f1_special: series did not converge for x=" + std::to_string(x)};
  }

  // Pfaff: F[1,p;1+p;x] = (1-x)^{-1} F[1,1;1+p;w], w = x/(x-1) in (1/3,1).
  auto w = x / (x - 1.0);
  auto prefactor = 1.0 / (1.0 - x);
  auto tail_factor = prefactor / (1.0 - w);
  auto sum = 0.0;
  auto term = 1.0;
  for (auto k = int64_t{0}; k < max_terms; ++k) {
    sum += term;
    term *= (static_cast<double>(k) + 1.0) / (1.0 + p + static_cast<double>(k)) * w;
    if (term * tail_factor < tol) { return prefactor * (sum + term); }
  }
  throw Convergence_error{"hyp2f1_special: transformed series did not converge for x=" + std::to_string(x)};
}

}  // namespace ldsim
