#include "ldsim/analytics.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ldsim/errors.h"
#include "ldsim/format.h"

namespace ldsim {

auto Empirical_sfs::count(int64_t k) const -> int64_t {
  auto it = counts.find(k);
  return it == counts.end() ? 0 : it->second;
}

auto Empirical_sfs::normalized(int64_t k) const -> double {
  return sites == 0 ? 0.0 : static_cast<double>(count(k)) / static_cast<double>(sites);
}

auto Empirical_sfs::tail(double a) const -> int64_t {
  auto threshold = a * static_cast<double>(n);
  auto total = int64_t{0};
  for (auto it = counts.rbegin(); it != counts.rend() && static_cast<double>(it->first) > threshold; ++it) {
    total += it->second;
  }
  return total;
}

auto empirical_sfs(std::span<const int64_t> b, int64_t n) -> Empirical_sfs {
  auto sfs = Empirical_sfs{.counts = {}, .n = n, .sites = std::ssize(b)};
  for (auto k : b) { ++sfs.counts[k]; }
  return sfs;
}

auto empirical_sfs(const Sim_outcome& outcome) -> Empirical_sfs { return empirical_sfs(outcome.b, outcome.n); }

auto sfs_tail_curve(const Sim_outcome& outcome, std::span<const double> grid) -> std::vector<int64_t> {
  auto sfs = empirical_sfs(outcome);
  auto out = std::vector<int64_t>{};
  out.reserve(grid.size());
  for (auto a : grid) {
    if (!(a > 0.0 && a < 1.0)) { throw Domain_error{"tail grid values must lie strictly inside (0,1)"}; }
    out.push_back(sfs.tail(a));
  }
  return out;
}

auto log_grid(double lo, double hi, int points) -> std::vector<double> {
  if (!(lo > 0.0 && lo < hi) || points < 1) { throw Domain_error{"log_grid needs 0 < lo < hi and points >= 1"}; }
  auto grid = std::vector<double>{};
  if (points == 1) { return {lo}; }
  auto step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (auto k = 0; k != points; ++k) { grid.push_back(lo * std::exp(step * static_cast<double>(k))); }
  grid.back() = hi;
  return grid;
}

auto ks_distance(std::span<const int64_t> sample, std::span<const double> pmf) -> double {
  if (sample.empty()) { throw Domain_error{"ks_distance: empty sample"}; }
  auto sorted = std::vector<int64_t>(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0) { throw Domain_error{"ks_distance: counts must be nonnegative"}; }
  auto size = static_cast<double>(sorted.size());
  auto last = std::max<int64_t>(sorted.back(), std::ssize(pmf) - 1);
  auto model = 0.0;
  auto pos = size_t{0};
  auto worst = 0.0;
  for (auto k = int64_t{0}; k <= last; ++k) {
    if (k < std::ssize(pmf)) { model += pmf[k]; }
    while (pos < sorted.size() && sorted[pos] <= k) { ++pos; }
    worst = std::max(worst, std::abs(static_cast<double>(pos) / size - model));
  }
  // Beyond `last` the empirical CDF is 1 and the model CDF stays at its sum.
  worst = std::max(worst, std::abs(1.0 - model));
  return worst;
}

auto ks_distance_two_sample(std::span<const int64_t> first, std::span<const int64_t> second) -> double {
  if (first.empty() || second.empty()) { throw Domain_error{"ks_distance_two_sample: empty sample"}; }
  auto a = std::vector<int64_t>(first.begin(), first.end());
  auto b = std::vector<int64_t>(second.begin(), second.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto na = static_cast<double>(a.size());
  auto nb = static_cast<double>(b.size());
  auto i = size_t{0};
  auto j = size_t{0};
  auto worst = 0.0;
  while (i < a.size() || j < b.size()) {
    // Step both CDFs past the next distinct value.
    auto v = j == b.size() || (i < a.size() && a[i] <= b[j]) ? a[i] : b[j];
    while (i < a.size() && a[i] == v) { ++i; }
    while (j < b.size() && b[j] == v) { ++j; }
    worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

auto Mixture_target::validate() const -> void {
  if (components.empty()) { throw Domain_error{"mixture needs at least one component"}; }
  auto total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0)) { throw Domain_error{"mixture weights must be nonnegative"}; }
    c.law.validate();
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) { throw Domain_error{"mixture weights must sum to 1"}; }
}

auto mixture_pmf(const Mixture_target& target, int64_t m_max, int64_t mc_draws, Rng& rng) -> Mixture_pmf {
  target.validate();
  if (m_max < 0) { throw Domain_error{"mixture_pmf: m_max must be nonnegative"}; }
  if (mc_draws < 1) { throw Domain_error{"mixture_pmf: mc_draws must be positive"}; }
  auto size = static_cast<size_t>(m_max) + 1;
  auto out = Mixture_pmf{.mass = std::vector<double>(size, 0.0), .se = std::vector<double>(size, 0.0), .exact = true};
  auto variance = std::vector<double>(size, 0.0);
  for (const auto& component : target.components) {
    if (component.weight == 0.0) { continue; }
    const auto& law = component.law;
    if (law.b == 0.0 && law.a == law.lambda) {
      auto pmf = ld_pmf(Ld_params{law.c}, m_max);
      for (auto k = size_t{0}; k != size; ++k) { out.mass[k] += component.weight * pmf[k]; }
      continue;
    }
    out.exact = false;
    auto hits = std::vector<int64_t>(size, 0);
    for (auto d = int64_t{0}; d != mc_draws; ++d) {
      auto x = sample_gen_ld(law, rng);
      if (x <= m_max) { ++hits[static_cast<size_t>(x)]; }
    }
    auto draws = static_cast<double>(mc_draws);
    for (auto k = size_t{0}; k != size; ++k) {
      auto p = static_cast<double>(hits[k]) / draws;
      out.mass[k] += component.weight * p;
      variance[k] += component.weight * component.weight * p * (1.0 - p) / draws;
    }
  }
  for (auto k = size_t{0}; k != size; ++k) { out.se[k] = std::sqrt(variance[k]); }
  return out;
}

auto write_sfs_csv(const Empirical_sfs& sfs, std::ostream& out) -> void {
  out << "k,count\n";
  for (const auto& [k, count] : sfs.counts) { out << k << ',' << count << '\n'; }
}

auto write_tail_csv(std::span<const double> grid, std::span<const double> counts, std::span<const double> theory,
                    std::ostream& out) -> void {
  if (counts.size() != grid.size() || theory.size() != grid.size()) {
    throw Domain_error{"tail columns must have equal length"};
  }
  out << "a,count,theory_mean\n";
  for (auto k = size_t{0}; k != grid.size(); ++k) {
    out << format_double(grid[k]) << ',' << format_double(counts[k]) << ',' << format_double(theory[k]) << '\n';
  }
}

}  // namespace ldsim
