#include "ldsim/limits.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>

#include "ldsim/errors.h"

namespace ldsim {

auto sample_yule_fractions(double prune_eps, Rng& rng, int full_depth) -> Yule_fractions {
  if (!(prune_eps > 0.0 && prune_eps < 1.0)) { throw Domain_error{"prune_eps must lie in (0,1)"}; }
  if (full_depth < 0) { throw Domain_error{"full_depth must be nonnegative"}; }
  auto out = Yule_fractions{.entries = {}, .prune_eps = prune_eps, .full_depth = full_depth};

  // Depth-first: pop a retained node, split it, push the daughters that
  // survive pruning (second daughter first so the first is visited first).
  struct Pending {
    std::string address;
    double value;
  };
  auto stack = std::vector<Pending>{{"", 1.0}};
  while (!stack.empty()) {
    auto node = std::move(stack.back());
    stack.pop_back();
    auto u = rng.uniform();
    auto children = std::array<Pending, 2>{Pending{node.address + '0', node.value * u},
                                          Pending{node.address + '1', node.value * (1.0 - u)}};
    auto child_depth = static_cast<int>(node.address.size()) + 1;
    for (auto& child : children) {
      if (child.value >= prune_eps || child_depth <= full_depth) {
        out.entries.push_back(Yule_node{child.address, child.value});
      }
    }
    for (auto k = 1; k >= 0; --k) {
      auto& child = children[k];
      if (child.value >= prune_eps || child_depth < full_depth) { stack.push_back(std::move(child)); }
    }
  }
  return out;
}

auto Point_measure::mass(double lo, double hi) const -> int64_t {
  auto total = int64_t{0};
  for (const auto& a : atoms) {
    if (a.location > lo && a.location < hi) { total += a.multiplicity; }
  }
  return total;
}

auto Point_measure::mass_above(double lo) const -> int64_t {
  auto total = int64_t{0};
  for (const auto& a : atoms) {
    if (a.location > lo) { total += a.multiplicity; }
  }
  return total;
}

auto Point_measure::total_mass() const -> int64_t {
  auto total = int64_t{0};
  for (const auto& a : atoms) { total += a.multiplicity; }
  return total;
}

auto sample_cox_sfs(double eta, double prune_eps, Rng& rng) -> Point_measure {
  if (!(eta >= 0.0) || !std::isfinite(eta)) { throw Domain_error{"eta must be finite and nonnegative"}; }
  auto measure = Point_measure{};
  if (eta == 0.0) { return measure; }
  auto fractions = sample_yule_fractions(prune_eps, rng);
  for (const auto& node : fractions.entries) {
    auto m = rng.poisson(eta);
    if (m > 0) { measure.atoms.push_back(Atom{node.value, m}); }
  }
  return measure;
}

auto sample_conjecture_sfs_detailed(double alpha, double beta, double eta, int64_t skeleton_n, Rng& rng)
    -> Conjecture_draw {
  if (!(alpha > beta) || beta < 0.0 || !std::isfinite(alpha)) {
    throw Domain_error{"conjecture sampler requires alpha > beta >= 0"};
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) { throw Domain_error{"eta must be finite and nonnegative"}; }
  if (skeleton_n < 1) { throw Domain_error{"skeleton_n must be positive"}; }

  auto draw = Conjecture_draw{};
  draw.skeleton_n = skeleton_n;
  auto& nodes = draw.skeleton;
  auto immortal_rate = alpha - beta;

  // Skeleton in continuous time: each immortal cell carries its own Exp(alpha
  // - beta) lifetime; the earliest scheduled division fires next.
  struct Scheduled {
    double time;
    int64_t node;
    auto operator>(const Scheduled& o) const -> bool { return time > o.time || (time == o.time && node > o.node); }
  };
  auto queue = std::priority_queue<Scheduled, std::vector<Scheduled>, std::greater<>>{};
  auto spawn = [&](int64_t parent, double born) {
    auto& node = nodes.emplace_back();
    node.parent = parent;
    node.depth = parent < 0 ? 0 : nodes[parent].depth + 1;
    node.lifetime = rng.exponential(immortal_rate);
    queue.push(Scheduled{born + node.lifetime, std::ssize(nodes) - 1});
  };
  spawn(-1, 0.0);
  auto living = int64_t{1};
  while (living < skeleton_n) {
    auto next = queue.top();
    queue.pop();
    nodes[next.node].completed = true;
    spawn(next.node, next.time);
    spawn(next.node, next.time);
    ++living;
  }

  auto immortal = std::vector<int64_t>(nodes.size(), 0);
  for (auto id = std::ssize(nodes) - 1; id >= 0; --id) {
    if (!nodes[id].completed) { immortal[id] = 1; }
    if (nodes[id].parent >= 0) { immortal[nodes[id].parent] += immortal[id]; }
  }

  for (auto id = int64_t{0}; id != std::ssize(nodes); ++id) {
    auto& node = nodes[id];
    node.fraction = static_cast<double>(immortal[id]) / static_cast<double>(living);
    if (!node.completed) { continue; }
    auto seeded = rng.poisson(2.0 * beta * node.lifetime);
    node.divisions_witnessed = (id == 0 ? 0 : 1) + seeded;
    if (eta == 0.0 || node.divisions_witnessed == 0) { continue; }
    auto m = rng.poisson(eta * static_cast<double>(node.divisions_witnessed));
    if (m > 0) { draw.measure.atoms.push_back(Atom{node.fraction, m}); }
  }
  return draw;
}

auto sample_conjecture_sfs(double alpha, double beta, double eta, int64_t skeleton_n, Rng& rng) -> Point_measure {
  return sample_conjecture_sfs_detailed(alpha, beta, eta, skeleton_n, rng).measure;
}

auto mean_sfs_tail(double eta, double a) -> double {
  if (!(a > 0.0 && a < 1.0)) { throw Domain_error{"a must lie in (0,1)"}; }
  return 2.0 * eta * (1.0 / a - 1.0);
}

auto tail_prob_asymptote(double a) -> double {
  if (!(a > 0.0 && a < 1.0)) { throw Domain_error{"a must lie in (0,1)"}; }
  return 2.0 * (1.0 / a - 1.0);
}

auto isa_violation_prob(int64_t n, double mu) -> double {
  if (n < 2) { throw Domain_error{"isa_violation_prob requires n >= 2"}; }
  if (!(mu >= 0.0 && mu <= 1.0)) { throw Domain_error{"mu must lie in [0,1]"}; }
  if (mu == 0.0) { return 0.0; }
  auto trials = 2.0 * static_cast<double>(n) - 2.0;
  if (mu == 1.0) { return 1.0; }
  // 1 - (1-mu)^m - m mu (1-mu)^{m-1}, with both powers taken in log space.
  auto log_keep = std::log1p(-mu);
  auto none = -std::expm1(trials * log_keep);  // 1 - (1-mu)^m
  auto one = trials * mu * std::exp((trials - 1.0) * log_keep);
  return std::max(0.0, none - one);
}

auto expected_isa_violations(int64_t n, double mu, int64_t sites) -> double {
  if (sites < 1) { throw Domain_error{"sites must be positive"}; }
  return static_cast<double>(sites) * isa_violation_prob(n, mu);
}

}  // namespace ldsim
