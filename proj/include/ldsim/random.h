#ifndef LDSIM_RANDOM_H_
#define LDSIM_RANDOM_H_

#include <cstdint>
#include <random>

namespace ldsim {

// SplitMix64 finalizer. Used to derive independent replicate streams from a
// master seed so that results never depend on scheduling.
constexpr auto splitmix64(uint64_t x) -> uint64_t {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// A random stream. Not shareable between concurrent callers; derive one per
// replicate with `for_replicate`.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(uint64_t seed) : engine_{splitmix64(seed)} {}

  static auto for_replicate(uint64_t master_seed, uint64_t index) -> Rng {
    return Rng{splitmix64(master_seed) ^ splitmix64(~index * 0xd1b54a32d192ed03ULL)};
  }

  auto engine() -> engine_type& { return engine_; }

  // Uniform on [0,1).
  auto uniform() -> double { return std::generate_canonical<double, 53>(engine_); }

  // Uniform on (0,1].
  auto uniform_open_closed() -> double { return 1.0 - uniform(); }

  auto uniform_index(uint64_t size) -> uint64_t {
    return std::uniform_int_distribution<uint64_t>{0, size - 1}(engine_);
  }

  auto bernoulli(double p) -> bool { return uniform() < p; }

  auto poisson(double mean) -> int64_t {
    if (mean <= 0.0) { return 0; }
    return std::poisson_distribution<int64_t>{mean}(engine_);
  }

  auto exponential(double rate) -> double {
    return std::exponential_distribution<double>{rate}(engine_);
  }

  // Number of failures before the first success, success probability p.
  auto geometric_failures(double p) -> int64_t {
    if (p >= 1.0) { return 0; }
    return std::geometric_distribution<int64_t>{p}(engine_);
  }

  auto binomial(int64_t trials, double p) -> int64_t {
    if (trials <= 0 || p <= 0.0) { return 0; }
    if (p >= 1.0) { return trials; }
    return std::binomial_distribution<int64_t>{trials, p}(engine_);
  }

 private:
  engine_type engine_;
};

}  // namespace ldsim

#endif  // LDSIM_RANDOM_H_
