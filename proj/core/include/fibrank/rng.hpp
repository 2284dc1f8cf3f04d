#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fibrank {

/// Deterministic random source. std::mt19937_64 output is pinned by the
/// standard, and all derived draws below are implemented by hand, so a
/// given seed yields the same stream on every platform and toolchain.
/// (std::uniform_int_distribution and std::shuffle carry no such promise.)
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, bound) via rejection sampling; bound must be > 0.
  std::uint64_t uniform_u64(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

  std::size_t uniform_index(std::size_t bound) {
    return static_cast<std::size_t>(uniform_u64(bound));
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::int64_t uniform_i64(std::int64_t lo, std::int64_t hi_exclusive) {
    return lo + static_cast<std::int64_t>(
                    uniform_u64(static_cast<std::uint64_t>(hi_exclusive - lo)));
  }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

  /// Truncated Pareto draw on [lo, hi], density ~ x^(-alpha); alpha > 1.
  double pareto(double alpha, double lo, double hi) {
    const double a = alpha - 1.0;
    const double r = 1.0 - std::pow(lo / hi, a);
    const double u = uniform01();
    return lo * std::pow(1.0 - u * r, -1.0 / a);
  }

  /// Integer truncated power-law draw on [lo, hi].
  std::uint64_t pareto_int(double alpha, std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) return lo;
    const double x = pareto(alpha, static_cast<double>(lo), static_cast<double>(hi) + 1.0);
    auto v = static_cast<std::uint64_t>(x);
    if (v < lo) v = lo;
    if (v > hi) v = hi;
    return v;
  }

private:
  std::mt19937_64 engine_;
};

} // namespace fibrank
