#ifndef ECZ_RNG_HPP
#define ECZ_RNG_HPP

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

namespace ecz {

// xoshiro256++ seeded through splitmix64. Self-contained so that streams are
// bit-identical across compilers and standard libraries; every random choice
// in the project flows through this generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_(seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  // Independent stream derived from (root seed, id). Substreams of the same
  // Rng with distinct ids never share state, which is what makes parallel
  // per-restart / per-zone generation reproducible for any thread count.
  Rng substream(std::uint64_t id) const {
    std::uint64_t s = root_ ^ (0x9e3779b97f4a7c15ULL * (id + 0x632be59bd9b4e019ULL));
    return Rng(splitmix_once(s));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // k distinct indices from [0, n), Floyd's sampling; result order is
  // deterministic but not sorted.
  std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t k) {
    std::vector<std::uint64_t> out;
    out.reserve(k);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(k * 2);
    for (std::uint64_t j = n - k; j < n; ++j) {
      const std::uint64_t t = below(j + 1);
      const std::uint64_t pick = seen.count(t) ? j : t;
      seen.insert(pick);
      out.push_back(pick);
    }
    return out;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t splitmix_once(std::uint64_t s) { return splitmix64(s); }

  std::uint64_t root_;
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ecz

#endif
