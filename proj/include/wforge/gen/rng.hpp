#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace wforge::gen {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded generator with independent named streams: stream k of seed s is
// seeded from splitmix64(s ^ splitmix64(k)), so streams never share state.
// Draws use plain modulo so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id) { return Rng(splitmix64(seed ^ splitmix64(id))); }

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, n); n > 0.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

  // True with probability num/den.
  bool chance(std::size_t num, std::size_t den) { return below(den) < num; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 eng_;
};

// Stream ids.
inline constexpr std::uint64_t kPlanStream = 0;
inline std::uint64_t sequence_stream(std::size_t s) { return 1000 + s; }
inline std::uint64_t csv_stream(std::size_t file) { return 1'000'000 + file; }

}  // namespace wforge::gen
