#pragma once
// Counter-based random number generation.
//
// Every random draw in the toolkit is keyed by (seed, stream labels...) so
// that ensembles are reproducible and scheduling-independent: trajectory t,
// step n, pair k always sees the same uniform variate no matter how work is
// distributed across workers.

#include <cstdint>
#include <cmath>
#include <numbers>

namespace qmor::rng {

// SplitMix64 finalizer; good avalanche, cheap, stateless.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                         std::uint64_t d = 0) {
  std::uint64_t h = mix(a);
  h = mix(h ^ (b + 0x9e3779b97f4a7c15ull));
  h = mix(h ^ (c + 0xc2b2ae3d27d4eb4full));
  h = mix(h ^ (d + 0x165667b19e3779f9ull));
  return h;
}

// Uniform double in [0, 1) from a 64-bit word (53-bit mantissa).
inline double to_unit(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

inline double uniform(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                      std::uint64_t d = 0) {
  return to_unit(key(a, b, c, d));
}

// Small sequential stream for bulk draws (state initialization, Gaussian
// matrices, ...). Deterministic given the construction key.
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t label1 = 0, std::uint64_t label2 = 0)
      : state_(key(seed, label1, label2)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }
  double uniform() { return to_unit(next_u64()); }  // [0, 1)

  // Standard normal via Box-Muller (draws two uniforms per call pair).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniformly distributed point on the unit 2-sphere.
  void unit_vector3(double out[3]) {
    double z = 2.0 * uniform() - 1.0;
    double phi = 2.0 * std::numbers::pi * uniform();
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    out[0] = s * std::cos(phi);
    out[1] = s * std::sin(phi);
    out[2] = z;
  }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qmor::rng
