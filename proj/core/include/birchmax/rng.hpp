#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace birchmax {

// splitmix64: tiny deterministic generator used everywhere a seed appears.
// Deliberately not std::mt19937 so that streams are identical across
// platforms and standard library versions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, bound)
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

  // uniform integer in [lo, hi] inclusive
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t state_;
};

// Hash an arbitrary integer key stream into one u64 (for seeded value tables).
inline std::uint64_t mix_key(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

// Deterministic low-discrepancy points on the torus [-1/2, 1/2)^n:
// a Kronecker sequence with irrational strides, offset drawn from the seed.
class TorusSequence {
 public:
  TorusSequence(int dim, std::uint64_t seed) : dim_(dim), offset_(dim), stride_(dim) {
    static const double kRoots[] = {2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0,
                                    23.0, 29.0, 31.0, 37.0, 41.0, 43.0, 47.0, 53.0};
    SplitMix64 rng(seed);
    for (int i = 0; i < dim; ++i) {
      double r = std::sqrt(kRoots[i % 16]);
      stride_[i] = r - std::floor(r);
      offset_[i] = rng.next_double();
    }
  }

  // k-th point, componentwise in [-1/2, 1/2)
  std::vector<double> point(std::uint64_t k) const {
    std::vector<double> xi(dim_);
    for (int i = 0; i < dim_; ++i) {
      double u = offset_[i] + static_cast<double>(k) * stride_[i];
      u -= std::floor(u);            // [0,1)
      if (u >= 0.5) u -= 1.0;        // [-1/2, 1/2)
      xi[i] = u;
    }
    return xi;
  }

 private:
  int dim_;
  std::vector<double> offset_;
  std::vector<double> stride_;
};

}  // namespace birchmax
