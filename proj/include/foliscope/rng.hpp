#pragma once

#include <cstdint>
#include <cmath>
#include <complex>
#include <vector>

// Self-contained RNG so that seeded runs are reproducible across
// compilers and standard libraries (std distributions are not portable).

namespace fol {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256** seeded via splitmix64.  Streams keyed by (seed, stream)
// give independent deterministic generators for sharded Monte Carlo.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) {
    uint64_t sm = seed ^ (0x6c62272e07bb0142ull * (stream + 1));
    for (auto& w : s_) w = splitmix64(sm);
    has_spare_ = false;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal, Box-Muller (cached pair)
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // complex gaussian with E|z|^2 = var
  std::complex<double> complex_gaussian(double var) {
    double s = std::sqrt(var / 2.0);
    return {s * gaussian(), s * gaussian()};
  }

  // uniform on the unit disc
  std::complex<double> unit_disc() {
    double r = std::sqrt(uniform());
    double a = 6.283185307179586476925286766559 * uniform();
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_;
};

// First two dimensions of the Sobol sequence (enough for the annulus
// parameter synthesis).  Dimension 0 is van der Corput base 2; dimension 1
// uses the classical direction numbers for the polynomial x^2+x+1.
class Sobol2 {
 public:
  Sobol2() {
    for (int k = 0; k < 63; ++k) v0_[k] = 1ull << (62 - k);
    // m = 1, 3 then recurrence m_k = m_{k-1} ^ 2*m_{k-1} ^ 4*m_{k-2}... for s=2,a=1
    std::vector<uint64_t> m = {1, 3};
    for (int k = 2; k < 63; ++k) {
      uint64_t mk = m[k - 1] ^ (4 * m[k - 2]) ^ m[k - 2];
      m.push_back(mk);
    }
    for (int k = 0; k < 63; ++k) v1_[k] = m[k] << (62 - k);
  }

  // i-th point (Gray-code order), each coordinate in [0,1)
  std::pair<double, double> point(uint64_t i) {
    uint64_t x0 = 0, x1 = 0, g = i ^ (i >> 1);
    for (int k = 0; k < 63 && g; ++k, g >>= 1)
      if (g & 1) {
        x0 ^= v0_[k];
        x1 ^= v1_[k];
      }
    return {double(x0) * 0x1.0p-63, double(x1) * 0x1.0p-63};
  }

 private:
  uint64_t v0_[63], v1_[63];
};

}  // namespace fol
