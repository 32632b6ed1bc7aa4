#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>

namespace dpnp {

// splitmix64 step; used both as a stand-alone generator and to derive
// decorrelated seeds for per-chain streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed for stream `stream` of a run keyed by `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ (stream + 0x9e3779b97f4a7c15ULL);
  std::uint64_t b = splitmix64(s);
  return b ^ (a << 1);
}

// FNV-1a over arbitrary bytes; stable across platforms and runs (std::hash
// gives no such guarantee).
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64_append(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  return fnv1a64(&bits, sizeof(bits), h);
}

inline std::uint64_t fnv1a64_append(std::uint64_t h, std::uint64_t v) {
  return fnv1a64(&v, sizeof(v), h);
}

namespace detail {

// Uniform in [0,1) from 64 random bits (53-bit mantissa).
inline double u01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Box-Muller pair from two 64-bit words.  Spelled out rather than using
// std::normal_distribution so that streams are identical across standard
// library implementations.
inline void box_muller(std::uint64_t w1, std::uint64_t w2, double& z0,
                       double& z1) {
  double u1 = 1.0 - u01(w1);  // (0, 1]
  double u2 = u01(w2);        // [0, 1)
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  z0 = r * std::cos(a);
  z1 = r * std::sin(a);
}

}  // namespace detail

// Deterministic random stream: mt19937_64 + explicit Box-Muller.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform in the open interval (0, 1); safe to take log of.
  double uniform() {
    double u;
    do {
      u = detail::u01(gen_());
    } while (u == 0.0);
    return u;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double z0, z1;
    detail::box_muller(gen_(), gen_(), z0, z1);
    spare_ = z1;
    have_spare_ = true;
    return z0;
  }

  Eigen::VectorXd normal_vector(Eigen::Index d) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Counter-based Gaussian vector: fully determined by `key`, no carried state.
// Used where per-query noise must be a pure function of the query.
inline Eigen::VectorXd gaussian_from_key(std::uint64_t key, Eigen::Index d) {
  Eigen::VectorXd v(d);
  std::uint64_t s = key;
  for (Eigen::Index i = 0; i < d; i += 2) {
    double z0, z1;
    std::uint64_t w1 = splitmix64(s);
    std::uint64_t w2 = splitmix64(s);
    detail::box_muller(w1, w2, z0, z1);
    v[i] = z0;
    if (i + 1 < d) v[i + 1] = z1;
  }
  return v;
}

}  // namespace dpnp
