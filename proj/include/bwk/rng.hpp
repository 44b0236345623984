#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwk {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

/// Counter-based substream derivation: the same (master, a, b, c) tuple always
/// yields the same seed, independent of evaluation order across episodes.
inline uint64_t stream_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  return hash_combine(hash_combine(hash_combine(master, a), b), c);
}

inline uint64_t hash_string(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) h = splitmix64(h ^ ch);
  return h;
}

/// Uniform in [0,1) from the top 53 bits; bit-identical across platforms.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

inline int uniform_index(std::mt19937_64& g, int n) {
  int i = static_cast<int>(uniform01(g) * n);
  return i >= n ? n - 1 : i;
}

/// Samples an index proportionally to non-negative weights.
inline int sample_categorical(const std::vector<double>& w, std::mt19937_64& g) {
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) throw std::invalid_argument("sample_categorical: weights sum to zero");
  double u = uniform01(g) * total;
  for (size_t i = 0; i < w.size(); ++i) {
    u -= w[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

}  // namespace bwk
