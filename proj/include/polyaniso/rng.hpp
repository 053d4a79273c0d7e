// Copyright (c) 2026 the polyaniso developers
// SPDX-License-Identifier: BSD-3-Clause

#pragma once

#include <cstdint>

namespace polyaniso {

// SplitMix64. Self-contained so that streams are bit-reproducible across
// platforms and standard library versions.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  // independent substream derived from this seed and a salt
  Rng fork(std::uint64_t salt) const {
    Rng r(state ^ (0x6a09e667f3bcc909ULL + salt * 0x9e3779b97f4a7c15ULL));
    r.next_u64();
    return r;
  }
};

}  // namespace polyaniso
