// Copyright 2026 The taskclust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TASKCLUST_RANDOM_HPP_
#define TASKCLUST_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace taskclust {

using Rng = std::mt19937_64;

// SplitMix64 finaliser; used to derive independent stream seeds.
inline std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = Mix64(base);
  for (std::uint64_t p : path) s = Mix64(s ^ Mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Counter-based standard normal: a pure function of (seed, counter).
inline double HashNormal(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t a = Mix64(seed ^ Mix64(2 * counter));
  const std::uint64_t b = Mix64(seed ^ Mix64(2 * counter + 1));
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace taskclust

#endif  // TASKCLUST_RANDOM_HPP_
