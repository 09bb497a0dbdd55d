// Copyright 2026 The skat-inference Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace skat {

class RuleError : public std::invalid_argument {
 public:
  explicit RuleError(const std::string& what) : std::invalid_argument(what) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

namespace internal {

template <typename... Args>
std::string concat(Args&&... args) {
  std::ostringstream oss;
  (oss << ... << std::forward<Args>(args));
  return oss.str();
}

}  // namespace internal

// Internal invariant check. RuleError is reserved for illegal inputs; a
// failed SKAT_CHECK means the library itself is in a bad state.
#define SKAT_CHECK(cond, ...)                                            \
  do {                                                                   \
    if (!(cond)) {                                                       \
      throw std::logic_error(::skat::internal::concat(                   \
          "invariant violated at ", __FILE__, ":", __LINE__, ": ", #cond, \
          " ", ##__VA_ARGS__));                                          \
    }                                                                    \
  } while (false)

#define SKAT_RULE(cond, ...)                                         \
  do {                                                               \
    if (!(cond)) {                                                   \
      throw ::skat::RuleError(::skat::internal::concat(__VA_ARGS__)); \
    }                                                                \
  } while (false)

// Splittable seed derivation: hash a master seed with stream identifiers so
// parallel consumers get independent, reproducible streams.
inline uint64_t mix_seed(uint64_t seed) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <typename... Rest>
uint64_t mix_seed(uint64_t seed, uint64_t next, Rest... rest) {
  return mix_seed(mix_seed(seed) ^ (next + 0x9e3779b97f4a7c15ULL), rest...);
}

// FNV-1a over bytes; used for config digests embedded in output files.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

}  // namespace skat
