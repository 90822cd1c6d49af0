// Copyright 2026 The agesim Authors.
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

#ifndef AGESIM_RNG_H_
#define AGESIM_RNG_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace agesim {

// A named, seedable random stream. Each stream owns its engine, so draws on
// one stream (fault sampling, say) never shift another (gauge noise).
// mt19937_64 output is fully specified by the standard and doubles are built
// from the top 53 bits directly, so sequences are identical across platforms.
class RandomStream {
 public:
  RandomStream(uint64_t seed, std::string_view name);

  // Uniform in [0, 1).
  double Uniform();
  // Uniform in [lo, hi).
  double Uniform(double lo, double hi);

  uint64_t draws() const { return draws_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::mt19937_64 engine_;
  uint64_t draws_ = 0;
};

// Stable 64-bit FNV-1a hash, used to derive per-stream seeds.
uint64_t StableHash(std::string_view text);

}  // namespace agesim

#endif  // AGESIM_RNG_H_
