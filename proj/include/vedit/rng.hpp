// Copyright 2026 The vedit Authors
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

#include <array>
#include <cstdint>
#include <string>

namespace vedit {

// Self-contained generators so that streams are reproducible across
// standard libraries and platforms. std::shuffle / std::*_distribution are
// implementation-defined and must not be used anywhere in the project.

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

// xoshiro256** by Blackman & Vigna (public domain reference algorithm).
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  uint64_t next() {
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

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform in [0, bound) via rejection. bound >= 1.
  uint64_t below(uint64_t bound) {
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform integer in [lo, hi], inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  std::array<uint64_t, 4> state() const { return s_; }
  void set_state(const std::array<uint64_t, 4>& s) { s_ = s; }

  std::string state_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (uint64_t w : s_)
      for (int shift = 60; shift >= 0; shift -= 4)
        out.push_back(digits[(w >> shift) & 0xf]);
    return out;
  }

  static Rng from_state_hex(const std::string& hex) {
    Rng r;
    for (int i = 0; i < 4; ++i) {
      uint64_t w = 0;
      for (int j = 0; j < 16; ++j) {
        const char c = hex.at(static_cast<std::size_t>(i * 16 + j));
        const uint64_t digit =
            c >= 'a' ? static_cast<uint64_t>(c - 'a' + 10)
                     : static_cast<uint64_t>(c - '0');
        w = (w << 4) | digit;
      }
      r.s_[static_cast<std::size_t>(i)] = w;
    }
    return r;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> s_{};
};

// Named substreams derived from one master seed. Keeping the environment
// stream separate from the agent's streams is what makes MBAC/A2C runs with
// the same seed see identical episode sequences.
struct RngStreams {
  Rng env;
  Rng init;
  Rng action;

  static RngStreams from_seed(uint64_t master) {
    RngStreams s;
    s.env = Rng(SplitMix64(master ^ 0x656e76ULL).next());
    s.init = Rng(SplitMix64(master ^ 0x696e6974ULL).next());
    s.action = Rng(SplitMix64(master ^ 0x616374ULL).next());
    return s;
  }
};

}  // namespace vedit
