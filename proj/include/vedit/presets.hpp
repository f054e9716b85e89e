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

#include <stdexcept>
#include <string>

namespace vedit {

constexpr int kPositions = 16;  // 15 display slots + 1 speech slot

// Network dimensions. "paper" is the full-size configuration; "desk" keeps
// every shape relationship but runs in minutes on one core.
struct NetDims {
  int d_e = 0;     // token embedding width
  int d_chi = 0;   // previous-state/action feature width
  int d_a = 0;     // action embedding width for the bilinear map
  int hidden = 0;  // recurrent hidden size per direction
  int conv_k = 3;  // kernel width for all conv stacks
  int trunk_f1 = 0, trunk_f2 = 0, trunk_f3 = 0;
  int enc_f1 = 0, enc_f2 = 0, enc_f3 = 0;
  int dec_f1 = 0, dec_f2 = 0, dec_f3 = 0;

  int d_s() const { return 2 * hidden; }
  int d_omega() const { return d_e + d_chi; }

  static NetDims paper() {
    NetDims d;
    d.d_e = 300;
    d.d_chi = 100;
    d.d_a = 100;
    d.hidden = 100;
    d.trunk_f1 = 50; d.trunk_f2 = 50; d.trunk_f3 = 100;
    d.enc_f1 = 50; d.enc_f2 = 50; d.enc_f3 = 100;
    d.dec_f1 = 100; d.dec_f2 = 50; d.dec_f3 = 100;
    return d;
  }

  static NetDims desk() {
    NetDims d;
    d.d_e = 24;
    d.d_chi = 8;
    d.d_a = 8;
    d.hidden = 16;
    d.trunk_f1 = 16; d.trunk_f2 = 16; d.trunk_f3 = 32;
    d.enc_f1 = 16; d.enc_f2 = 16; d.enc_f3 = 32;
    d.dec_f1 = 32; d.dec_f2 = 16; d.dec_f3 = 32;
    return d;
  }

  static NetDims from_name(const std::string& name) {
    if (name == "paper") return paper();
    if (name == "desk") return desk();
    throw std::invalid_argument("unknown preset: " + name);
  }
};

}  // namespace vedit
