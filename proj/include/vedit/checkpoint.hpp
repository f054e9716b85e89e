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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vedit/params.hpp"
#include "vedit/tensor.hpp"

namespace vedit {

// On-disk format: a text header of key=value lines terminated by a blank
// line, then binary records [u32 name length][name][u32 rank][u32 dims...]
// [f32 little-endian data]. Saving the same checkpoint twice produces
// byte-identical files.
struct Checkpoint {
  static constexpr const char* kMagic = "vedit-checkpoint v1";

  std::map<std::string, std::string> header;
  std::vector<std::pair<std::string, Tensor<float>>> arrays;

  bool has(const std::string& key) const { return header.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const {
    auto it = header.find(key);
    return it == header.end() ? fallback : it->second;
  }
  void set(const std::string& key, const std::string& value) {
    header[key] = value;
  }

  const Tensor<float>* find_array(const std::string& name) const;
  void add_array(const std::string& name, Tensor<float> t) {
    arrays.emplace_back(name, std::move(t));
  }

  bool is_lite() const { return has("lite") && get("lite") == "1"; }

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

// Store <-> checkpoint, including Adam moments ("<name>.adam_m/.adam_v" and
// header key "adam_step.<component>"). Parameter entry names already carry
// the component prefix.
void store_to_checkpoint(const nn::ParameterStore<float>& store,
                         const std::string& component, Checkpoint& ck);
void store_from_checkpoint(nn::ParameterStore<float>& store,
                           const std::string& component, const Checkpoint& ck);

// Removes the model parameters and their optimizer state; the state-updater
// and actor-critic pass through untouched. Already-lite input is returned
// unchanged with *warned set.
Checkpoint detach_lite(Checkpoint ck, bool* warned = nullptr);

}  // namespace vedit
