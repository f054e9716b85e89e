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

#include "vedit/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vedit {

namespace {

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("checkpoint: truncated u32");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

void write_f32s(std::ostream& out, const float* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    uint32_t bits;
    std::memcpy(&bits, &data[i], 4);
    write_u32(out, bits);
  }
}

void read_f32s(std::istream& in, float* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const uint32_t bits = read_u32(in);
    std::memcpy(&data[i], &bits, 4);
  }
}

}  // namespace

const std::string& Checkpoint::get(const std::string& key) const {
  auto it = header.find(key);
  if (it == header.end())
    throw std::runtime_error("checkpoint: missing header key " + key);
  return it->second;
}

const Tensor<float>* Checkpoint::find_array(const std::string& name) const {
  for (const auto& [n, t] : arrays)
    if (n == name) return &t;
  return nullptr;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << kMagic << "\n";
  for (const auto& [k, v] : header) out << k << "=" << v << "\n";
  out << "\n";
  for (const auto& [name, t] : arrays) {
    write_u32(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<uint32_t>(t.rank()));
    for (int d = 0; d < t.rank(); ++d)
      write_u32(out, static_cast<uint32_t>(t.dim(d)));
    write_f32s(out, t.data(), t.size());
  }
  if (!out) throw std::runtime_error("write failure on checkpoint: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  Checkpoint ck;
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw std::runtime_error("not a checkpoint file: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) break;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("checkpoint: malformed header line: " + line);
    ck.header[line.substr(0, eq)] = line.substr(eq + 1);
  }
  while (in.peek() != std::char_traits<char>::eof()) {
    const uint32_t name_len = read_u32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const uint32_t rank = read_u32(in);
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(read_u32(in));
    Tensor<float> t(shape);
    read_f32s(in, t.data(), t.size());
    ck.arrays.emplace_back(std::move(name), std::move(t));
  }
  return ck;
}

void store_to_checkpoint(const nn::ParameterStore<float>& store,
                         const std::string& component, Checkpoint& ck) {
  for (const auto& e : store.entries()) {
    ck.add_array(e.name, e.value);
    ck.add_array(e.name + ".adam_m", e.m);
    ck.add_array(e.name + ".adam_v", e.v);
  }
  ck.set("adam_step." + component, std::to_string(store.adam_step_count()));
}

void store_from_checkpoint(nn::ParameterStore<float>& store,
                           const std::string& component,
                           const Checkpoint& ck) {
  for (auto& e : store.entries()) {
    const Tensor<float>* v = ck.find_array(e.name);
    const Tensor<float>* m = ck.find_array(e.name + ".adam_m");
    const Tensor<float>* adam_v = ck.find_array(e.name + ".adam_v");
    if (!v || !m || !adam_v)
      throw std::runtime_error("checkpoint: missing arrays for " + e.name);
    if (v->shape() != e.value.shape())
      throw std::runtime_error("checkpoint: shape mismatch for " + e.name +
                               ": file " + shape_str(v->shape()) +
                               " vs model " + shape_str(e.value.shape()));
    e.value = *v;
    e.m = *m;
    e.v = *adam_v;
  }
  store.set_adam_step_count(std::stoll(ck.get("adam_step." + component)));
}

Checkpoint detach_lite(Checkpoint ck, bool* warned) {
  if (warned) *warned = false;
  if (ck.is_lite()) {
    if (warned) *warned = true;
    return ck;
  }
  std::vector<std::pair<std::string, Tensor<float>>> kept;
  for (auto& [name, t] : ck.arrays)
    if (name.rfind("model.", 0) != 0) kept.emplace_back(name, std::move(t));
  ck.arrays = std::move(kept);
  ck.header.erase("adam_step.model");
  ck.set("lite", "1");
  return ck;
}

}  // namespace vedit
