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

#include "vedit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vedit {

namespace {

bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z');
}

// Fisher-Yates with our own rng; std::shuffle is implementation-defined.
template <typename V>
void shuffle(V& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(v[i - 1], v[j]);
  }
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

TokenList tokenize(const std::string& line) {
  TokenList out;
  std::size_t i = 0;
  while (i < line.size() &&
         out.size() < static_cast<std::size_t>(kMaxSentenceTokens)) {
    while (i < line.size() &&
           std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) {
      std::size_t a = i, b = j;
      // Bytes >= 0x80 (multibyte UTF-8) are kept.
      while (a < b && static_cast<unsigned char>(line[a]) < 0x80 &&
             !is_ascii_alnum(static_cast<unsigned char>(line[a])))
        ++a;
      while (b > a && static_cast<unsigned char>(line[b - 1]) < 0x80 &&
             !is_ascii_alnum(static_cast<unsigned char>(line[b - 1])))
        --b;
      if (b > a) {
        std::string tok = line.substr(a, b - a);
        for (char& c : tok)
          c = static_cast<char>(
              std::tolower(static_cast<unsigned char>(c)));
        out.push_back(std::move(tok));
      }
    }
    i = j;
  }
  return out;
}

int SentenceStore::vocab_id(const std::string& token) const {
  auto it = vocab_index_.find(token);
  return it == vocab_index_.end() ? -1 : it->second;
}

const TokenList& SentenceStore::sample_sentence(Split s, Rng& rng) const {
  const auto& v = sentences(s);
  if (v.empty()) throw std::runtime_error("sample_sentence: empty split");
  return v[rng.below(v.size())];
}

const std::string& SentenceStore::sample_vocab_token(Rng& rng) const {
  return vocab_[rng.below(vocab_.size())];
}

SentenceStore load_corpus(const std::string& path, uint64_t seed,
                          std::size_t max_sentences) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read corpus file: " + path);
  std::vector<TokenList> usable;
  std::set<TokenList> seen;  // duplicates would leak across the split
  std::string line;
  while (std::getline(in, line)) {
    TokenList toks = tokenize(line);
    if (toks.size() >= 2 && seen.insert(toks).second) {
      usable.push_back(std::move(toks));
      if (max_sentences && usable.size() >= max_sentences) break;
    }
  }
  if (usable.empty())
    throw std::runtime_error("corpus has no usable sentences: " + path);

  Rng rng(SplitMix64(seed ^ 0x636f7270ULL).next());
  shuffle(usable, rng);

  SentenceStore store;
  const std::size_t n_test = usable.size() / 2;  // odd leftover to train
  const std::size_t n_train = usable.size() - n_test;
  store.train_.assign(usable.begin(),
                      usable.begin() + static_cast<std::ptrdiff_t>(n_train));
  store.test_.assign(usable.begin() + static_cast<std::ptrdiff_t>(n_train),
                     usable.end());

  for (const auto& sent : usable)
    for (const auto& tok : sent)
      if (store.vocab_index_.emplace(tok, 0).second)
        store.vocab_.push_back(tok);
  std::sort(store.vocab_.begin(), store.vocab_.end());
  for (std::size_t i = 0; i < store.vocab_.size(); ++i)
    store.vocab_index_[store.vocab_[i]] = static_cast<int>(i);
  return store;
}

EmbeddingTable EmbeddingTable::deterministic(int dim) {
  EmbeddingTable t;
  t.mode_ = EmbeddingMode::deterministic_hash;
  t.dim_ = dim;
  return t;
}

EmbeddingTable EmbeddingTable::from_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read embedding file: " + path);
  EmbeddingTable t;
  t.mode_ = EmbeddingMode::loaded_file;
  t.dim_ = dim;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<float> vec(static_cast<std::size_t>(dim));
    double norm_sq = 0.0;
    for (int i = 0; i < dim; ++i) {
      double v;
      if (!(ss >> v))
        throw std::runtime_error("embedding file " + path + " line " +
                                 std::to_string(lineno) + ": expected " +
                                 std::to_string(dim) + " values");
      if (!std::isfinite(v))
        throw std::runtime_error("embedding file " + path + " line " +
                                 std::to_string(lineno) + ": non-finite value");
      vec[static_cast<std::size_t>(i)] = static_cast<float>(v);
      norm_sq += v * v;
    }
    if (norm_sq <= 0.0)
      throw std::runtime_error("embedding file " + path + " line " +
                               std::to_string(lineno) + ": zero vector");
    t.file_vectors_[token] = std::move(vec);
  }
  return t;
}

std::vector<float> EmbeddingTable::hash_embed(const std::string& token) const {
  SplitMix64 gen(fnv1a(token));
  std::vector<float> v(static_cast<std::size_t>(dim_));
  for (auto& x : v) {
    const double u = static_cast<double>(gen.next() >> 11) * 0x1.0p-53;
    x = static_cast<float>(u * 2.0 - 1.0);
  }
  return v;
}

std::vector<float> EmbeddingTable::embed(const std::string& token) const {
  if (mode_ == EmbeddingMode::loaded_file) {
    auto it = file_vectors_.find(token);
    if (it != file_vectors_.end()) return it->second;
  }
  return hash_embed(token);
}

}  // namespace vedit
