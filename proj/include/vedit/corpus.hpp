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

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "vedit/rng.hpp"

namespace vedit {

constexpr int kMaxSentenceTokens = 15;

using TokenList = std::vector<std::string>;

// Lowercase, split on whitespace, strip leading/trailing non-alphanumeric
// ASCII from each piece, drop empties, keep the first 15 tokens.
TokenList tokenize(const std::string& line);

enum class Split { train, test };

class SentenceStore {
 public:
  const std::vector<TokenList>& sentences(Split s) const {
    return s == Split::train ? train_ : test_;
  }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  int vocab_id(const std::string& token) const;  // -1 if unknown

  const TokenList& sample_sentence(Split s, Rng& rng) const;
  const std::string& sample_vocab_token(Rng& rng) const;

  friend SentenceStore load_corpus(const std::string& path, uint64_t seed,
                                   std::size_t max_sentences);

 private:
  std::vector<TokenList> train_;
  std::vector<TokenList> test_;
  std::vector<std::string> vocab_;  // sorted
  std::unordered_map<std::string, int> vocab_index_;
};

// Reads a UTF-8, one-sentence-per-line file; tokenizes, keeps sentences of
// 2..15 tokens, shuffles with `seed`, splits into equal train/test halves
// (odd leftover goes to train). max_sentences = 0 means no cap.
SentenceStore load_corpus(const std::string& path, uint64_t seed,
                          std::size_t max_sentences = 0);

enum class EmbeddingMode { deterministic_hash, loaded_file };

// Fixed (non-learned) token embeddings. Hash mode derives each vector from
// the token bytes alone, so embeddings agree across runs and processes.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  static EmbeddingTable deterministic(int dim);
  // File format: one line per token: token then dim decimal reals.
  static EmbeddingTable from_file(const std::string& path, int dim);

  EmbeddingMode mode() const { return mode_; }
  int dim() const { return dim_; }

  // Unknown tokens in file mode fall back to the hash path.
  std::vector<float> embed(const std::string& token) const;

 private:
  std::vector<float> hash_embed(const std::string& token) const;

  EmbeddingMode mode_ = EmbeddingMode::deterministic_hash;
  int dim_ = 0;
  std::unordered_map<std::string, std::vector<float>> file_vectors_;
};

}  // namespace vedit
