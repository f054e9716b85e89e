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

// Deterministic template-grammar corpus generator. Sentences follow simple
// part-of-speech patterns over a small vocabulary, so uniformly drawn noise
// tokens are statistically distinguishable from clean text: the property a
// simulated dictation-repair task needs from its sentence source.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "vedit/corpus_gen.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a synthetic sentence corpus (one per line)"};
  std::string out_path = "corpus.txt";
  uint64_t seed = 1;
  long long count = 12000;
  app.add_option("--out", out_path, "output file");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--count", count, "number of sentences");
  CLI11_PARSE(app, argc, argv);

  try {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    vedit::Rng rng(vedit::SplitMix64(seed ^ 0x67656eULL).next());
    for (long long i = 0; i < count; ++i)
      out << vedit::generate_sentence(rng) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
