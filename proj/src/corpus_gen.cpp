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

#include "vedit/corpus_gen.hpp"

#include <array>

namespace vedit {

namespace {

using Bank = std::vector<const char*>;

const Bank kDeterminers = {"the", "a", "this", "that", "my", "your", "our"};

const Bank kAdjectives = {
    "old",   "new",    "red",    "green", "blue",  "small", "large",
    "quiet", "bright", "dark",   "warm",  "cold",  "quick", "slow",
    "clean", "dusty",  "narrow", "wide",  "heavy", "light", "plain",
    "odd",   "fine",   "rough",  "soft"};

const Bank kNouns = {
    "cat",    "dog",    "house",  "river",  "garden", "letter", "table",
    "window", "road",   "bridge", "market", "forest", "castle", "teacher",
    "doctor", "farmer", "sailor", "child",  "bird",   "horse",  "wagon",
    "lamp",   "book",   "clock",  "mirror", "basket", "stone",  "meadow",
    "harbor", "valley"};

const Bank kVerbs = {"watched", "followed", "painted", "carried", "opened",
                     "closed",  "crossed",  "visited", "cleaned", "repaired",
                     "found",   "lost",     "counted", "moved",   "borrowed",
                     "studied", "drew",     "filled",  "covered", "passed"};

const Bank kAdverbs = {"slowly", "quickly", "quietly", "carefully", "often",
                       "rarely", "happily", "sadly",   "early",     "late"};

const Bank kPrepositions = {"in", "on", "under", "near", "behind", "beside"};

const Bank kPlaces = {"kitchen", "village", "station", "library", "orchard",
                      "attic",   "cellar",  "yard",    "field",   "shore",
                      "square",  "tower",   "mill",    "barn",    "shop"};

const Bank kNames = {"anna", "george", "maria",  "peter", "sofia", "thomas",
                     "lena", "victor", "helena", "oscar", "nora",  "felix"};

const Bank kTimes = {"yesterday", "today",   "tonight",
                     "sunday",    "morning", "evening"};

const char* pick(const Bank& bank, Rng& rng) {
  return bank[rng.below(bank.size())];
}

}  // namespace

std::string generate_sentence(Rng& rng) {
  // token classes: D determiner, J adjective, N noun, V verb, A adverb,
  // P preposition, L place, M name, T time
  static const std::vector<const char*> kTemplates = {
      "DJNVDN",      // the old cat watched the river
      "DNVDJN",      // the dog painted the green letter
      "MVDNPDL",     // anna crossed the bridge in the village
      "DJNVDNPDL",   // the quick child carried the lamp near the shore
      "MAVDJN",      // george slowly opened the new window
      "DNVAPDL",     // the sailor moved quietly near the mill
      "TMVDN",       // yesterday maria visited the market
      "DJJNVDNA",    // the small dark bird followed the wagon often
      "MVDNPDLT",    // peter cleaned the yard in the orchard today
      "DNPDLVDJN",   // the clock on the tower counted the plain stone
      "DJNVDJNPDL",  // the warm lamp filled the dusty attic in the cellar
      "MAVDNPDL",    // sofia often crossed the road near the barn
  };

  const char* tpl = kTemplates[rng.below(kTemplates.size())];
  std::string out;
  for (const char* c = tpl; *c; ++c) {
    const char* word = nullptr;
    switch (*c) {
      case 'D': word = pick(kDeterminers, rng); break;
      case 'J': word = pick(kAdjectives, rng); break;
      case 'N': word = pick(kNouns, rng); break;
      case 'V': word = pick(kVerbs, rng); break;
      case 'A': word = pick(kAdverbs, rng); break;
      case 'P': word = pick(kPrepositions, rng); break;
      case 'L': word = pick(kPlaces, rng); break;
      case 'M': word = pick(kNames, rng); break;
      case 'T': word = pick(kTimes, rng); break;
      default: continue;
    }
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

}  // namespace vedit
