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

#include <string>
#include <vector>

#include "vedit/rng.hpp"

namespace vedit {

// Template-grammar sentence source used by tests and the corpus generator
// tool. Sentences are 4..14 words of patterned text over ~150 word types.
std::string generate_sentence(Rng& rng);

}  // namespace vedit
