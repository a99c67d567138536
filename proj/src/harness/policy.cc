// Copyright 2026 The realm-desk Authors
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

#include "realm/harness/policy.h"

#include <cmath>
#include <string>

namespace realm::harness {

void ValidateChunk(const std::vector<arm::ActionCommand>& chunk) {
  if (chunk.empty() || static_cast<int>(chunk.size()) > kMaxChunk) {
    throw ProtocolError("action chunk must hold 1.." + std::to_string(kMaxChunk) +
                        " actions, got " + std::to_string(chunk.size()));
  }
  for (const auto& a : chunk) {
    if (!a.ToVector().allFinite()) throw ProtocolError("action contains a non-finite value");
  }
}

}  // namespace realm::harness
