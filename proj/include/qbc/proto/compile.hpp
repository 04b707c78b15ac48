// Copyright 2026 The qbclab Authors
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

#pragma once

#include <string>
#include <vector>

#include "qbc/proto/script.hpp"

namespace qbc::proto {

struct CompileNote {
  std::size_t step_index;
  std::string text;
};

struct PurifyResult {
  ProtocolScript script;
  std::vector<CompileNote> notes;
};

/// Source-to-source transform replacing the party's probabilistic steps with
/// their unitary extensions: every Choose gains a die ancilla, every Measure
/// a pointer ancilla, and every step conditioned on the party's prior
/// outcomes becomes a block-diagonal conditional on those ancillas. Announce
/// steps are left in place; the executor measures the referenced ancilla at
/// the announce point, limited to the announced content. A note is emitted
/// when an announcement will force the die to collapse as well (its content
/// discloses the branch).
PurifyResult purify(const ProtocolScript& script, Party party);

}  // namespace qbc::proto
