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

#include "qbc/proto/script.hpp"

namespace qbc::proto {

/// Parses the line-oriented protocol script format (see
/// docs/protocol-format.md). Declarations come first, then one step per
/// line; `#` starts a comment. All names must be declared before use;
/// ownership violations that are statically detectable (a party operating on
/// a subsystem it does not hold) are reported with the offending position.
/// Throws ParseError.
ProtocolScript parse(const std::string& source);

}  // namespace qbc::proto
