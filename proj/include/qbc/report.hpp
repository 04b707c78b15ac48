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
//
// Deterministic JSON serialization: sorted keys and fixed 17-significant-
// digit float formatting, so equal inputs produce byte-identical reports.

#pragma once

#include <json.hpp>
#include <string>

#include "qbc/engine.hpp"
#include "qbc/proto/execute.hpp"

namespace qbc::report {

using json = nlohmann::json;

/// Renders with sorted keys, two-space indentation and every number
/// formatted via "%.17g". The output is a stable function of the value.
std::string canonical_json(const json& value);

json complex_json(const linalg::Complex& z);
json vector_json(const linalg::Vector& v);
json matrix_json(const linalg::Matrix& m);
json register_json(const engine::Register& reg);
json record_json(const engine::MeasurementRecord& rec);
json message_json(const proto::Message& msg);
json transcript_json(const proto::Transcript& transcript);

}  // namespace qbc::report
