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

#include "qbc/report.hpp"

#include <cstdio>
#include <sstream>

namespace qbc::report {

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write(std::ostringstream& out, const json& value, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (value.type()) {
    case json::value_t::object: {
      if (value.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad_in << json(it.key()).dump() << ": ";
        write(out, it.value(), indent + 1);
      }
      out << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (value.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      bool first = true;
      for (const auto& item : value) {
        if (!first) out << ",\n";
        first = false;
        out << pad_in;
        write(out, item, indent + 1);
      }
      out << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float:
      out << format_double(value.get<double>());
      return;
    default:
      out << value.dump();
      return;
  }
}

}  // namespace

std::string canonical_json(const json& value) {
  std::ostringstream out;
  write(out, value, 0);
  out << "\n";
  return out.str();
}

json complex_json(const linalg::Complex& z) { return json::array({z.real(), z.imag()}); }

json vector_json(const linalg::Vector& v) {
  json out = json::array();
  for (linalg::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

json matrix_json(const linalg::Matrix& m) {
  json rows = json::array();
  for (linalg::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (linalg::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json register_json(const engine::Register& reg) {
  json subs = json::array();
  for (const auto& sub : reg.subsystems()) {
    subs.push_back({{"label", sub.label},
                    {"dim", sub.dim},
                    {"owner", engine::to_string(sub.owner)}});
  }
  return {{"subsystems", std::move(subs)}, {"amplitudes", vector_json(reg.state().amplitudes())}};
}

json record_json(const engine::MeasurementRecord& rec) {
  return {{"subsystem", rec.subsystem},
          {"observable", rec.observable},
          {"outcome", rec.outcome},
          {"outcome_index", rec.outcome_index},
          {"probability", rec.probability}};
}

json message_json(const proto::Message& msg) {
  json out{{"step", msg.step_index},
           {"party", engine::to_string(msg.party)},
           {"kind", msg.kind}};
  if (!msg.id.empty()) out["id"] = msg.id;
  if (!msg.value.empty()) out["value"] = msg.value;
  if (!msg.indices.empty()) out["indices"] = msg.indices;
  if (!msg.pairs.empty()) {
    json pairs = json::array();
    for (const auto& [index, label] : msg.pairs) pairs.push_back({{"index", index}, {"label", label}});
    out["pairs"] = std::move(pairs);
  }
  return out;
}

json transcript_json(const proto::Transcript& transcript) {
  json records = json::object();
  for (const auto& [id, rec] : transcript.records) records[id] = record_json(rec);
  json choices = json::object();
  for (const auto& [id, k] : transcript.choices) choices[id] = k;
  json messages = json::array();
  for (const auto& msg : transcript.messages) messages.push_back(message_json(msg));
  json registers = json::array();
  for (const auto& reg : transcript.final_registers) registers.push_back(register_json(reg));

  json out{{"seed", transcript.seed},
           {"mode", proto::to_string(transcript.mode)},
           {"commit_bit", transcript.commit_bit},
           {"flip_reveal", transcript.flip_reveal},
           {"records", std::move(records)},
           {"choices", std::move(choices)},
           {"messages", std::move(messages)},
           {"final_registers", std::move(registers)}};
  if (transcript.verdict.has_value()) {
    out["verdict"] = *transcript.verdict ? "accept" : "reject";
  }
  return out;
}

}  // namespace qbc::report
