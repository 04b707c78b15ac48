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

#include "qbc/proto/script.hpp"

#include <cmath>
#include <sstream>

#include "qbc/abl.hpp"

namespace qbc::proto {

bool ProtocolScript::has_subsystem(const std::string& label) const {
  for (const auto& s : subsystems) {
    if (s.label == label) return true;
  }
  return false;
}

const SubsystemDecl& ProtocolScript::subsystem(const std::string& label) const {
  for (const auto& s : subsystems) {
    if (s.label == label) return s;
  }
  throw LookupError("undeclared subsystem '" + label + "'");
}

const engine::ObservableSpec& ProtocolScript::observable(const std::string& name) const {
  auto it = observables.find(name);
  if (it == observables.end()) throw LookupError("undeclared observable '" + name + "'");
  return it->second;
}

const Matrix& ProtocolScript::unitary(const std::string& name) const {
  auto it = unitaries.find(name);
  if (it == unitaries.end()) throw LookupError("undeclared unitary '" + name + "'");
  return it->second;
}

const Vector& ProtocolScript::state(const std::string& name) const {
  auto it = states.find(name);
  if (it == states.end()) throw LookupError("undeclared state '" + name + "'");
  return it->second;
}

ProtocolScript ProtocolScript::with_builtins() {
  const double s = 1.0 / std::sqrt(2.0);
  ProtocolScript script;

  script.states["zero"] = (Vector(2) << 1, 0).finished();
  script.states["one"] = (Vector(2) << 0, 1).finished();
  script.states["plus"] = (Vector(2) << s, s).finished();
  script.states["minus"] = (Vector(2) << s, -s).finished();
  Vector bell = Vector::Zero(4);
  bell(0) = s;
  bell(3) = s;
  script.states["bell"] = bell;

  script.unitaries["I2"] = Matrix::Identity(2, 2);
  script.unitaries["X"] = engine::pauli_x();
  script.unitaries["Y"] = engine::pauli_y();
  script.unitaries["Z"] = engine::pauli_z();
  script.unitaries["H"] = engine::hadamard();

  script.observables.emplace("sx", engine::sigma_x());
  script.observables.emplace("sy", engine::sigma_y());
  script.observables.emplace("sz", engine::sigma_z());
  script.observables.emplace("R", abl::VaaFixture::standard().r_observable());
  return script;
}

// ---------------------------------------------------------------------------
// Source rendering
// ---------------------------------------------------------------------------

namespace {

void render_action(std::ostringstream& out, const Action& a) {
  if (a.kind == Action::Kind::Measure) {
    out << "measure " << a.op << " on";
    for (const auto& t : a.targets) out << " " << t;
    out << " as " << a.record_id;
  } else {
    out << "apply " << a.op << " on";
    for (const auto& t : a.targets) out << " " << t;
  }
}

struct StepRenderer {
  std::ostringstream& out;

  void operator()(const PrepareStep& s) {
    out << "prepare " << engine::to_string(s.party) << " " << s.state << " on";
    for (const auto& t : s.targets) out << " " << t;
    if (s.commit_condition >= 0) out << " if commit " << s.commit_condition;
  }
  void operator()(const SendStep& s) {
    out << "send " << s.subsystem << " " << engine::to_string(s.from) << " "
        << engine::to_string(s.to);
  }
  void operator()(const ApplyStep& s) {
    out << "apply " << engine::to_string(s.party) << " " << s.action.op << " on";
    for (const auto& t : s.action.targets) out << " " << t;
    if (s.commit_condition >= 0) out << " if commit " << s.commit_condition;
  }
  void operator()(const MeasureStep& s) {
    out << "measure " << engine::to_string(s.party) << " " << s.action.op << " on";
    for (const auto& t : s.action.targets) out << " " << t;
    out << " as " << s.action.record_id;
  }
  void operator()(const ChooseStep& s) {
    out << "choose " << engine::to_string(s.party) << " as " << s.choice_id << " :";
    for (std::size_t b = 0; b < s.branches.size(); ++b) {
      if (b > 0) out << " |";
      out << " ";
      render_action(out, s.branches[b]);
    }
    out << " weights";
    for (double w : s.weights) out << " " << w;
  }
  void operator()(const ConditionalStep& s) {
    out << "conditional " << engine::to_string(s.party) << " on";
    for (const auto& c : s.controls) out << " " << c;
    out << " :";
    for (std::size_t k = 0; k < s.cases.size(); ++k) {
      if (k > 0) out << " |";
      out << " case";
      for (Index v : s.cases[k].first) out << " " << v;
      out << " -> ";
      render_action(out, s.cases[k].second);
    }
  }
  void operator()(const AnnounceStep& s) {
    out << "announce " << engine::to_string(s.party) << " " << s.payload;
    for (const auto& a : s.args) out << " " << a;
  }
  void operator()(const RevealStep& s) {
    out << "reveal alice";
    if (!s.proof.empty()) out << " proof " << s.proof;
  }
  void operator()(const VerifyStep& s) {
    out << "verify " << engine::to_string(s.party) << " " << s.predicate;
    for (const auto& a : s.args) out << " " << a;
  }
  void operator()(const PurifiedMeasureStep&) { out << "# <purified measure>"; }
  void operator()(const PurifiedChoiceStep&) { out << "# <purified choice>"; }
  void operator()(const PurifiedConditionalStep&) { out << "# <purified conditional>"; }
};

void render_literal(std::ostringstream& out, const Vector& v) {
  out << " =";
  for (Index i = 0; i < v.size(); ++i) {
    out << " " << v(i).real() << " " << v(i).imag();
  }
}

}  // namespace

std::string to_source(const ProtocolScript& script) {
  std::ostringstream out;
  out.precision(17);
  ProtocolScript builtins = ProtocolScript::with_builtins();

  for (const auto& sub : script.subsystems) {
    out << "subsystem " << sub.label << " dim " << sub.dim << " owner "
        << engine::to_string(sub.owner) << "\n";
  }
  for (const auto& [name, v] : script.states) {
    if (builtins.states.count(name)) continue;
    out << "state " << name << " dim " << v.size();
    render_literal(out, v);
    out << "\n";
  }
  for (const auto& [name, m] : script.unitaries) {
    if (builtins.unitaries.count(name)) continue;
    out << "unitary " << name << " dim " << m.rows();
    out << " =";
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) out << " " << m(i, j).real() << " " << m(i, j).imag();
    }
    out << "\n";
  }
  for (const auto& [name, obs] : script.observables) {
    if (builtins.observables.count(name)) continue;
    out << "observable " << name << " dim " << obs.dim() << " outcomes";
    for (const auto& l : obs.column_labels()) out << " " << l;
    out << " =";
    const Matrix& m = obs.eigenbasis();
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) out << " " << m(i, j).real() << " " << m(i, j).imag();
    }
    out << "\n";
  }
  for (const auto& step : script.steps) {
    StepRenderer renderer{out};
    std::visit(renderer, step);
    out << "\n";
  }
  return out.str();
}

}  // namespace qbc::proto
