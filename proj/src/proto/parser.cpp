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

#include "qbc/proto/parser.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "qbc/attack.hpp"

namespace qbc::proto {

namespace {

struct Token {
  std::string text;
  int column;
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(const std::string& source) {
  std::vector<Line> lines;
  std::istringstream in(source);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] == '#') break;
      if (std::isspace(static_cast<unsigned char>(raw[i]))) {
        ++i;
        continue;
      }
      std::size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) &&
             raw[i] != '#') {
        ++i;
      }
      line.tokens.push_back({raw.substr(start, i - start), static_cast<int>(start) + 1});
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

// Record metadata used for static checks and case-key resolution.
struct IdInfo {
  enum class Kind { Measure, Choice } kind;
  Party party;
  std::vector<std::string> value_names;  // outcome labels or branch op names
  Index cardinality = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& source)
      : lines_(tokenize(source)), script_(ProtocolScript::with_builtins()) {}

  ProtocolScript run() {
    for (const Line& line : lines_) {
      line_ = &line;
      pos_ = 0;
      const std::string& head = peek().text;
      if (head == "subsystem" || head == "state" || head == "unitary" || head == "observable") {
        if (steps_started_) {
          fail("declarations must precede the first step");
        }
        parse_declaration();
      } else {
        steps_started_ = true;
        parse_step();
      }
      if (pos_ != line.tokens.size()) fail("unexpected trailing input");
    }
    return std::move(script_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    int col = 1;
    if (line_ && pos_ < line_->tokens.size()) {
      col = line_->tokens[pos_].column;
    } else if (line_ && !line_->tokens.empty()) {
      col = line_->tokens.back().column;
    }
    throw ParseError(line_ ? line_->number : 0, col, message);
  }

  const Token& peek() const {
    if (pos_ >= line_->tokens.size()) fail("unexpected end of line");
    return line_->tokens[pos_];
  }

  bool at_end() const { return pos_ >= line_->tokens.size(); }

  std::string next() {
    const Token& t = peek();
    ++pos_;
    return t.text;
  }

  void expect(const std::string& word) {
    if (peek().text != word) fail("expected '" + word + "'");
    ++pos_;
  }

  bool accept(const std::string& word) {
    if (!at_end() && peek().text == word) {
      ++pos_;
      return true;
    }
    return false;
  }

  Index parse_int() {
    const std::string tok = peek().text;
    try {
      std::size_t used = 0;
      long long v = std::stoll(tok, &used);
      if (used != tok.size()) fail("malformed integer '" + tok + "'");
      ++pos_;
      return static_cast<Index>(v);
    } catch (const ParseError&) {
      throw;
    } catch (...) {
      fail("malformed integer '" + tok + "'");
    }
  }

  double parse_double() {
    const std::string tok = peek().text;
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) fail("malformed number '" + tok + "'");
      ++pos_;
      return v;
    } catch (const ParseError&) {
      throw;
    } catch (...) {
      fail("malformed number '" + tok + "'");
    }
  }

  Party parse_party() {
    const std::string tok = peek().text;
    if (tok == "alice") {
      ++pos_;
      return Party::Alice;
    }
    if (tok == "bob") {
      ++pos_;
      return Party::Bob;
    }
    if (tok == "channel") {
      ++pos_;
      return Party::Channel;
    }
    fail("unknown party '" + tok + "'");
  }

  Vector parse_complex_list(Index count) {
    expect("=");
    Vector v(count);
    for (Index i = 0; i < count; ++i) {
      double re = parse_double();
      double im = parse_double();
      v(i) = engine::Complex(re, im);
    }
    return v;
  }

  // ------------------------------------------------------------------
  // Declarations
  // ------------------------------------------------------------------

  void check_fresh_name(const std::string& name) {
    if (script_.states.count(name) || script_.unitaries.count(name) ||
        script_.observables.count(name) || script_.has_subsystem(name)) {
      fail("name '" + name + "' is already declared");
    }
  }

  void parse_declaration() {
    const std::string kind = next();
    std::string name = next();
    check_fresh_name(name);
    if (kind == "subsystem") {
      expect("dim");
      Index dim = parse_int();
      if (dim < 1) fail("subsystem dimension must be at least 1");
      expect("owner");
      Party owner = parse_party();
      script_.subsystems.push_back({name, dim, owner});
      ownership_[name] = owner;
      return;
    }
    expect("dim");
    Index dim = parse_int();
    if (dim < 1) fail("dimension must be at least 1");
    if (kind == "state") {
      Vector v = parse_complex_list(dim);
      double norm = v.norm();
      if (std::abs(norm - 1.0) > 1e-6) fail("state literal is not normalized");
      script_.states[name] = v / norm;
    } else if (kind == "unitary") {
      Vector flat = parse_complex_list(dim * dim);
      Matrix m(dim, dim);
      for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) m(i, j) = flat(i * dim + j);
      }
      if (!linalg::is_unitary(m, 1e-6)) fail("unitary literal is too far from unitary");
      // Snap hand-typed literals to the nearest exact unitary.
      script_.unitaries[name] = attack::polar_unitary_factor(m);
    } else if (kind == "observable") {
      expect("outcomes");
      std::vector<std::string> labels;
      while (peek().text != "=") labels.push_back(next());
      if (static_cast<Index>(labels.size()) != dim) {
        fail("observable needs one outcome label per eigenbasis column");
      }
      Vector flat = parse_complex_list(dim * dim);
      Matrix m(dim, dim);
      for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) m(i, j) = flat(i * dim + j);
      }
      if (!linalg::is_unitary(m, 1e-6)) fail("observable eigenbasis is not orthonormal");
      script_.observables.emplace(name,
                                  engine::ObservableSpec(name, attack::polar_unitary_factor(m),
                                                         std::move(labels)));
    } else {
      fail("unknown declaration '" + kind + "'");
    }
  }

  // ------------------------------------------------------------------
  // Step helpers
  // ------------------------------------------------------------------

  Party owner_of(const std::string& label) {
    auto it = ownership_.find(label);
    if (it == ownership_.end()) fail("undeclared subsystem '" + label + "'");
    return it->second;
  }

  void require_ownership(Party party, const std::vector<std::string>& labels) {
    for (const auto& label : labels) {
      if (owner_of(label) != party) {
        fail("party " + engine::to_string(party) + " does not hold subsystem '" + label + "'");
      }
    }
  }

  std::vector<std::string> parse_target_list() {
    expect("on");
    std::vector<std::string> targets;
    while (!at_end() && peek().text != "as" && peek().text != "|" && peek().text != "if" &&
           peek().text != "weights" && peek().text != ":") {
      std::string label = next();
      if (!script_.has_subsystem(label)) {
        --pos_;
        fail("undeclared subsystem '" + label + "'");
      }
      targets.push_back(label);
    }
    if (targets.empty()) fail("empty target list");
    return targets;
  }

  Index target_dim(const std::vector<std::string>& targets) {
    Index d = 1;
    for (const auto& t : targets) d *= script_.subsystem(t).dim;
    return d;
  }

  std::string fresh_id() {
    std::string id = next();
    if (ids_.count(id) || script_.has_subsystem(id)) {
      --pos_;
      fail("id '" + id + "' is already in use");
    }
    return id;
  }

  Action parse_action(Party party) {
    Action action;
    const std::string kind = next();
    if (kind == "measure") {
      action.kind = Action::Kind::Measure;
      action.op = next();
      if (!script_.observables.count(action.op)) {
        --pos_;
        fail("undeclared observable '" + action.op + "'");
      }
      action.targets = parse_target_list();
      if (script_.observable(action.op).dim() != target_dim(action.targets)) {
        fail("observable '" + action.op + "' does not fit the targets");
      }
      expect("as");
      action.record_id = next();
    } else if (kind == "apply") {
      action.kind = Action::Kind::Apply;
      action.op = next();
      if (!script_.unitaries.count(action.op)) {
        --pos_;
        fail("undeclared unitary '" + action.op + "'");
      }
      action.targets = parse_target_list();
      if (script_.unitary(action.op).rows() != target_dim(action.targets)) {
        fail("unitary '" + action.op + "' does not fit the targets");
      }
    } else {
      fail("expected an action (measure/apply), found '" + kind + "'");
    }
    require_ownership(party, action.targets);
    return action;
  }

  void register_measure_id(const Action& action, Party party) {
    const auto& obs = script_.observable(action.op);
    IdInfo info{IdInfo::Kind::Measure, party, obs.outcomes(), obs.outcome_count()};
    ids_.emplace(action.record_id, std::move(info));
  }

  int parse_commit_condition() {
    if (accept("if")) {
      expect("commit");
      Index bit = parse_int();
      if (bit != 0 && bit != 1) fail("commitment bit must be 0 or 1");
      return static_cast<int>(bit);
    }
    return -1;
  }

  // ------------------------------------------------------------------
  // Steps
  // ------------------------------------------------------------------

  void parse_step() {
    const std::string head = peek().text;
    if (head == "prepare") {
      parse_prepare();
    } else if (head == "send") {
      parse_send();
    } else if (head == "apply") {
      parse_apply();
    } else if (head == "measure") {
      parse_measure();
    } else if (head == "choose") {
      parse_choose();
    } else if (head == "conditional") {
      parse_conditional();
    } else if (head == "announce") {
      parse_announce();
    } else if (head == "reveal") {
      parse_reveal();
    } else if (head == "verify") {
      parse_verify();
    } else {
      fail("unknown step '" + head + "'");
    }
  }

  void parse_prepare() {
    expect("prepare");
    PrepareStep step;
    step.party = parse_party();
    step.state = next();
    if (!script_.states.count(step.state)) {
      --pos_;
      fail("undeclared state '" + step.state + "'");
    }
    step.targets = parse_target_list();
    if (script_.state(step.state).size() != target_dim(step.targets)) {
      fail("state '" + step.state + "' does not fit the targets");
    }
    require_ownership(step.party, step.targets);
    step.commit_condition = parse_commit_condition();
    for (const auto& t : step.targets) {
      // A commit-conditioned pair of prepares may target the same labels.
      if (prepared_.count(t) && step.commit_condition < 0) {
        fail("subsystem '" + t + "' is already prepared");
      }
      prepared_.insert(t);
    }
    script_.steps.emplace_back(std::move(step));
  }

  void parse_send() {
    expect("send");
    SendStep step;
    step.subsystem = next();
    if (!script_.has_subsystem(step.subsystem)) {
      --pos_;
      fail("undeclared subsystem '" + step.subsystem + "'");
    }
    step.from = parse_party();
    step.to = parse_party();
    if (owner_of(step.subsystem) != step.from) {
      fail("subsystem '" + step.subsystem + "' is not held by " + engine::to_string(step.from));
    }
    ownership_[step.subsystem] = step.to;
    script_.steps.emplace_back(std::move(step));
  }

  void parse_apply() {
    expect("apply");
    ApplyStep step;
    step.party = parse_party();
    step.action.kind = Action::Kind::Apply;
    step.action.op = next();
    if (!script_.unitaries.count(step.action.op)) {
      --pos_;
      fail("undeclared unitary '" + step.action.op + "'");
    }
    step.action.targets = parse_target_list();
    if (script_.unitary(step.action.op).rows() != target_dim(step.action.targets)) {
      fail("unitary '" + step.action.op + "' does not fit the targets");
    }
    require_ownership(step.party, step.action.targets);
    step.commit_condition = parse_commit_condition();
    script_.steps.emplace_back(std::move(step));
  }

  void parse_measure() {
    expect("measure");
    MeasureStep step;
    step.party = parse_party();
    Action action;
    action.kind = Action::Kind::Measure;
    action.op = next();
    if (!script_.observables.count(action.op)) {
      --pos_;
      fail("undeclared observable '" + action.op + "'");
    }
    action.targets = parse_target_list();
    if (script_.observable(action.op).dim() != target_dim(action.targets)) {
      fail("observable '" + action.op + "' does not fit the targets");
    }
    require_ownership(step.party, action.targets);
    expect("as");
    action.record_id = fresh_id();
    step.action = action;
    register_measure_id(action, step.party);
    script_.steps.emplace_back(std::move(step));
  }

  void parse_choose() {
    expect("choose");
    ChooseStep step;
    step.party = parse_party();
    expect("as");
    step.choice_id = fresh_id();
    expect(":");
    std::string measure_record;
    Index measure_outcomes = -1;
    std::vector<std::string> branch_names;
    while (true) {
      Action action = parse_action(step.party);
      if (action.kind == Action::Kind::Measure) {
        if (measure_record.empty()) {
          if (ids_.count(action.record_id) || script_.has_subsystem(action.record_id)) {
            fail("id '" + action.record_id + "' is already in use");
          }
          measure_record = action.record_id;
          measure_outcomes = script_.observable(action.op).outcome_count();
        } else if (action.record_id != measure_record) {
          fail("measure branches of one choice must share a record id");
        } else if (script_.observable(action.op).outcome_count() != measure_outcomes) {
          fail("measure branches of one choice must have the same outcome count");
        }
      }
      if (!step.branches.empty() && action.targets != step.branches.front().targets) {
        fail("all branches of a choice must share one target signature");
      }
      branch_names.push_back(action.op);
      step.branches.push_back(std::move(action));
      if (!accept("|")) break;
    }
    if (accept("weights")) {
      while (!at_end() && peek().text != "|") step.weights.push_back(parse_double());
    }
    if (step.weights.empty()) {
      step.weights.assign(step.branches.size(), 1.0 / static_cast<double>(step.branches.size()));
    }
    if (step.weights.size() != step.branches.size()) {
      fail("one weight per branch required");
    }
    double total = 0.0;
    for (double w : step.weights) total += w;
    if (std::abs(total - 1.0) > 1e-9) fail("branch weights must sum to 1");

    IdInfo info{IdInfo::Kind::Choice, step.party, branch_names,
                static_cast<Index>(step.branches.size())};
    ids_.emplace(step.choice_id, info);
    if (!measure_record.empty()) {
      for (const auto& branch : step.branches) {
        if (branch.kind == Action::Kind::Measure) {
          const auto& obs = script_.observable(branch.op);
          IdInfo minfo{IdInfo::Kind::Measure, step.party, obs.outcomes(), measure_outcomes};
          ids_.emplace(measure_record, std::move(minfo));
          break;
        }
      }
    }
    script_.steps.emplace_back(std::move(step));
  }

  void parse_conditional() {
    expect("conditional");
    ConditionalStep step;
    step.party = parse_party();
    expect("on");
    while (peek().text != ":") {
      std::string id = next();
      auto it = ids_.find(id);
      if (it == ids_.end()) {
        --pos_;
        fail("unknown record or choice id '" + id + "'");
      }
      if (it->second.party != step.party) {
        --pos_;
        fail("a party may only condition on its own records");
      }
      step.controls.push_back(id);
    }
    expect(":");
    if (step.controls.empty()) fail("conditional requires at least one control");

    std::vector<Index> cardinalities;
    Index space = 1;
    for (const auto& c : step.controls) {
      cardinalities.push_back(ids_.at(c).cardinality);
      space *= cardinalities.back();
    }

    std::string measure_record;
    Index measure_outcomes = -1;
    std::set<std::vector<Index>> seen;
    std::vector<std::string> common_targets;
    while (true) {
      expect("case");
      std::vector<Index> key;
      for (std::size_t c = 0; c < step.controls.size(); ++c) {
        const IdInfo& info = ids_.at(step.controls[c]);
        const std::string tok = peek().text;
        // Accept an integer index or a value name of that control.
        Index value = -1;
        auto named = std::find(info.value_names.begin(), info.value_names.end(), tok);
        if (named != info.value_names.end()) {
          value = static_cast<Index>(named - info.value_names.begin());
          ++pos_;
        } else {
          value = parse_int();
        }
        if (value < 0 || value >= info.cardinality) fail("case value out of range");
        key.push_back(value);
      }
      if (!seen.insert(key).second) fail("duplicate case");
      expect("->");
      Action action = parse_action(step.party);
      if (action.kind == Action::Kind::Measure) {
        if (measure_record.empty()) {
          if (ids_.count(action.record_id) || script_.has_subsystem(action.record_id)) {
            fail("id '" + action.record_id + "' is already in use");
          }
          measure_record = action.record_id;
          measure_outcomes = script_.observable(action.op).outcome_count();
        } else if (action.record_id != measure_record) {
          fail("measure cases of one conditional must share a record id");
        } else if (script_.observable(action.op).outcome_count() != measure_outcomes) {
          fail("measure cases of one conditional must have the same outcome count");
        }
      }
      if (common_targets.empty()) {
        common_targets = action.targets;
      } else if (action.targets != common_targets) {
        fail("all cases of a conditional must share one target signature");
      }
      step.cases.emplace_back(std::move(key), std::move(action));
      if (!accept("|")) break;
    }
    if (static_cast<Index>(step.cases.size()) != space) {
      fail("case table must cover every control value (" + std::to_string(step.cases.size()) +
           " of " + std::to_string(space) + " given)");
    }
    if (!measure_record.empty()) {
      for (const auto& [key, action] : step.cases) {
        if (action.kind == Action::Kind::Measure) {
          const auto& obs = script_.observable(action.op);
          IdInfo minfo{IdInfo::Kind::Measure, step.party, obs.outcomes(), measure_outcomes};
          ids_.emplace(measure_record, std::move(minfo));
          break;
        }
      }
    }
    script_.steps.emplace_back(std::move(step));
  }

  void parse_announce() {
    expect("announce");
    AnnounceStep step;
    step.party = parse_party();
    step.payload = next();
    if (step.payload == "outcome") {
      std::string id = next();
      auto it = ids_.find(id);
      if (it == ids_.end()) {
        --pos_;
        fail("unknown record or choice id '" + id + "'");
      }
      if (it->second.party != step.party) {
        --pos_;
        fail("a party may only announce its own outcomes");
      }
      step.args.push_back(id);
    } else {
      while (!at_end()) step.args.push_back(next());
    }
    script_.steps.emplace_back(std::move(step));
  }

  void parse_reveal() {
    expect("reveal");
    expect("alice");
    RevealStep step;
    if (accept("proof")) step.proof = next();
    if (reveal_seen_) fail("only one reveal step is allowed");
    reveal_seen_ = true;
    script_.steps.emplace_back(std::move(step));
  }

  void parse_verify() {
    expect("verify");
    VerifyStep step;
    step.party = parse_party();
    step.predicate = next();
    while (!at_end()) step.args.push_back(next());
    script_.steps.emplace_back(std::move(step));
  }

  std::vector<Line> lines_;
  ProtocolScript script_;
  const Line* line_ = nullptr;
  std::size_t pos_ = 0;
  bool steps_started_ = false;
  bool reveal_seen_ = false;
  std::map<std::string, Party> ownership_;
  std::set<std::string> prepared_;
  std::map<std::string, IdInfo> ids_;
};

}  // namespace

ProtocolScript parse(const std::string& source) { return Parser(source).run(); }

}  // namespace qbc::proto
