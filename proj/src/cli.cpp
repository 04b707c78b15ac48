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

#include "qbc/cli.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "qbc/abl.hpp"
#include "qbc/attack.hpp"
#include "qbc/proto/parser.hpp"
#include "qbc/proto/vaa.hpp"
#include "qbc/report.hpp"
#include "qbc/version.hpp"

namespace qbc::cli {

using report::json;

namespace {

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

proto::ProtocolScript load_script(const RunConfig& config) {
  if (!config.script_path.empty()) {
    std::ifstream in(config.script_path);
    if (!in) throw LookupError("cannot open script file '" + config.script_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return proto::parse(buffer.str());
  }
  return proto::builtin_script(config.builtin, config.rounds);
}

json config_json(const RunConfig& config, std::uint64_t seed) {
  return {{"script", config.script_path},
          {"builtin", config.script_path.empty() ? config.builtin : ""},
          {"rounds", config.rounds},
          {"mode", proto::to_string(config.mode)},
          {"seed", seed},
          {"commit", config.commit},
          {"flip_reveal", config.flip_reveal},
          {"trials", config.trials},
          {"format", config.format}};
}

json tool_json() {
  return {{"name", kToolName}, {"version", kToolVersion}};
}

// Commitment analysis for the report: concealment of the global states plus
// the synthesized (or optimal) cheat fidelity.
json analysis_json(const proto::ProtocolScript& script, proto::Mode mode) {
  json out = json::object();
  try {
    proto::CommitmentStates cs = proto::commitment_states(script, mode);
    out["w_b_trace_distance"] = cs.distance;
    out["w_b0"] = report::matrix_json(cs.w_b0.matrix());
    out["w_b1"] = report::matrix_json(cs.w_b1.matrix());

    double concealment = attack::concealment(cs.psi0, cs.psi1, cs.dim_a, cs.dim_b);
    out["concealment"] = concealment;
    attack::CheatReport cheat =
        concealment <= attack::kConcealmentThreshold
            ? attack::synthesize_cheat_unitary(cs.psi0, cs.psi1, cs.dim_a, cs.dim_b)
            : attack::optimal_cheat_unitary(cs.psi0, cs.psi1, cs.dim_a, cs.dim_b);
    out["cheat_fidelity"] = cheat.cheat_fidelity;
    out["cheat_path"] = concealment <= attack::kConcealmentThreshold ? "exact" : "optimal";
    attack::BindingCheck binding = attack::verify_binding_failure(cheat, cs.psi0, cs.psi1);
    out["binding_residual"] = binding.residual;
    out["binding_defeated"] = binding.success;
  } catch (const Error& e) {
    out["note"] = e.what();
  }
  return out;
}

struct TrialResult {
  std::uint64_t seed = 0;
  std::optional<bool> verdict;
};

}  // namespace

std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("QBC_OUTPUT_DIR");
  if (!dir || !*dir) return path;
  std::string base(dir);
  if (base.back() != '/') base += '/';
  return base + path;
}

std::string run_report_body(const RunConfig& config, std::uint64_t seed) {
  proto::ProtocolScript script = load_script(config);

  json body{{"config", config_json(config, seed)}, {"tool", tool_json()}};

  if (config.trials <= 1) {
    proto::ExecOptions opts{seed, config.mode, config.commit, config.flip_reveal};
    proto::Transcript transcript = proto::execute(script, opts);
    body["transcript"] = report::transcript_json(transcript);
    if (transcript.verdict.has_value()) {
      body["verdict"] = *transcript.verdict ? "accept" : "reject";
    }
  } else {
    std::vector<TrialResult> results(static_cast<std::size_t>(config.trials));
    int jobs = std::max(1, config.jobs);
    std::vector<std::thread> pool;
    std::size_t per = (results.size() + static_cast<std::size_t>(jobs) - 1) /
                      static_cast<std::size_t>(jobs);
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        std::size_t begin = static_cast<std::size_t>(j) * per;
        std::size_t end = std::min(results.size(), begin + per);
        for (std::size_t t = begin; t < end; ++t) {
          std::uint64_t trial_seed = seed + t;
          proto::ExecOptions opts{trial_seed, config.mode, config.commit, config.flip_reveal};
          proto::Transcript transcript = proto::execute(script, opts);
          results[t] = {trial_seed, transcript.verdict};
        }
      });
    }
    for (auto& th : pool) th.join();

    int accepted = 0, rejected = 0, undecided = 0;
    json verdicts = json::array();
    for (const auto& r : results) {
      if (!r.verdict.has_value()) {
        ++undecided;
        verdicts.push_back("none");
      } else if (*r.verdict) {
        ++accepted;
        verdicts.push_back("accept");
      } else {
        ++rejected;
        verdicts.push_back("reject");
      }
    }
    body["trials"] = {{"count", config.trials},
                      {"accepted", accepted},
                      {"rejected", rejected},
                      {"undecided", undecided},
                      {"verdicts", std::move(verdicts)}};
    if (undecided == 0) {
      body["verdict"] = (rejected == 0) ? "accept" : "reject";
    }
  }

  body["analysis"] = analysis_json(script, config.mode);
  return report::canonical_json(body);
}

namespace {

std::string render_text_run(const json& body) {
  std::ostringstream out;
  out << "protocol run (" << body["config"]["mode"].get<std::string>() << ", seed "
      << body["config"]["seed"] << ")\n";
  if (body.contains("verdict")) {
    out << "verdict: " << body["verdict"].get<std::string>() << "\n";
  }
  if (body.contains("trials")) {
    out << "trials: " << body["trials"]["count"] << " (accepted " << body["trials"]["accepted"]
        << ", rejected " << body["trials"]["rejected"] << ")\n";
  }
  const json& analysis = body["analysis"];
  if (analysis.contains("w_b_trace_distance")) {
    out << "W_B trace distance: " << analysis["w_b_trace_distance"].get<double>() << "\n";
    out << "concealment: " << analysis["concealment"].get<double>() << "\n";
    out << "cheat fidelity (" << analysis["cheat_path"].get<std::string>()
        << "): " << analysis["cheat_fidelity"].get<double>() << "\n";
  } else if (analysis.contains("note")) {
    out << "analysis: " << analysis["note"].get<std::string>() << "\n";
  }
  return out.str();
}

int emit(const std::string& text, const std::string& output_path, std::ostream& out,
         std::ostream& err) {
  if (output_path.empty()) {
    out << text;
    return kExitSuccess;
  }
  std::string path = resolve_output_path(output_path);
  std::ofstream file(path);
  if (!file) {
    err << "error: cannot write '" << path << "'\n";
    return kExitUsage;
  }
  file << text;
  return kExitSuccess;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::uint64_t seed = config.seed.value_or(std::random_device{}());
    std::string body = run_report_body(config, seed);

    json parsed = json::parse(body);
    std::string rendered;
    if (config.format == "text") {
      rendered = render_text_run(parsed);
    } else {
      if (config.with_timestamp) {
        parsed["generated_at"] = timestamp_utc();
      }
      rendered = report::canonical_json(parsed);
    }
    int rc = emit(rendered, config.output_path, out, err);
    if (rc != kExitSuccess) return rc;
    if (parsed.contains("verdict") && parsed["verdict"] == "reject") return kExitReject;
    return kExitSuccess;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

linalg::Vector read_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open state file '" + path + "'");
  std::vector<linalg::Complex> amps;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    double re, im;
    if (fields >> re) {
      if (!(fields >> im)) {
        throw ParseError(number, 1, "expected 're im' amplitude pair");
      }
      amps.emplace_back(re, im);
    }
  }
  linalg::Vector v(static_cast<linalg::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<linalg::Index>(i)) = amps[i];
  return v;
}

int cmd_attack(const AttackConfig& config, std::ostream& out, std::ostream& err) {
  try {
    linalg::Vector v0 = read_state_file(config.psi0_path);
    linalg::Vector v1 = read_state_file(config.psi1_path);
    if (config.dim_a * config.dim_b != v0.size() || v0.size() != v1.size()) {
      err << "error: states do not live on dimA * dimB\n";
      return kExitUsage;
    }
    // Hand-typed amplitudes get snapped to unit norm.
    for (linalg::Vector* v : {&v0, &v1}) {
      double norm = v->norm();
      if (std::abs(norm - 1.0) > 1e-6) {
        err << "error: state file is not normalized (|psi| = " << norm << ")\n";
        return kExitUsage;
      }
      *v /= norm;
    }
    linalg::StateVector psi0({config.dim_a, config.dim_b}, v0);
    linalg::StateVector psi1({config.dim_a, config.dim_b}, v1);

    double concealment = attack::concealment(psi0, psi1, config.dim_a, config.dim_b);
    attack::CheatReport cheat =
        concealment <= attack::kConcealmentThreshold
            ? attack::synthesize_cheat_unitary(psi0, psi1, config.dim_a, config.dim_b)
            : attack::optimal_cheat_unitary(psi0, psi1, config.dim_a, config.dim_b);
    attack::BindingCheck binding = attack::verify_binding_failure(cheat, psi0, psi1);

    json body{{"tool", tool_json()},
              {"dim_a", config.dim_a},
              {"dim_b", config.dim_b},
              {"concealment", concealment},
              {"cheat_path", concealment <= attack::kConcealmentThreshold ? "exact" : "optimal"},
              {"cheat_fidelity", cheat.cheat_fidelity},
              {"degenerate_blocks", cheat.degenerate_blocks},
              {"cheat_unitary", report::matrix_json(cheat.cheat_unitary)},
              {"binding_residual", binding.residual},
              {"binding_defeated", binding.success}};

    std::string rendered;
    if (config.format == "text") {
      std::ostringstream text;
      text << "concealment: " << concealment << "\n"
           << "cheat fidelity: " << cheat.cheat_fidelity << "\n"
           << "binding residual: " << binding.residual << "\n"
           << "cheat unitary:\n";
      for (linalg::Index i = 0; i < cheat.cheat_unitary.rows(); ++i) {
        for (linalg::Index j = 0; j < cheat.cheat_unitary.cols(); ++j) {
          text << "  (" << cheat.cheat_unitary(i, j).real() << ", "
               << cheat.cheat_unitary(i, j).imag() << ")";
        }
        text << "\n";
      }
      rendered = text.str();
    } else {
      rendered = report::canonical_json(body);
    }
    return emit(rendered, config.output_path, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_abl_table(const AblConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const abl::VaaFixture& fx = abl::VaaFixture::standard();
    const std::array<std::string, 3> axes{"sx", "sy", "sz"};

    // Custom pre-state: plain probabilities, no PASS/FAIL claims.
    if (!config.pre_path.empty()) {
      linalg::Vector pre_amps = read_state_file(config.pre_path);
      linalg::StateVector pre({2, 2}, pre_amps);
      json rows = json::array();
      std::ostringstream text;
      for (int k = 0; k < 4; ++k) {
        for (int axis = 0; axis < 3; ++axis) {
          if (!config.post.empty() && config.post != "r" + std::to_string(k + 1)) continue;
          if (!config.obs.empty() && config.obs != axes[static_cast<std::size_t>(axis)]) continue;
          abl::PrePostContext ctx =
              abl::PrePostContext::on_factor(pre, fx.r_state(k), fx.spin(axis), 1);
          auto dist = abl_distribution(ctx);
          json cell{{"post", "r" + std::to_string(k + 1)},
                    {"obs", axes[static_cast<std::size_t>(axis)]}};
          text << "r" << (k + 1) << " " << axes[static_cast<std::size_t>(axis)] << ":";
          for (const auto& [label, p] : dist) {
            cell[label] = p;
            text << "  " << label << " " << p;
          }
          text << "\n";
          rows.push_back(std::move(cell));
        }
      }
      std::string rendered = (config.format == "json")
                                 ? report::canonical_json(json{{"cells", rows}})
                                 : text.str();
      out << rendered;
      return kExitSuccess;
    }

    const abl::VaaTable& reference = abl::vaa_reference_table();
    json cells = json::array();
    std::ostringstream text;
    int failures = 0;
    text << "post     sx          sy          sz\n";
    for (int k = 0; k < 4; ++k) {
      if (!config.post.empty() && config.post != "r" + std::to_string(k + 1)) continue;
      text << "r" << (k + 1) << "   ";
      for (int axis = 0; axis < 3; ++axis) {
        if (!config.obs.empty() && config.obs != axes[static_cast<std::size_t>(axis)]) continue;
        abl::PrePostContext ctx = fx.context(k, axis);
        auto dist = abl_distribution(ctx);
        std::string certain;
        double certain_p = 0.0;
        for (const auto& [label, p] : dist) {
          if (p > certain_p) {
            certain = label;
            certain_p = p;
          }
        }
        bool pass = certain_p >= 1.0 - 1e-10 &&
                    certain == reference[static_cast<std::size_t>(k)][static_cast<std::size_t>(axis)];
        if (!pass) ++failures;
        cells.push_back({{"post", "r" + std::to_string(k + 1)},
                         {"obs", axes[static_cast<std::size_t>(axis)]},
                         {"outcome", certain},
                         {"probability", certain_p},
                         {"pass", pass}});
        char cell[32];
        std::snprintf(cell, sizeof(cell), " %s(%s)", certain.c_str(), pass ? "PASS" : "FAIL");
        text << cell << "   ";
      }
      text << "\n";
    }
    text << (failures == 0 ? "all cells PASS\n" : std::to_string(failures) + " cells FAIL\n");

    if (config.format == "json") {
      out << report::canonical_json(
          json{{"tool", tool_json()}, {"cells", cells}, {"failures", failures}});
    } else {
      out << text.str();
    }
    return kExitSuccess;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace qbc::cli
