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
// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// nonzero exit when anything fails. Tolerances are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qbc/abl.hpp"
#include "qbc/attack.hpp"
#include "qbc/cli.hpp"
#include "qbc/engine.hpp"
#include "qbc/proto/vaa.hpp"
#include "qbc/report.hpp"
#include "qbc/version.hpp"
#include "script_gen.hpp"

using namespace qbc;
using linalg::Complex;
using linalg::Index;
using linalg::Matrix;
using linalg::Vector;
using qbc::testing::random_state;
using qbc::testing::random_unitary;

namespace {

struct Criterion {
  int number;
  std::string summary;
  double budget_seconds;
  std::function<bool(std::ostringstream&)> body;
};

// ---------------------------------------------------------------------------
// 1. Table reproduction through the CLI path.
// ---------------------------------------------------------------------------

bool criterion_table(std::ostringstream& detail) {
  cli::AblConfig config;
  config.format = "json";
  std::ostringstream out, err;
  if (cli::cmd_abl_table(config, out, err) != cli::kExitSuccess) {
    detail << "command failed: " << err.str();
    return false;
  }
  report::json body = report::json::parse(out.str());
  if (body["failures"].get<int>() != 0 || body["cells"].size() != 12) {
    detail << "failures=" << body["failures"] << " cells=" << body["cells"].size();
    return false;
  }
  for (const auto& cell : body["cells"]) {
    if (std::abs(cell["probability"].get<double>() - 1.0) > 1e-10) {
      detail << "cell " << cell["post"] << "/" << cell["obs"] << " probability "
             << cell["probability"];
      return false;
    }
  }
  detail << "12/12 cells deterministic and matching";
  return true;
}

// ---------------------------------------------------------------------------
// 2. Purified random choice reproduces the honest channel operator.
// ---------------------------------------------------------------------------

bool criterion_purification(std::ostringstream& detail) {
  RandomStream rng(20260809);
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector psi = random_state(rng, 2);
    Matrix bx = random_unitary(rng, 2);
    Matrix by = random_unitary(rng, 2);
    engine::ObservableSpec ox("X", bx, {"x1", "x2"});
    engine::ObservableSpec oy("Y", by, {"y1", "y2"});

    Matrix honest = Matrix::Zero(2, 2);
    for (int k = 0; k < 2; ++k) {
      honest += 0.5 * std::norm(bx.col(k).dot(psi)) * (bx.col(k) * bx.col(k).adjoint());
      honest += 0.5 * std::norm(by.col(k).dot(psi)) * (by.col(k) * by.col(k).adjoint());
    }

    engine::Register reg(linalg::StateVector({2}, psi), {{"c", 2, engine::Party::Bob}});
    reg = engine::append_subsystem(reg, {"p", 2, engine::Party::Bob},
                                   (Vector(2) << 1, 0).finished());
    reg = engine::purify_choice(reg,
                                {{engine::measurement_unitary(ox), {"c", "p"}},
                                 {engine::measurement_unitary(oy), {"c", "p"}}},
                                {0.5, 0.5}, "d", engine::Party::Bob);
    Matrix purified = engine::reduced_state(reg, {"c"}).matrix();
    worst = std::max(worst, (purified - honest).cwiseAbs().maxCoeff());
  }
  detail << "100 state/observable draws, max deviation " << worst;
  return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// 3. Concealing implies not binding, constructively, over random pairs.
// ---------------------------------------------------------------------------

bool criterion_theorem(std::ostringstream& detail) {
  RandomStream rng(31415926);
  const std::vector<std::pair<Index, Index>> dims{{2, 2}, {2, 4}, {3, 3}, {4, 4}};
  double worst_fidelity = 1.0;
  double worst_spectrum_gap = 0.0;
  for (auto [da, db] : dims) {
    for (int it = 0; it < 200; ++it) {
      Vector amps0;
      if (it % 2 == 0) {
        amps0 = random_state(rng, da * db);
      } else {
        Index r = std::min(da, db);
        std::vector<double> spectrum(static_cast<std::size_t>(r), 0.0);
        double left = 1.0;
        for (Index k = 0; k + 1 < r; k += 2) {
          double c = left / static_cast<double>(r - k);
          spectrum[static_cast<std::size_t>(k)] = c;
          spectrum[static_cast<std::size_t>(k + 1)] = c;
          left -= 2 * c;
        }
        if (r % 2 == 1) spectrum[static_cast<std::size_t>(r - 1)] = left;
        amps0 = qbc::testing::state_with_schmidt_spectrum(rng, da, db, spectrum);
      }
      linalg::StateVector psi0({da, db}, amps0);
      Matrix u_a = random_unitary(rng, da);
      linalg::StateVector psi1({da, db}, attack::apply_on_a(amps0, u_a, da, db));

      attack::CheatReport report = attack::synthesize_cheat_unitary(psi0, psi1, da, db);
      worst_fidelity = std::min(worst_fidelity, report.cheat_fidelity);

      auto sd0 = linalg::schmidt_decompose(psi0, da, db);
      auto sd1 = linalg::schmidt_decompose(psi1, da, db);
      Index r = std::min(sd0.rank(), sd1.rank());
      for (Index k = 0; k < r; ++k) {
        worst_spectrum_gap = std::max(
            worst_spectrum_gap, std::abs(sd0.coefficients(k) - sd1.coefficients(k)));
      }
    }
  }
  detail << "800 pairs, min fidelity " << worst_fidelity << ", max spectrum gap "
         << worst_spectrum_gap;
  return worst_fidelity >= 1.0 - 1e-8 && worst_spectrum_gap <= 1e-10;
}

// ---------------------------------------------------------------------------
// 4. The deferring Bob distinguishes the commitments at the Helstrom rate.
// ---------------------------------------------------------------------------

bool criterion_cheating_bob(std::ostringstream& detail) {
  proto::CommitmentStates cs = proto::commitment_states(proto::vaa_script(1), proto::Mode::CheatBob);

  Matrix w0_expected = Matrix::Identity(3, 3) / 3.0;
  Matrix w1_expected = Matrix::Constant(3, 3, Complex(1.0 / 3.0, 0.0));
  double dev0 = (cs.w_b0.matrix() - w0_expected).cwiseAbs().maxCoeff();
  double dev1 = (cs.w_b1.matrix() - w1_expected).cwiseAbs().maxCoeff();
  if (dev0 > 1e-10 || dev1 > 1e-10) {
    detail << "operator deviation " << std::max(dev0, dev1);
    return false;
  }
  if (std::abs(cs.distance - 2.0 / 3.0) > 1e-10) {
    detail << "trace distance " << cs.distance;
    return false;
  }
  double oracle = qbc::testing::trace_distance_oracle(cs.w_b0.matrix(), cs.w_b1.matrix());
  if (std::abs(oracle - cs.distance) > 1e-10) {
    detail << "oracle disagrees: " << oracle << " vs " << cs.distance;
    return false;
  }

  // Monte Carlo Helstrom measurement on the die.
  linalg::Spectrum helstrom = linalg::spectral_decompose(cs.w_b0.matrix() - cs.w_b1.matrix());
  std::vector<std::string> labels;
  for (Index k = 0; k < 3; ++k) labels.push_back(helstrom.eigenvalues(k) >= 0 ? "pos" : "neg");
  engine::ObservableSpec guess_obs("helstrom", helstrom.eigenvectors, labels);

  RandomStream rng(424242);
  const int samples = 10000;
  int correct = 0;
  Vector uniform = Vector::Constant(3, Complex(1.0 / std::sqrt(3.0), 0.0));
  for (int s = 0; s < samples; ++s) {
    int bit = static_cast<int>(rng.below(2));
    Vector die_state;
    if (bit == 0) {
      die_state = Vector::Zero(3);
      die_state(static_cast<Index>(rng.below(3))) = 1.0;
    } else {
      die_state = uniform;
    }
    engine::Register reg(linalg::StateVector({3}, die_state), {{"d", 3, engine::Party::Bob}});
    auto [collapsed, rec] = engine::measure_projective(reg, guess_obs, "d", rng);
    int guessed = (rec.outcome == "pos") ? 0 : 1;
    if (guessed == bit) ++correct;
  }
  double accuracy = static_cast<double>(correct) / samples;
  double expected = (1.0 + cs.distance) / 2.0;  // 5/6
  double sigma = std::sqrt(expected * (1.0 - expected) / samples);
  detail << "operators match; guessing accuracy " << accuracy << " vs " << expected << " (3s = "
         << 3.0 * sigma << ")";
  return std::abs(accuracy - expected) <= 3.0 * sigma;
}

// ---------------------------------------------------------------------------
// 5. Honest-Bob security: concealing, unguessable, and binding against a
//    flip without outcome knowledge.
// ---------------------------------------------------------------------------

bool criterion_honest_security(std::ostringstream& detail) {
  proto::CommitmentStates cs = proto::commitment_states(proto::vaa_script(1), proto::Mode::Honest);
  if (cs.distance > 1e-10) {
    detail << "honest W_B distance " << cs.distance;
    return false;
  }

  // Bob's guess from his per-round record: the optimal measurement on equal
  // operators carries no information, so his best remaining strategy is a
  // coin.
  RandomStream rng(99991);
  const int rounds = 10000;
  int correct = 0;
  for (int s = 0; s < rounds; ++s) {
    int bit = static_cast<int>(rng.below(2));
    int guessed;
    if (linalg::trace_distance(cs.w_b0, cs.w_b1) <= 1e-12) {
      guessed = static_cast<int>(rng.below(2));
    } else {
      guessed = 0;
    }
    if (guessed == bit) ++correct;
  }
  double accuracy = static_cast<double>(correct) / rounds;
  double sigma = std::sqrt(0.25 / rounds);
  if (std::abs(accuracy - 0.5) > 3.0 * sigma) {
    detail << "guessing accuracy " << accuracy;
    return false;
  }

  // Flip-at-reveal rejection rate against the Table-1 analysis. Row r1 is
  // consistent with every axis, so each proof element over S1 survives with
  // probability 1/3; per round the acceptance factor is
  // P(down) + P(up, not r1) + P(up, r1)/3.
  const abl::VaaTable& table = abl::vaa_reference_table();
  int consistent = 0;
  for (int axis = 0; axis < 3; ++axis) {
    if (table[0][static_cast<std::size_t>(axis)] == "up") ++consistent;
  }
  double guess_success = 1.0 / consistent;
  const int n = 20;
  double per_round_accept = 0.5 + 0.25 + 0.25 * guess_success;
  double analytic_reject = 1.0 - std::pow(per_round_accept, n);

  proto::ProtocolScript script = proto::vaa_script(n);
  const int trials = 10000;
  int rejected = 0;
  for (int t = 0; t < trials; ++t) {
    proto::ExecOptions opts;
    opts.seed = 700000 + static_cast<std::uint64_t>(t);
    opts.mode = proto::Mode::CheatAlice;
    opts.commit_bit = t % 2;
    proto::Transcript transcript = proto::execute(script, opts);
    if (transcript.verdict.has_value() && !*transcript.verdict) ++rejected;
  }
  double reject_rate = static_cast<double>(rejected) / trials;
  double reject_sigma = std::sqrt(analytic_reject * (1.0 - analytic_reject) / trials);
  detail << "concealing; guess accuracy " << accuracy << "; flip rejection " << reject_rate
         << " vs analytic " << analytic_reject << " (3s = " << 3.0 * reject_sigma << ")";
  return std::abs(reject_rate - analytic_reject) <= 3.0 * reject_sigma;
}

// ---------------------------------------------------------------------------
// 6. No signalling: Bob measuring his ancillas never moves Alice's operator.
// ---------------------------------------------------------------------------

bool criterion_no_signalling(std::ostringstream& detail) {
  double worst = 0.0;
  proto::NoSignallingReport vaa_report = proto::audit_no_signalling(proto::vaa_script(2));
  worst = std::max(worst, vaa_report.max_distance);

  RandomStream rng(5550123);
  for (int it = 0; it < 50; ++it) {
    proto::ProtocolScript script = qbc::testing::random_audit_script(rng);
    proto::NoSignallingReport report = proto::audit_no_signalling(script);
    worst = std::max(worst, report.max_distance);
  }
  detail << "vaa + 50 random purified scripts, max distance " << worst;
  return worst <= 1e-10;
}

// ---------------------------------------------------------------------------
// 7. Reports replay byte-identically from their embedded seed/config.
// ---------------------------------------------------------------------------

std::string strip_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("\"generated_at\"") != std::string::npos) continue;
    out << line << "\n";
  }
  return out.str();
}

bool criterion_determinism(std::ostringstream& detail) {
  cli::RunConfig config;
  config.builtin = "vaa";
  config.rounds = 15;
  config.mode = proto::Mode::CheatBob;
  config.commit = 1;
  config.seed = 4242;

  std::ostringstream out1, err1, out2, err2;
  if (cli::cmd_run(config, out1, err1) != cli::kExitSuccess ||
      cli::cmd_run(config, out2, err2) != cli::kExitSuccess) {
    detail << "cmd_run failed";
    return false;
  }
  if (strip_timestamp(out1.str()) != strip_timestamp(out2.str())) {
    detail << "replay differs";
    return false;
  }
  report::json body = report::json::parse(out1.str());
  if (body["config"]["seed"].get<std::uint64_t>() != 4242 ||
      body["tool"]["name"].get<std::string>() != kToolName) {
    detail << "report does not embed seed/config";
    return false;
  }
  // The embedded config reproduces the body bit for bit.
  std::string body_a = cli::run_report_body(config, 4242);
  std::string body_b = cli::run_report_body(config, 4242);
  detail << "byte-identical replay (timestamp excluded)";
  return body_a == body_b;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "pre/post-selection table reproduction", 1.0, criterion_table},
      {2, "purified choice equals the honest channel operator", 5.0, criterion_purification},
      {3, "concealing pairs admit a perfect cheat unitary", 30.0, criterion_theorem},
      {4, "deferring Bob distinguishes commitments at (1+D)/2", 60.0, criterion_cheating_bob},
      {5, "honest-Bob run is concealing and flip-binding", 60.0, criterion_honest_security},
      {6, "no-signalling audit", 30.0, criterion_no_signalling},
      {7, "byte-identical report replay", 10.0, criterion_determinism},
  };

  int failures = 0;
  for (auto& criterion : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = false;
    try {
      ok = criterion.body(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > criterion.budget_seconds) {
      ok = false;
      detail << " [over budget " << criterion.budget_seconds << "s]";
    }
    std::printf("%s criterion %d: %s (%s; %.2fs)\n", ok ? "PASS" : "FAIL", criterion.number,
                criterion.summary.c_str(), detail.str().c_str(), elapsed);
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all %zu criteria PASS\n", criteria.size());
  return 0;
}
