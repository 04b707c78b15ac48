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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbc/abl.hpp"
#include "qbc/attack.hpp"
#include "qbc/engine.hpp"
#include "qbc/linalg.hpp"
#include "qbc/proto/compile.hpp"
#include "qbc/proto/parser.hpp"
#include "qbc/proto/vaa.hpp"
#include "qbc/report.hpp"
#include "qbc/version.hpp"

namespace py = pybind11;
using namespace qbc;

namespace {

linalg::StateVector make_state(const linalg::Vector& amplitudes, linalg::Index dim_a,
                               linalg::Index dim_b) {
  return linalg::StateVector({dim_a, dim_b}, amplitudes);
}

engine::Register make_register(const linalg::Vector& amplitudes,
                               const std::vector<std::tuple<std::string, linalg::Index,
                                                            std::string>>& subsystems) {
  std::vector<engine::Subsystem> subs;
  std::vector<linalg::Index> dims;
  for (const auto& [label, dim, owner] : subsystems) {
    subs.push_back({label, dim, engine::party_from_string(owner)});
    dims.push_back(dim);
  }
  return engine::Register(linalg::StateVector(dims, amplitudes), subs);
}

}  // namespace

PYBIND11_MODULE(_qbclab, m) {
  m.doc() = "Two-party quantum bit-commitment simulator and EPR-attack toolkit";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "QbcError");

  // ----------------------------------------------------------------- linalg
  m.def(
      "tensor_product",
      [](const linalg::Matrix& a, const linalg::Matrix& b) { return linalg::tensor_product(a, b); },
      py::arg("a"), py::arg("b"),
      "Kronecker product, left operand slowest-varying.");
  m.def(
      "partial_trace",
      [](const linalg::Matrix& rho, const std::vector<linalg::Index>& dims,
         const std::vector<linalg::Index>& keep) {
        return linalg::partial_trace(rho, dims, keep);
      },
      py::arg("rho"), py::arg("dims"), py::arg("keep"));
  m.def(
      "trace_distance",
      [](const linalg::Matrix& rho, const linalg::Matrix& sigma) {
        return linalg::trace_distance(rho, sigma);
      },
      py::arg("rho"), py::arg("sigma"));

  py::class_<linalg::SchmidtDecomposition>(m, "SchmidtDecomposition")
      .def_readonly("coefficients", &linalg::SchmidtDecomposition::coefficients)
      .def_readonly("basis_a", &linalg::SchmidtDecomposition::basis_a)
      .def_readonly("basis_b", &linalg::SchmidtDecomposition::basis_b)
      .def_readonly("degenerate_blocks", &linalg::SchmidtDecomposition::degenerate_blocks)
      .def("reconstruct", &linalg::SchmidtDecomposition::reconstruct);
  m.def(
      "schmidt_decompose",
      [](const linalg::Vector& psi, linalg::Index dim_a, linalg::Index dim_b) {
        return linalg::schmidt_decompose(make_state(psi, dim_a, dim_b), dim_a, dim_b);
      },
      py::arg("psi"), py::arg("dim_a"), py::arg("dim_b"));

  py::class_<linalg::Spectrum>(m, "Spectrum")
      .def_readonly("eigenvalues", &linalg::Spectrum::eigenvalues)
      .def_readonly("eigenvectors", &linalg::Spectrum::eigenvectors)
      .def_readonly("degenerate_blocks", &linalg::Spectrum::degenerate_blocks);
  m.def(
      "spectral_decompose",
      [](const linalg::Matrix& rho) { return linalg::spectral_decompose(rho); }, py::arg("rho"));

  // ----------------------------------------------------------------- engine
  py::class_<engine::ObservableSpec>(m, "Observable")
      .def(py::init<std::string, linalg::Matrix, std::vector<std::string>>(), py::arg("label"),
           py::arg("eigenbasis"), py::arg("column_labels"))
      .def_property_readonly("label", &engine::ObservableSpec::label)
      .def_property_readonly("outcomes", &engine::ObservableSpec::outcomes)
      .def_property_readonly("eigenbasis", &engine::ObservableSpec::eigenbasis)
      .def("projector", &engine::ObservableSpec::projector, py::arg("outcome"));
  m.def("sigma_x", &engine::sigma_x);
  m.def("sigma_y", &engine::sigma_y);
  m.def("sigma_z", &engine::sigma_z);

  py::class_<engine::MeasurementRecord>(m, "MeasurementRecord")
      .def_readonly("subsystem", &engine::MeasurementRecord::subsystem)
      .def_readonly("observable", &engine::MeasurementRecord::observable)
      .def_readonly("outcome", &engine::MeasurementRecord::outcome)
      .def_readonly("outcome_index", &engine::MeasurementRecord::outcome_index)
      .def_readonly("probability", &engine::MeasurementRecord::probability);

  py::class_<engine::Register>(m, "Register")
      .def(py::init(&make_register), py::arg("amplitudes"), py::arg("subsystems"),
           "subsystems: list of (label, dim, owner) with owner alice/bob/channel")
      .def_property_readonly("amplitudes",
                             [](const engine::Register& reg) { return reg.state().amplitudes(); })
      .def_property_readonly("dims",
                             [](const engine::Register& reg) { return reg.state().dims(); })
      .def_property_readonly("labels",
                             [](const engine::Register& reg) {
                               std::vector<std::string> out;
                               for (const auto& sub : reg.subsystems()) out.push_back(sub.label);
                               return out;
                             })
      .def("apply_unitary",
           [](const engine::Register& reg, const linalg::Matrix& u,
              const std::vector<std::string>& targets) {
             return engine::apply_unitary(reg, u, targets);
           })
      .def("outcome_probabilities",
           [](const engine::Register& reg, const engine::ObservableSpec& obs,
              const std::vector<std::string>& targets) {
             return engine::outcome_probabilities(reg, obs, targets);
           })
      .def("measure",
           [](const engine::Register& reg, const engine::ObservableSpec& obs,
              const std::vector<std::string>& targets, std::uint64_t seed) {
             RandomStream rng(seed);
             return engine::measure_projective(reg, obs, targets, rng);
           })
      .def("project_outcome",
           [](const engine::Register& reg, const engine::ObservableSpec& obs,
              const std::vector<std::string>& targets, linalg::Index outcome) {
             return engine::project_outcome(reg, obs, targets, outcome);
           })
      .def("purify_measurement",
           [](const engine::Register& reg, const engine::ObservableSpec& obs,
              const std::vector<std::string>& targets, const std::string& pointer,
              const std::string& owner) {
             return engine::purify_measurement(reg, obs, targets, pointer,
                                               engine::party_from_string(owner));
           })
      .def("purify_choice",
           [](const engine::Register& reg,
              const std::vector<std::pair<linalg::Matrix, std::vector<std::string>>>& branches,
              const std::vector<double>& weights, const std::string& die,
              const std::string& owner) {
             std::vector<engine::ChoiceBranch> items;
             for (const auto& [u, targets] : branches) items.push_back({u, targets});
             return engine::purify_choice(reg, items, weights, die,
                                          engine::party_from_string(owner));
           })
      .def("reduced_state",
           [](const engine::Register& reg, const std::vector<std::string>& labels) {
             return engine::reduced_state(reg, labels).matrix();
           })
      .def("reduced_state_of",
           [](const engine::Register& reg, const std::string& owner) {
             return engine::reduced_state(reg, engine::party_from_string(owner)).matrix();
           });
  m.def("measurement_unitary", &engine::measurement_unitary, py::arg("observable"));

  // ----------------------------------------------------------------- attack
  py::class_<attack::CheatReport>(m, "CheatReport")
      .def_readonly("concealment", &attack::CheatReport::concealment)
      .def_readonly("cheat_unitary", &attack::CheatReport::cheat_unitary)
      .def_readonly("cheat_fidelity", &attack::CheatReport::cheat_fidelity)
      .def_readonly("degenerate_blocks", &attack::CheatReport::degenerate_blocks);
  py::class_<attack::BindingCheck>(m, "BindingCheck")
      .def_readonly("success", &attack::BindingCheck::success)
      .def_readonly("residual", &attack::BindingCheck::residual);

  m.def(
      "concealment",
      [](const linalg::Vector& psi0, const linalg::Vector& psi1, linalg::Index dim_a,
         linalg::Index dim_b) {
        return attack::concealment(make_state(psi0, dim_a, dim_b), make_state(psi1, dim_a, dim_b),
                                   dim_a, dim_b);
      },
      py::arg("psi0"), py::arg("psi1"), py::arg("dim_a"), py::arg("dim_b"));
  m.def(
      "synthesize_cheat_unitary",
      [](const linalg::Vector& psi0, const linalg::Vector& psi1, linalg::Index dim_a,
         linalg::Index dim_b) {
        return attack::synthesize_cheat_unitary(make_state(psi0, dim_a, dim_b),
                                                make_state(psi1, dim_a, dim_b), dim_a, dim_b);
      },
      py::arg("psi0"), py::arg("psi1"), py::arg("dim_a"), py::arg("dim_b"));
  m.def(
      "optimal_cheat_unitary",
      [](const linalg::Vector& psi0, const linalg::Vector& psi1, linalg::Index dim_a,
         linalg::Index dim_b) {
        return attack::optimal_cheat_unitary(make_state(psi0, dim_a, dim_b),
                                             make_state(psi1, dim_a, dim_b), dim_a, dim_b);
      },
      py::arg("psi0"), py::arg("psi1"), py::arg("dim_a"), py::arg("dim_b"));
  m.def(
      "verify_binding_failure",
      [](const attack::CheatReport& report, const linalg::Vector& psi0, const linalg::Vector& psi1,
         linalg::Index dim_a, linalg::Index dim_b) {
        return attack::verify_binding_failure(report, make_state(psi0, dim_a, dim_b),
                                              make_state(psi1, dim_a, dim_b));
      },
      py::arg("report"), py::arg("psi0"), py::arg("psi1"), py::arg("dim_a"), py::arg("dim_b"));

  // -------------------------------------------------------------------- abl
  m.def("vaa_table", [] {
    abl::VaaTable table = abl::vaa_table();
    std::vector<std::vector<std::string>> out;
    for (const auto& row : table) out.emplace_back(row.begin(), row.end());
    return out;
  });
  m.def("bell_rewrite_check", [] {
    abl::RewriteCheck check = abl::bell_rewrite_check();
    return py::make_tuple(check.ok, check.failing_identity);
  });
  m.def(
      "abl_probability",
      [](const linalg::Vector& pre, const linalg::Vector& post,
         const engine::ObservableSpec& obs, std::size_t factor, const std::string& outcome) {
        linalg::Index n = pre.size();
        linalg::Index half = obs.dim();
        std::vector<linalg::Index> dims{half, n / half};
        if (factor == 1) std::swap(dims[0], dims[1]);
        abl::PrePostContext ctx = abl::PrePostContext::on_factor(
            linalg::StateVector(dims, pre), linalg::StateVector(dims, post), obs, factor);
        return abl::abl_probability(ctx, outcome);
      },
      py::arg("pre"), py::arg("post"), py::arg("observable"), py::arg("factor"),
      py::arg("outcome"),
      "Pre/post-selected probability of an intermediate outcome on one factor "
      "of a two-factor system.");

  // ----------------------------------------------------------------- proto
  py::class_<proto::ProtocolScript>(m, "Script")
      .def_property_readonly("builtin",
                             [](const proto::ProtocolScript& s) { return s.builtin; })
      .def_property_readonly("rounds", [](const proto::ProtocolScript& s) { return s.rounds; })
      .def("source", [](const proto::ProtocolScript& s) { return proto::to_source(s); });

  m.def("parse", &proto::parse, py::arg("source"));
  m.def("builtin_script", &proto::builtin_script, py::arg("name"), py::arg("rounds") = 1);
  m.def("vaa_source", &proto::vaa_source, py::arg("rounds"));
  m.def(
      "purify",
      [](const proto::ProtocolScript& script, const std::string& party) {
        return proto::purify(script, engine::party_from_string(party)).script;
      },
      py::arg("script"), py::arg("party"));
  m.def(
      "execute",
      [](const proto::ProtocolScript& script, std::uint64_t seed, const std::string& mode,
         int commit, bool flip_reveal) {
        proto::ExecOptions opts{seed, proto::mode_from_string(mode), commit, flip_reveal};
        proto::Transcript transcript = proto::execute(script, opts);
        return report::canonical_json(report::transcript_json(transcript));
      },
      py::arg("script"), py::arg("seed") = 0, py::arg("mode") = "honest", py::arg("commit") = 0,
      py::arg("flip_reveal") = false,
      "Runs the script and returns the transcript as canonical JSON text.");
  m.def(
      "commitment_states",
      [](const proto::ProtocolScript& script, const std::string& mode) {
        proto::CommitmentStates cs =
            proto::commitment_states(script, proto::mode_from_string(mode));
        py::dict out;
        out["psi0"] = cs.psi0.amplitudes();
        out["psi1"] = cs.psi1.amplitudes();
        out["dim_a"] = cs.dim_a;
        out["dim_b"] = cs.dim_b;
        out["w_b0"] = cs.w_b0.matrix();
        out["w_b1"] = cs.w_b1.matrix();
        out["distance"] = cs.distance;
        return out;
      },
      py::arg("script"), py::arg("mode") = "honest");
  m.def(
      "audit_no_signalling",
      [](const proto::ProtocolScript& script) {
        proto::NoSignallingReport report = proto::audit_no_signalling(script);
        py::dict out;
        out["ok"] = report.ok;
        out["max_distance"] = report.max_distance;
        out["per_component"] = report.per_component;
        return out;
      },
      py::arg("script"));
}
