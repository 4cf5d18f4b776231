// Copyright 2026 The hybridnv Authors
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

#include "hybridnv/io.hpp"

#include "hybridnv/errors.hpp"

namespace hybridnv {
namespace {

std::string transition_name(Transition t) { return t == Transition::logical0 ? "U-0" : "U-1"; }

Transition transition_from(const std::string& s) {
  if (s == "U-0") return Transition::logical0;
  if (s == "U-1") return Transition::logical1;
  throw ValidationError("drives.transition: expected \"U-0\" or \"U-1\", got \"" + s + "\"");
}

template <typename T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string(key) + ": missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string(key) + ": wrong type");
  }
}

}  // namespace

Json device_to_json(const DeviceParams& p) {
  Json j = Json::object();
  for (const auto& f : param_fields()) j[f.name] = p.*f.member / f.to_angular;
  j["n_max"] = p.n_max;
  return j;
}

Json device_angular_to_json(const DeviceParams& p) {
  Json j = Json::object();
  for (const auto& f : param_fields()) {
    std::string name = f.name;
    name = name.substr(0, name.find("_over_2pi")) + "_rad_per_ns";
    j[name] = p.*f.member;
  }
  return j;
}

DeviceParams device_from_json(const Json& j, DeviceParams base) {
  if (!j.is_object()) throw ValidationError("device: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "n_max") {
      if (!it.value().is_number_integer()) throw ValidationError("device.n_max: expected an integer");
      base.n_max = it.value().get<int>();
      continue;
    }
    const ParamField* field = nullptr;
    try {
      field = &param_field(it.key());
    } catch (const ValidationError&) {
      throw ValidationError("device." + it.key() + ": unknown field");
    }
    if (!it.value().is_number()) throw ValidationError("device." + it.key() + ": expected a number");
    base.*field->member = it.value().get<double>() * field->to_angular;
  }
  return base;
}

Json segment_to_json(const ControlSegment& s) {
  Json j;
  j["duration_ns"] = s.duration;
  j["g_over_2pi_GHz"] = s.spq_coupling / kTwoPi;
  j["nve1_freq_over_2pi_GHz"] = s.nve1_freq / kTwoPi;
  j["nve2_freq_over_2pi_GHz"] = s.nve2_freq / kTwoPi;
  Json drives = Json::array();
  for (const auto& d : s.drives) {
    drives.push_back({{"target", d.target},
                      {"transition", transition_name(d.transition)},
                      {"rabi_over_2pi_MHz", d.rabi / (kTwoPi * 1e-3)},
                      {"phase_rad", d.phase},
                      {"rabi_rad_per_ns", d.rabi}});
  }
  j["drives"] = drives;
  j["step"] = s.step;
  j["label"] = s.label;
  j["angular"] = {{"g_rad_per_ns", s.spq_coupling},
                  {"nve1_freq_rad_per_ns", s.nve1_freq},
                  {"nve2_freq_rad_per_ns", s.nve2_freq}};
  return j;
}

ControlSegment segment_from_json(const Json& j) {
  ControlSegment s;
  s.duration = get<double>(j, "duration_ns");
  if (j.contains("angular")) {
    const Json& a = j.at("angular");
    s.spq_coupling = get<double>(a, "g_rad_per_ns");
    s.nve1_freq = get<double>(a, "nve1_freq_rad_per_ns");
    s.nve2_freq = get<double>(a, "nve2_freq_rad_per_ns");
  } else {
    s.spq_coupling = get<double>(j, "g_over_2pi_GHz") * kTwoPi;
    s.nve1_freq = get<double>(j, "nve1_freq_over_2pi_GHz") * kTwoPi;
    s.nve2_freq = get<double>(j, "nve2_freq_over_2pi_GHz") * kTwoPi;
  }
  if (j.contains("drives")) {
    for (const auto& d : j.at("drives")) {
      DriveSpec ds;
      ds.target = get<int>(d, "target");
      ds.transition = transition_from(get<std::string>(d, "transition"));
      ds.rabi = d.contains("rabi_rad_per_ns") ? get<double>(d, "rabi_rad_per_ns")
                                               : get<double>(d, "rabi_over_2pi_MHz") * kTwoPi * 1e-3;
      ds.phase = d.contains("phase_rad") ? get<double>(d, "phase_rad") : 0.0;
      s.drives.push_back(ds);
    }
  }
  if (j.contains("step")) s.step = get<int>(j, "step");
  if (j.contains("label")) s.label = get<std::string>(j, "label");
  return s;
}

Json timeline_to_json(const Timeline& tl) {
  Json segs = Json::array();
  for (const auto& s : tl.segments) segs.push_back(segment_to_json(s));
  return {{"name", tl.name}, {"total_duration_ns", tl.total_duration()}, {"segments", segs}};
}

Timeline timeline_from_json(const Json& j) {
  Timeline tl;
  if (j.contains("name")) tl.name = get<std::string>(j, "name");
  for (const auto& s : j.at("segments")) tl.segments.push_back(segment_from_json(s));
  return tl;
}

Json plan_to_json(const ProtocolPlan& formula, const ProtocolPlan& final_plan) {
  Json steps = Json::array();
  for (std::size_t i = 0; i < final_plan.steps.size(); ++i) {
    Json ops = Json::array();
    const auto& st = final_plan.steps[i];
    for (std::size_t o = 0; o < st.ops.size(); ++o) {
      const Operation& op = st.ops[o];
      const char* kind = op.kind == OperationKind::drive ? "drive" : op.kind == OperationKind::resonate ? "resonate" : "bridge";
      Json jo = {{"kind", kind},
                 {"area_pi", op.area},
                 {"formula_ns", formula.steps.at(i).ops.at(o).duration},
                 {"duration_ns", op.duration}};
      if (op.kind != OperationKind::bridge) jo["nve"] = op.nve;
      if (op.kind == OperationKind::drive) jo["transition"] = transition_name(op.transition);
      ops.push_back(jo);
    }
    steps.push_back({{"step", st.number}, {"duration_ns", st.duration()}, {"operations", ops}});
  }
  return {{"protocol", to_string(final_plan.id)},
          {"variant", final_plan.variant},
          {"formula_total_ns", formula.total_duration()},
          {"total_ns", final_plan.total_duration()},
          {"steps", steps}};
}

Json calibration_to_json(const CalibrationResult& r) {
  return {{"step", r.step},         {"op", r.op},
          {"segment", r.segment},   {"formula_ns", r.formula_ns},
          {"calibrated_ns", r.calibrated_ns}, {"transfer", r.transfer},
          {"ok", r.ok},             {"message", r.message}};
}

CalibrationResult calibration_from_json(const Json& j) {
  CalibrationResult r;
  r.step = get<int>(j, "step");
  r.op = get<int>(j, "op");
  r.segment = get<int>(j, "segment");
  r.formula_ns = get<double>(j, "formula_ns");
  r.calibrated_ns = get<double>(j, "calibrated_ns");
  r.transfer = get<double>(j, "transfer");
  r.ok = get<bool>(j, "ok");
  r.message = get<std::string>(j, "message");
  return r;
}

Json fidelity_to_json(const FidelityReport& r) {
  return {{"protocol", r.protocol},
          {"average_fidelity", r.average},
          {"theta_grid", r.grid},
          {"min", r.min},
          {"max", r.max},
          {"total_time_ns", r.total_time_ns},
          {"leakage", {{"max_photon2_population", r.leakage.max_photon2},
                       {"final_nontarget_population", r.leakage.final_nontarget}}},
          {"node_fidelities", r.node_fidelities}};
}

FidelityReport fidelity_from_json(const Json& j) {
  FidelityReport r;
  r.protocol = get<std::string>(j, "protocol");
  r.average = get<double>(j, "average_fidelity");
  r.grid = get<int>(j, "theta_grid");
  r.min = get<double>(j, "min");
  r.max = get<double>(j, "max");
  r.total_time_ns = get<double>(j, "total_time_ns");
  r.leakage.max_photon2 = get<double>(j.at("leakage"), "max_photon2_population");
  r.leakage.final_nontarget = get<double>(j.at("leakage"), "final_nontarget_population");
  r.node_fidelities = get<std::vector<double>>(j, "node_fidelities");
  return r;
}

Json matrix_to_json(const Matrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"real", re}, {"imag", im}};
}

Matrix matrix_from_json(const Json& j) {
  const auto re = get<std::vector<std::vector<double>>>(j, "real");
  const auto im = get<std::vector<std::vector<double>>>(j, "imag");
  if (re.size() != im.size()) throw ValidationError("matrix: real/imag shape mismatch");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = rows ? static_cast<Eigen::Index>(re[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(re[i].size()) != cols || im[i].size() != re[i].size()) {
      throw ValidationError("matrix: ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = cplx(re[i][k], im[i][k]);
  }
  return m;
}

Json density_to_json(const DensityMatrixReport& r) {
  Json j = {{"subsystems", r.subsystems}, {"labels", r.labels}, {"retained_weight", r.retained_weight}};
  const Json m = matrix_to_json(r.rho);
  j["real"] = m["real"];
  j["imag"] = m["imag"];
  return j;
}

Json schedule_to_json(const Lattice& lat, const LatticeSchedule& s) {
  Json rounds = Json::array();
  for (std::size_t r = 0; r < s.rounds.size(); ++r) {
    Json edges = Json::array();
    for (const auto& e : s.rounds[r]) {
      const auto ca = lat.coords(e.a), cb = lat.coords(e.b);
      std::vector<int> a1, b1;
      for (int c : ca) a1.push_back(c + 1);
      for (int c : cb) b1.push_back(c + 1);
      edges.push_back({{"a", a1}, {"b", b1}, {"axis", e.axis}, {"label", edge_label(lat, e)}});
    }
    rounds.push_back({{"round", r + 1}, {"axis", static_cast<int>(r / 2)}, {"edges", edges}});
  }
  return {{"dims", lat.dims()}, {"round_count", s.rounds.size()}, {"edge_count", lat.edges().size()}, {"rounds", rounds}};
}

}  // namespace hybridnv
