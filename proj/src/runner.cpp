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

#include "hybridnv/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hybridnv/errors.hpp"

#ifndef HYBRIDNV_CONFIG_DIR
#define HYBRIDNV_CONFIG_DIR "configs"
#endif
#ifndef HYBRIDNV_VERSION
#define HYBRIDNV_VERSION "0.0.0"
#endif

namespace hybridnv {
namespace fs = std::filesystem;

namespace {

std::string mode_name(Mode m) { return m == Mode::full ? "full" : "effective"; }
std::string method_name(Method m) { return m == Method::exact ? "exact" : "stepped"; }
std::string frame_name(FramePolicy f) { return f == FramePolicy::segment ? "segment" : "continuous"; }

Mode mode_from(const std::string& s) {
  if (s == "full") return Mode::full;
  if (s == "effective") return Mode::effective;
  throw ValidationError("mode: expected \"full\" or \"effective\", got \"" + s + "\"");
}

Method method_from(const std::string& s) {
  if (s == "exact") return Method::exact;
  if (s == "stepped") return Method::stepped;
  throw ValidationError("method: expected \"exact\" or \"stepped\", got \"" + s + "\"");
}

FramePolicy frame_from(const std::string& s) {
  if (s == "segment") return FramePolicy::segment;
  if (s == "continuous") return FramePolicy::continuous;
  throw ValidationError("frame: expected \"segment\" or \"continuous\", got \"" + s + "\"");
}

template <typename T>
T field(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(key + ": missing or wrong type");
  }
}

std::optional<double> optional_number(const Json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw ValidationError(key + ": expected a number");
  return j.at(key).get<double>();
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ValidationError("output.dir: cannot create \"" + dir + "\"");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ValidationError("output.dir: cannot write \"" + path.string() + "\"");
  os << text;
}

// Basis states with at most two excitations and at most one photon per
// resonator.
std::vector<int> tracked_states(const SubsystemLayout& layout) {
  const Eigen::VectorXd n = excitation_numbers(layout);
  std::vector<int> out;
  for (int i = 0; i < layout.total_dim(); ++i) {
    if (n(i) <= 2 && layout.digit(i, slot::kTlrA) <= 1 && layout.digit(i, slot::kTlrB) <= 1) out.push_back(i);
  }
  return out;
}

// Equal-weight superposition of the problem's basis inputs (alpha = beta =
// 1/sqrt2, or alpha = beta = gamma = delta = 1/2).
PureState checkpoint_input(const SubsystemLayout& layout, const FidelityProblem& problem) {
  Vector v = Vector::Zero(layout.total_dim());
  for (int i : problem.inputs) v(i) = 1.0;
  v /= v.norm();
  return PureState(v, Frame::interaction);
}

DensityMatrixReport checkpoint_density(const PureState& s, const SubsystemLayout& layout, const FidelityProblem& p) {
  return p.axes == 1 ? nve_pair_density(s, layout) : logical_spq_density(s, layout);
}

Json gate_to_json(const GateSummary& g) {
  return {{"target", g.target}, {"leakage", g.leakage}, {"metric", g.metric}, {"matrix", matrix_to_json(g.matrix)}};
}

}  // namespace

PropagationOptions RunConfig::propagation() const {
  PropagationOptions o;
  o.mode = mode;
  o.method = integrator_step_ns ? Method::stepped : method;
  o.max_step_ns = integrator_step_ns.value_or(0.0);
  o.frame = frame;
  return o;
}

DeviceParams RunConfig::resolved_params() const { return apply_overrides(params, protocol.overrides); }

void RunConfig::validate() const {
  resolved_params().validate();
  if (theta_grid < kMinThetaGrid) throw ValidationError("theta_grid: must be >= 9");
  if (integrator_step_ns && !(*integrator_step_ns > 0.0)) throw ValidationError("integrator_step_ns: must be > 0");
  if (output.samples < 2) throw ValidationError("output.samples: must be >= 2");
}

fs::path bundled_config_dir() {
  if (const char* env = std::getenv("HYBRIDNV_CONFIG_DIR")) return env;
  return HYBRIDNV_CONFIG_DIR;
}

std::vector<std::string> bundled_config_names() {
  return {"reference_state_transfer", "reference_cphase", "reference_cnot", "reference_fast_transfer"};
}

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  static const char* known[] = {"name", "protocol", "calibration", "mode", "method", "integrator_step_ns",
                                "frame", "theta_grid", "device", "overrides", "output", "expect", "description"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known)) {
      throw ValidationError(it.key() + ": unknown config field");
    }
  }
  RunConfig c;
  c.name = j.contains("name") ? field<std::string>(j, "name") : "unnamed";
  c.protocol.id = protocol_from_string(field<std::string>(j, "protocol"));
  if (j.contains("calibration")) c.protocol.policy = policy_from_string(field<std::string>(j, "calibration"));
  if (j.contains("mode")) c.mode = mode_from(field<std::string>(j, "mode"));
  if (j.contains("method")) c.method = method_from(field<std::string>(j, "method"));
  c.integrator_step_ns = optional_number(j, "integrator_step_ns");
  if (j.contains("frame")) c.frame = frame_from(field<std::string>(j, "frame"));
  if (j.contains("theta_grid")) {
    if (!j.at("theta_grid").is_number_integer()) throw ValidationError("theta_grid: expected an integer");
    c.theta_grid = j.at("theta_grid").get<int>();
  }
  if (!j.contains("device")) throw ValidationError("device: missing");
  c.params = device_from_json(j.at("device"));
  if (j.contains("overrides")) {
    for (auto it = j.at("overrides").begin(); it != j.at("overrides").end(); ++it) {
      if (!it.value().is_number()) throw ValidationError("overrides." + it.key() + ": expected a number");
      if (it.key() != "n_max") param_field(it.key());
      c.protocol.overrides[it.key()] = it.value().get<double>();
    }
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    static const char* out_known[] = {"dir", "trajectory_csv", "density_csv", "samples"};
    for (auto it = o.begin(); it != o.end(); ++it) {
      if (std::find(std::begin(out_known), std::end(out_known), it.key()) == std::end(out_known)) {
        throw ValidationError("output." + it.key() + ": unknown field");
      }
    }
    if (o.contains("dir")) c.output.dir = field<std::string>(o, "dir");
    if (o.contains("trajectory_csv")) c.output.trajectory_csv = field<bool>(o, "trajectory_csv");
    if (o.contains("density_csv")) c.output.density_csv = field<bool>(o, "density_csv");
    if (o.contains("samples")) c.output.samples = field<int>(o, "samples");
  }
  if (j.contains("expect")) {
    const Json& e = j.at("expect");
    c.expect.average_fidelity = optional_number(e, "average_fidelity");
    c.expect.fidelity_tolerance = optional_number(e, "fidelity_tolerance");
    c.expect.total_time_ns = optional_number(e, "total_time_ns");
    c.expect.total_time_rel_tolerance = optional_number(e, "total_time_rel_tolerance");
    c.expect.gate_metric_max = optional_number(e, "gate_metric_max");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path_or_name) {
  fs::path path = path_or_name;
  if (!fs::exists(path)) {
    const fs::path bundled = bundled_config_dir() / (path_or_name + ".json");
    if (!fs::exists(bundled)) throw ValidationError("config: no file or bundled config named \"" + path_or_name + "\"");
    path = bundled;
  }
  std::ifstream is(path);
  if (!is) throw ValidationError("config: cannot read \"" + path.string() + "\"");
  Json j;
  try {
    j = Json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

Json config_to_json(const RunConfig& c) {
  Json overrides = Json::object();
  for (const auto& [k, v] : c.protocol.overrides) overrides[k] = v;
  Json j;
  j["name"] = c.name;
  j["protocol"] = to_string(c.protocol.id);
  j["calibration"] = to_string(c.protocol.policy);
  j["mode"] = mode_name(c.mode);
  j["method"] = method_name(c.method);
  j["integrator_step_ns"] = optional_json(c.integrator_step_ns);
  j["frame"] = frame_name(c.frame);
  j["theta_grid"] = c.theta_grid;
  j["device"] = device_to_json(c.params);
  j["overrides"] = overrides;
  j["output"] = {{"dir", c.output.dir},
                 {"trajectory_csv", c.output.trajectory_csv},
                 {"density_csv", c.output.density_csv},
                 {"samples", c.output.samples}};
  j["expect"] = {{"average_fidelity", optional_json(c.expect.average_fidelity)},
                 {"fidelity_tolerance", optional_json(c.expect.fidelity_tolerance)},
                 {"total_time_ns", optional_json(c.expect.total_time_ns)},
                 {"total_time_rel_tolerance", optional_json(c.expect.total_time_rel_tolerance)},
                 {"gate_metric_max", optional_json(c.expect.gate_metric_max)}};
  return j;
}

bool RunReport::all_checks_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ThresholdCheck& c) { return c.pass; });
}

Json RunReport::to_json() const {
  Json cal = Json::array();
  for (const auto& r : calibration) cal.push_back(calibration_to_json(r));
  Json chk = Json::array();
  for (const auto& c : checks) {
    chk.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected}, {"tolerance", c.tolerance},
                   {"pass", c.pass}});
  }
  Json j;
  j["tool"] = tool;
  j["version"] = version;
  j["config"] = config;
  j["device_angular"] = device_angular;
  j["plan"] = plan;
  j["timeline"] = timeline_to_json(timeline);
  j["calibration"] = cal;
  j["optimized_fidelity"] = optional_json(optimized_fidelity);
  j["fidelity"] = fidelity_to_json(fidelity);
  j["gate"] = gate ? gate_to_json(*gate) : Json(nullptr);
  j["checks"] = chk;
  j["timing"] = {{"wall_seconds", wall_seconds}};
  return j;
}

RunReport RunReport::from_json(const Json& j) {
  RunReport r;
  r.tool = field<std::string>(j, "tool");
  r.version = field<std::string>(j, "version");
  r.config = j.at("config");
  r.device_angular = j.at("device_angular");
  r.plan = j.at("plan");
  r.timeline = timeline_from_json(j.at("timeline"));
  for (const auto& c : j.at("calibration")) r.calibration.push_back(calibration_from_json(c));
  r.optimized_fidelity = optional_number(j, "optimized_fidelity");
  r.fidelity = fidelity_from_json(j.at("fidelity"));
  if (!j.at("gate").is_null()) {
    const Json& g = j.at("gate");
    GateSummary s;
    s.target = field<std::string>(g, "target");
    s.leakage = field<double>(g, "leakage");
    s.metric = field<double>(g, "metric");
    s.matrix = matrix_from_json(g.at("matrix"));
    r.gate = s;
  }
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({field<std::string>(c, "name"), field<double>(c, "value"), field<double>(c, "expected"),
                        field<double>(c, "tolerance"), field<bool>(c, "pass")});
  }
  r.wall_seconds = field<double>(j.at("timing"), "wall_seconds");
  return r;
}

RunReport cmd_run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  ProtocolSpec spec = config.protocol;
  // The idealized generators reproduce the ket algebra at the formula durations.
  if (config.mode == Mode::effective) spec.policy = CalibrationPolicy::formula;
  const CompiledProtocol compiled = compile(config.params, spec);
  Propagator prop(compiled.params, config.propagation());

  RunReport r;
  r.version = HYBRIDNV_VERSION;
  r.config = config_to_json(config);
  r.device_angular = device_angular_to_json(compiled.params);
  r.plan = plan_to_json(compiled.formula_plan, compiled.plan);
  r.timeline = compiled.timeline;
  r.calibration = compiled.calibration;
  r.optimized_fidelity = compiled.optimized_fidelity;
  r.fidelity = evaluate_fidelity(prop, compiled.timeline, compiled.problem, config.theta_grid, true);
  if (config.protocol.id == ProtocolId::cphase || config.protocol.id == ProtocolId::cnot) {
    const LogicalGate g = extract_logical_gate(prop, compiled.timeline);
    const bool cp = config.protocol.id == ProtocolId::cphase;
    r.gate = GateSummary{cp ? "diag(1,1,-1,1)" : "zero-controlled NOT", g.matrix, g.leakage,
                         gate_metric(cp ? cphase_target() : cnot_target(), g.matrix)};
  }

  const Expectation& e = config.expect;
  if (e.average_fidelity) {
    const double tol = e.fidelity_tolerance.value_or(0.0);
    r.checks.push_back({"average_fidelity", r.fidelity.average, *e.average_fidelity, tol,
                        std::abs(r.fidelity.average - *e.average_fidelity) <= tol});
  }
  if (e.total_time_ns) {
    const double tol = e.total_time_rel_tolerance.value_or(0.0) * *e.total_time_ns;
    const double t = compiled.timeline.total_duration();
    r.checks.push_back({"total_time_ns", t, *e.total_time_ns, tol, std::abs(t - *e.total_time_ns) <= tol});
  }
  if (e.gate_metric_max && r.gate) {
    r.checks.push_back({"gate_metric", r.gate->metric, 0.0, *e.gate_metric_max, r.gate->metric <= *e.gate_metric_max});
  }

  if (!config.output.dir.empty()) {
    ensure_dir(config.output.dir);
    const fs::path dir = config.output.dir;
    const SubsystemLayout& layout = prop.layout();
    const PureState initial = checkpoint_input(layout, compiled.problem);
    if (config.output.trajectory_csv) {
      const Trajectory traj = prop.run(initial, compiled.timeline, {config.output.samples, tracked_states(layout)});
      std::ostringstream os;
      write_trajectory_csv(os, traj, layout);
      write_file(dir / "trajectory.csv", os.str());
    }
    if (config.output.density_csv) {
      const PureState final_state(prop.evolve(initial.amplitudes(), compiled.timeline), Frame::interaction, 1e-7);
      std::ostringstream a, b;
      write_density_csv(a, checkpoint_density(initial, layout, compiled.problem));
      write_density_csv(b, checkpoint_density(final_state, layout, compiled.problem));
      write_file(dir / "rho_initial.csv", a.str());
      write_file(dir / "rho_final.csv", b.str());
    }
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.output.dir.empty()) {
    write_file(fs::path(config.output.dir) / "report.json", r.to_json().dump(2) + "\n");
  }
  return r;
}

std::vector<CalibrationResult> cmd_calibrate(const RunConfig& config) {
  config.validate();
  const DeviceParams params = config.resolved_params();
  ProtocolSpec spec = config.protocol;
  spec.policy = CalibrationPolicy::calibrated;
  const CompiledProtocol compiled = compile(config.params, spec);
  if (!config.output.dir.empty()) {
    ensure_dir(config.output.dir);
    std::ostringstream csv;
    csv << "step,op,segment,formula_ns,calibrated_ns,transfer,ok,message\n" << std::setprecision(12);
    Json arr = Json::array();
    for (const auto& r : compiled.calibration) {
      csv << r.step << ',' << r.op << ',' << r.segment << ',' << r.formula_ns << ',' << r.calibrated_ns << ','
          << r.transfer << ',' << (r.ok ? "true" : "false") << ",\"" << r.message << "\"\n";
      arr.push_back(calibration_to_json(r));
    }
    write_file(fs::path(config.output.dir) / "calibration.csv", csv.str());
    write_file(fs::path(config.output.dir) / "calibration.json",
               Json({{"protocol", to_string(config.protocol.id)}, {"segments", arr}}).dump(2) + "\n");
  }
  (void)params;
  return compiled.calibration;
}

ClusterReport cmd_cluster(const std::vector<int>& dims, const std::optional<RunConfig>& gate_source,
                          const std::string& out_dir) {
  const Lattice lat(dims);
  const LatticeSchedule sched = schedule_lattice(lat);
  ClusterReport rep;
  rep.document = schedule_to_json(lat, sched);

  Eigen::Matrix4cd gate = cphase_target();
  std::string source = "ideal";
  if (gate_source) {
    RunConfig c = *gate_source;
    if (c.protocol.id != ProtocolId::cphase) throw ValidationError("protocol: cluster gate source must be a cphase config");
    c.validate();
    const CompiledProtocol compiled = compile(c.params, c.protocol);
    gate = extract_logical_gate(compiled.params, compiled.timeline, c.propagation()).matrix;
    source = c.name;
  }
  rep.document["gate"] = {{"source", source}, {"matrix", matrix_to_json(gate)}};

  if (lat.node_count() <= kClusterStateNodeCap) {
    double retained = 1.0;
    const LogicalState state = apply_schedule(prepare_plus_all(lat), sched, gate, kernels::Exec::parallel, &retained);
    rep.stabilizers = stabilizer_check(state, lat, kernels::Exec::parallel);
    rep.state_built = true;
    rep.document["stabilizers"] = rep.stabilizers;
    rep.document["min_stabilizer"] = *std::min_element(rep.stabilizers.begin(), rep.stabilizers.end());
    rep.document["retained_weight"] = retained;
  } else {
    rep.warning = "lattice has " + std::to_string(lat.node_count()) + " nodes (cap " +
                  std::to_string(kClusterStateNodeCap) + "); schedule only";
    rep.document["warning"] = rep.warning;
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_file(fs::path(out_dir) / "cluster.json", rep.document.dump(2) + "\n");
  }
  return rep;
}

Json cmd_dump_rho(const RunConfig& config) {
  config.validate();
  ProtocolSpec spec = config.protocol;
  if (config.mode == Mode::effective) spec.policy = CalibrationPolicy::formula;
  const CompiledProtocol compiled = compile(config.params, spec);
  Propagator prop(compiled.params, config.propagation());
  const SubsystemLayout& layout = prop.layout();
  const PureState initial = checkpoint_input(layout, compiled.problem);
  const PureState final_state(prop.evolve(initial.amplitudes(), compiled.timeline), Frame::interaction, 1e-7);
  const DensityMatrixReport a = checkpoint_density(initial, layout, compiled.problem);
  const DensityMatrixReport b = checkpoint_density(final_state, layout, compiled.problem);
  Json doc = {{"protocol", to_string(config.protocol.id)}, {"initial", density_to_json(a)}, {"final", density_to_json(b)}};
  if (!config.output.dir.empty()) {
    ensure_dir(config.output.dir);
    std::ostringstream sa, sb;
    write_density_csv(sa, a);
    write_density_csv(sb, b);
    write_file(fs::path(config.output.dir) / "rho_initial.csv", sa.str());
    write_file(fs::path(config.output.dir) / "rho_final.csv", sb.str());
    write_file(fs::path(config.output.dir) / "rho.json", doc.dump(2) + "\n");
  }
  return doc;
}

std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> dims;
  std::string token;
  const char sep = s.find(',') != std::string::npos ? ',' : 'x';
  if (s.empty() || s.back() == sep) throw ValidationError("dims: empty extent in \"" + s + "\"");
  std::istringstream is(s);
  while (std::getline(is, token, sep)) {
    if (token.empty()) throw ValidationError("dims: empty extent in \"" + s + "\"");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(token, &used);
    } catch (const std::exception&) {
      throw ValidationError("dims: \"" + token + "\" is not an integer");
    }
    if (used != token.size() || v < 1) throw ValidationError("dims: \"" + token + "\" is not a positive integer");
    dims.push_back(v);
  }
  if (dims.empty()) throw ValidationError("dims: empty");
  return dims;
}

}  // namespace hybridnv
