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

#include "hybridnv/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "hybridnv/errors.hpp"

namespace hybridnv {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kScanPoints = 401;
// Local maxima this close to the best scanned value compete on distance to
// the guess.
constexpr double kCandidateTolerance = 1e-3;

Operation drive(int nve, Transition t, double area, const DeviceParams& p) {
  Operation op;
  op.kind = OperationKind::drive;
  op.nve = nve;
  op.transition = t;
  op.area = area;
  op.duration = area * kPi / p.rabi;
  return op;
}

// area is the Rabi area in units of pi; g t = area * pi / 2.
Operation resonate(int nve, double area, const DeviceParams& p, int source, int target) {
  Operation op;
  op.kind = OperationKind::resonate;
  op.nve = nve;
  op.area = area;
  op.duration = area * kPi / (2.0 * (nve == 1 ? p.g1 : p.g2));
  op.source = source;
  op.target = target;
  return op;
}

Operation bridge(const DeviceParams& p, int source, int target) {
  Operation op;
  op.kind = OperationKind::bridge;
  op.area = std::numbers::sqrt2;
  op.duration = kPi / (std::numbers::sqrt2 * p.g_on);
  op.source = source;
  op.target = target;
  return op;
}

struct Kets {
  int nve1_0;      // |0,0,g,0,U>
  int tlr_a;       // |U,1,g,0,U>
  int tlr_b;       // |U,0,g,1,U>
  int nve2_0;      // |U,0,g,0,0>
};

Kets kets(const DeviceParams& p) {
  const SubsystemLayout l = p.layout();
  return {l.index({kLevel0, 0, kSpqGround, 0, kLevelU}), l.index({kLevelU, 1, kSpqGround, 0, kLevelU}),
          l.index({kLevelU, 0, kSpqGround, 1, kLevelU}), l.index({kLevelU, 0, kSpqGround, 0, kLevel0})};
}

ProtocolStep step(int number, std::vector<Operation> ops) { return {number, std::move(ops)}; }

std::string describe(const Operation& op) {
  switch (op.kind) {
    case OperationKind::drive:
      return "drive NVE" + std::to_string(op.nve) +
             (op.transition == Transition::logical0 ? " U-0" : " U-1");
    case OperationKind::resonate:
      return "resonate NVE" + std::to_string(op.nve);
    case OperationKind::bridge:
      return "bridge";
  }
  return "";
}

}  // namespace

std::string to_string(ProtocolId id) {
  switch (id) {
    case ProtocolId::state_transfer: return "state_transfer";
    case ProtocolId::cphase: return "cphase";
    case ProtocolId::cnot: return "cnot";
    case ProtocolId::fast_transfer: return "fast_transfer";
  }
  return "";
}

std::string to_string(CalibrationPolicy p) {
  switch (p) {
    case CalibrationPolicy::formula: return "formula";
    case CalibrationPolicy::calibrated: return "calibrated";
    case CalibrationPolicy::optimized: return "optimized";
  }
  return "";
}

ProtocolId protocol_from_string(const std::string& s) {
  for (auto id : {ProtocolId::state_transfer, ProtocolId::cphase, ProtocolId::cnot, ProtocolId::fast_transfer}) {
    if (s == to_string(id)) return id;
  }
  throw ValidationError("protocol: unknown protocol '" + s + "'");
}

CalibrationPolicy policy_from_string(const std::string& s) {
  for (auto p : {CalibrationPolicy::formula, CalibrationPolicy::calibrated, CalibrationPolicy::optimized}) {
    if (s == to_string(p)) return p;
  }
  throw ValidationError("calibration: unknown policy '" + s + "'");
}

DeviceParams apply_overrides(DeviceParams params, const std::map<std::string, double>& overrides) {
  for (const auto& [name, value] : overrides) {
    if (name == "n_max") {
      if (value != std::floor(value)) throw ValidationError("n_max: must be an integer");
      params.n_max = static_cast<int>(value);
      continue;
    }
    const ParamField& f = param_field(name);
    params.*f.member = value * f.to_angular;
  }
  return params;
}

double ProtocolStep::duration() const {
  double d = 0.0;
  for (const auto& op : ops) d = std::max(d, op.duration);
  return d;
}

double ProtocolPlan::total_duration() const {
  double t = 0.0;
  for (const auto& s : steps) t += s.duration();
  return t;
}

ProtocolPlan plan_state_transfer(const DeviceParams& p) {
  const Kets k = kets(p);
  ProtocolPlan plan;
  plan.id = ProtocolId::state_transfer;
  plan.steps = {step(1, {drive(1, Transition::logical1, 1.0, p)}),
                step(2, {resonate(1, 1.0, p, k.nve1_0, k.tlr_a)}),
                step(3, {bridge(p, k.tlr_a, k.tlr_b)}),
                step(4, {resonate(2, 1.0, p, k.tlr_b, k.nve2_0)}),
                step(5, {drive(2, Transition::logical1, 3.0, p)})};
  return plan;
}

ProtocolPlan plan_cphase(const DeviceParams& p) {
  const Kets k = kets(p);
  ProtocolPlan plan;
  plan.id = ProtocolId::cphase;
  plan.steps = {step(1, {resonate(1, 1.0, p, k.nve1_0, k.tlr_a), drive(2, Transition::logical0, 1.0, p)}),
                step(2, {bridge(p, k.tlr_a, k.tlr_b)}),
                step(3, {resonate(2, 2.0, p, k.tlr_b, k.tlr_b)}),
                step(4, {bridge(p, k.tlr_b, k.tlr_a)}),
                step(5, {resonate(1, 3.0, p, k.tlr_a, k.nve1_0), drive(2, Transition::logical0, 1.0, p)})};
  return plan;
}

ProtocolPlan plan_cnot(const DeviceParams& p) {
  const Kets k = kets(p);
  ProtocolPlan plan;
  plan.id = ProtocolId::cnot;
  plan.steps = {step(1, {resonate(1, 1.0, p, k.nve1_0, k.tlr_a), drive(2, Transition::logical0, 1.0, p)}),
                step(2, {bridge(p, k.tlr_a, k.tlr_b)}),
                step(3, {resonate(2, 1.0, p, k.tlr_b, k.nve2_0)}),
                step(4, {drive(2, Transition::logical1, 1.0, p)}),
                step(5, {resonate(2, 1.0, p, k.nve2_0, k.tlr_b)}),
                step(6, {drive(2, Transition::logical1, 3.0, p)}),
                step(7, {resonate(2, 1.0, p, k.tlr_b, k.nve2_0)}),
                step(8, {bridge(p, k.tlr_b, k.tlr_a)}),
                step(9, {resonate(1, 1.0, p, k.tlr_a, k.nve1_0), drive(2, Transition::logical0, 3.0, p)})};
  return plan;
}

std::vector<std::string> fast_transfer_variants() { return {"drive_first", "drive_last"}; }

ProtocolPlan plan_fast_transfer(const DeviceParams& p, const std::string& variant) {
  const Kets k = kets(p);
  ProtocolPlan plan;
  plan.id = ProtocolId::fast_transfer;
  plan.variant = variant;
  std::vector<ProtocolStep> transfer = {step(0, {resonate(1, 1.0, p, k.nve1_0, k.tlr_a)}),
                                        step(0, {bridge(p, k.tlr_a, k.tlr_b)}),
                                        step(0, {resonate(2, 1.0, p, k.tlr_b, k.nve2_0)})};
  if (variant == "drive_first") {
    plan.steps.push_back(step(0, {drive(1, Transition::logical1, 1.0, p)}));
    plan.steps.insert(plan.steps.end(), transfer.begin(), transfer.end());
  } else if (variant == "drive_last") {
    plan.steps = transfer;
    plan.steps.push_back(step(0, {drive(2, Transition::logical1, 1.0, p)}));
  } else {
    throw ValidationError("variant: unknown fast-transfer variant '" + variant + "'");
  }
  for (std::size_t i = 0; i < plan.steps.size(); ++i) plan.steps[i].number = static_cast<int>(i) + 1;
  return plan;
}

ControlSegment operation_segment(const DeviceParams& p, const Operation& op) {
  ControlSegment seg;
  seg.duration = op.duration;
  seg.spq_coupling = op.kind == OperationKind::bridge ? p.g_on : p.g_off;
  seg.nve1_freq = op.kind == OperationKind::resonate && op.nve == 1 ? p.omega_a : p.omega_10_detuned;
  seg.nve2_freq = op.kind == OperationKind::resonate && op.nve == 2 ? p.omega_b : p.omega_20_detuned;
  if (op.kind == OperationKind::drive) seg.drives.push_back({op.nve, op.transition, p.rabi, 0.0});
  seg.label = describe(op);
  return seg;
}

Timeline build_timeline(const DeviceParams& p, const ProtocolPlan& plan) {
  Timeline tl;
  tl.name = to_string(plan.id) + (plan.variant.empty() ? "" : ":" + plan.variant);
  for (const auto& st : plan.steps) {
    std::vector<double> bounds;
    for (const auto& op : st.ops) {
      if (!(op.duration >= 0.0) || !std::isfinite(op.duration)) {
        throw ValidationError("step " + std::to_string(st.number) + ": operation duration must be >= 0");
      }
      if (op.duration > 0.0) bounds.push_back(op.duration);
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    if (bounds.empty()) bounds.push_back(0.0);
    double prev = 0.0;
    for (double b : bounds) {
      ControlSegment seg;
      seg.duration = b - prev;
      seg.spq_coupling = p.g_off;
      seg.nve1_freq = p.omega_10_detuned;
      seg.nve2_freq = p.omega_20_detuned;
      seg.step = st.number;
      std::string label;
      for (const auto& op : st.ops) {
        if (op.duration < b && !(b == 0.0 && op.duration == 0.0)) continue;
        const ControlSegment one = operation_segment(p, op);
        if (op.kind == OperationKind::bridge) seg.spq_coupling = one.spq_coupling;
        if (op.kind == OperationKind::resonate && op.nve == 1) seg.nve1_freq = one.nve1_freq;
        if (op.kind == OperationKind::resonate && op.nve == 2) seg.nve2_freq = one.nve2_freq;
        seg.drives.insert(seg.drives.end(), one.drives.begin(), one.drives.end());
        label += (label.empty() ? "" : " + ") + one.label;
      }
      seg.label = "step " + std::to_string(st.number) + ": " + label;
      tl.segments.push_back(std::move(seg));
      prev = b;
    }
  }
  return tl;
}

CalibrationResult calibrate_segment(const DeviceParams& params, const ControlSegment& seg, const PureState& source,
                                    const PureState& target, double guess, const PropagationOptions& options) {
  CalibrationResult r;
  r.formula_ns = guess;
  r.calibrated_ns = guess;
  if (!(guess > 0.0) || !std::isfinite(guess)) {
    r.ok = false;
    r.message = "degenerate guess: empty bracket";
    return r;
  }
  PropagationOptions opts = options;
  opts.mode = Mode::full;
  const SegmentPropagator prop(params, seg, opts);
  const FrameLedger ledger(opts.frame);
  const Vector& s = source.amplitudes();
  const Vector& t = target.amplitudes();
  auto figure = [&](double tau) { return std::norm(t.dot(prop.apply(s, ledger, tau))); };

  const double lo = 0.5 * guess;
  const double hi = 2.0 * guess;
  const double h = (hi - lo) / (kScanPoints - 1);
  std::vector<double> ts(kScanPoints), fs(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    ts[i] = i + 1 == kScanPoints ? hi : lo + h * i;
    fs[i] = figure(ts[i]);
  }
  const double best = *std::max_element(fs.begin(), fs.end());
  int pick = -1;
  for (int i = 0; i < kScanPoints; ++i) {
    const bool left_ok = i == 0 || fs[i] >= fs[i - 1];
    const bool right_ok = i + 1 == kScanPoints || fs[i] >= fs[i + 1];
    if (!left_ok || !right_ok || fs[i] < best - kCandidateTolerance) continue;
    if (pick < 0 || std::abs(ts[i] - guess) < std::abs(ts[pick] - guess) - 1e-12) pick = i;
  }

  const double a = ts[std::max(pick - 1, 0)];
  const double b = ts[std::min(pick + 1, kScanPoints - 1)];
  const auto found = boost::math::tools::brent_find_minima([&](double x) { return -figure(x); }, a, b, 40);
  double t_best = ts[pick], f_best = fs[pick];
  if (-found.second > f_best) {
    t_best = found.first;
    f_best = -found.second;
  }

  const bool at_edge = pick == 0 || pick + 1 == kScanPoints;
  if (at_edge) {
    const double outside = pick == 0 ? lo - h : hi + h;
    if (outside > 0.0 && figure(outside) > f_best) {
      r.ok = false;
      r.transfer = figure(guess);
      r.message = "no interior maximum in [0.5, 2] x guess";
      return r;
    }
  }
  if (std::abs(t_best - guess) > 0.5 * guess) {
    r.ok = false;
    r.transfer = figure(guess);
    r.message = "maximum lies outside +-50% of the formula duration";
    return r;
  }
  r.calibrated_ns = t_best;
  r.transfer = f_best;
  return r;
}

FidelityProblem protocol_problem(const SubsystemLayout& layout, const ProtocolPlan& plan) {
  switch (plan.id) {
    case ProtocolId::state_transfer:
      return transfer_problem(layout);
    case ProtocolId::cphase:
      return gate_problem(layout, cphase_target(), "cphase");
    case ProtocolId::cnot:
      return gate_problem(layout, cnot_target(), "cnot");
    case ProtocolId::fast_transfer: {
      FidelityProblem p = transfer_problem(layout);
      p.protocol = "fast_transfer";
      p.targets.setZero();
      p.targets(nve_basis_index(layout, kLevelU, kLevel0), 0) = 1.0;
      // drive_first leaves the second branch in |U>_2; drive_last maps it to |1>_2.
      const int second = plan.variant == "drive_first" ? nve_basis_index(layout, kLevelU, kLevelU)
                                                        : nve_basis_index(layout, kLevelU, kLevel1);
      p.targets(second, 1) = cplx(0.0, -1.0);
      return p;
    }
  }
  throw ValidationError("unknown protocol");
}

double optimize_durations(const DeviceParams& params, ProtocolPlan& plan, const FidelityProblem& problem, int m) {
  Propagator prop(params);
  auto objective = [&]() {
    return average_from_overlap(overlap_matrix(prop, build_timeline(params, plan), problem), problem.axes, m);
  };
  struct Var {
    Operation* op;
    double start;
  };
  std::vector<Var> vars;
  for (auto& st : plan.steps) {
    for (auto& op : st.ops) {
      if (op.duration > 0.0) vars.push_back({&op, op.duration});
    }
  }
  double current = objective();
  for (int sweep = 0; sweep < 40; ++sweep) {
    const double before = current;
    for (auto& v : vars) {
      const double radius = 0.1 * v.start;
      const double x0 = v.op->duration;
      const double lo = std::max(0.5 * v.start, x0 - radius);
      const double hi = std::min(1.5 * v.start, x0 + radius);
      const auto found = boost::math::tools::brent_find_minima(
          [&](double x) {
            v.op->duration = x;
            return -objective();
          },
          lo, hi, 30);
      if (-found.second > current) {
        v.op->duration = found.first;
        current = -found.second;
      } else {
        v.op->duration = x0;
      }
    }
    if (current - before < 1e-9) break;
  }
  return current;
}

namespace {

CompiledProtocol finish(const DeviceParams& params, const ProtocolSpec& spec, ProtocolPlan plan) {
  CompiledProtocol c;
  c.spec = spec;
  c.params = params;
  c.formula_plan = plan;
  const SubsystemLayout layout = params.layout();
  const Timeline formula_tl = build_timeline(params, plan);
  if (spec.policy != CalibrationPolicy::formula) {
    for (auto& st : plan.steps) {
      int first_segment = 0;
      while (first_segment < static_cast<int>(formula_tl.segments.size()) &&
             formula_tl.segments[first_segment].step != st.number) {
        ++first_segment;
      }
      for (std::size_t o = 0; o < st.ops.size(); ++o) {
        Operation& op = st.ops[o];
        if (op.source < 0) continue;
        CalibrationResult r = calibrate_segment(params, operation_segment(params, op),
                                                PureState::basis(layout, layout.digits(op.source)),
                                                PureState::basis(layout, layout.digits(op.target)), op.duration);
        r.step = st.number;
        r.op = static_cast<int>(o);
        r.segment = first_segment;
        if (r.ok) op.duration = r.calibrated_ns;
        c.calibration.push_back(r);
      }
    }
  }
  c.problem = protocol_problem(layout, plan);
  if (spec.policy == CalibrationPolicy::optimized) {
    c.optimized_fidelity = optimize_durations(params, plan, c.problem);
  }
  c.timeline = build_timeline(params, plan);
  c.plan = std::move(plan);
  return c;
}

}  // namespace

CompiledProtocol compile_state_transfer(const DeviceParams& params, const ProtocolSpec& spec) {
  params.validate();
  return finish(params, spec, plan_state_transfer(params));
}

CompiledProtocol compile_cphase(const DeviceParams& params, const ProtocolSpec& spec) {
  params.validate();
  return finish(params, spec, plan_cphase(params));
}

CompiledProtocol compile_cnot(const DeviceParams& params, const ProtocolSpec& spec) {
  params.validate();
  return finish(params, spec, plan_cnot(params));
}

CompiledProtocol compile_fast_transfer(const DeviceParams& params, const ProtocolSpec& spec) {
  params.validate();
  std::optional<CompiledProtocol> best;
  double best_f = -1.0;
  for (const auto& variant : fast_transfer_variants()) {
    CompiledProtocol c = finish(params, spec, plan_fast_transfer(params, variant));
    double f = 0.0;
    if (c.optimized_fidelity) {
      f = *c.optimized_fidelity;
    } else {
      Propagator prop(params);
      f = average_from_overlap(overlap_matrix(prop, c.timeline, c.problem), c.problem.axes, kDefaultThetaGrid);
    }
    if (f > best_f) {
      best_f = f;
      best = std::move(c);
    }
  }
  return std::move(*best);
}

CompiledProtocol compile(const DeviceParams& params, const ProtocolSpec& spec) {
  const DeviceParams p = apply_overrides(params, spec.overrides);
  switch (spec.id) {
    case ProtocolId::state_transfer: return compile_state_transfer(p, spec);
    case ProtocolId::cphase: return compile_cphase(p, spec);
    case ProtocolId::cnot: return compile_cnot(p, spec);
    case ProtocolId::fast_transfer: return compile_fast_transfer(p, spec);
  }
  throw ValidationError("unknown protocol");
}

}  // namespace hybridnv
