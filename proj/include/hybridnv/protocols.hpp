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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hybridnv/analysis.hpp"

namespace hybridnv {

enum class ProtocolId { state_transfer, cphase, cnot, fast_transfer };
enum class CalibrationPolicy {
  // Pulse-area formulas only.
  formula,
  // Each transfer operation tuned alone for maximal transfer.
  calibrated,
  // Calibrated, then all durations tuned jointly for maximal average fidelity.
  optimized,
};

std::string to_string(ProtocolId id);
std::string to_string(CalibrationPolicy p);
ProtocolId protocol_from_string(const std::string& s);
CalibrationPolicy policy_from_string(const std::string& s);

struct ProtocolSpec {
  ProtocolId id = ProtocolId::state_transfer;
  CalibrationPolicy policy = CalibrationPolicy::calibrated;
  // Device parameter overrides by configuration name, linear units.
  std::map<std::string, double> overrides;
};

DeviceParams apply_overrides(DeviceParams params, const std::map<std::string, double>& overrides);

enum class OperationKind {
  drive,
  // NVE tuned into resonance with its resonator.
  resonate,
  // Coupler up between the two resonators.
  bridge,
};

struct Operation {
  OperationKind kind = OperationKind::drive;
  int nve = 0;
  Transition transition = Transition::logical1;
  // Rabi area in units of pi (metadata; the duration is authoritative).
  double area = 1.0;
  double duration = 0.0;
  // Single-segment calibration: source and target basis indices (-1: none).
  int source = -1;
  int target = -1;
};

// Operations within a step start together; the step lasts as long as its
// longest operation.
struct ProtocolStep {
  int number = 0;
  std::vector<Operation> ops;
  double duration() const;
};

struct ProtocolPlan {
  ProtocolId id = ProtocolId::state_transfer;
  std::string variant;
  std::vector<ProtocolStep> steps;
  double total_duration() const;
};

struct CalibrationResult {
  int step = 0;
  int op = 0;
  // Index of the first timeline segment of the step.
  int segment = 0;
  double formula_ns = 0.0;
  double calibrated_ns = 0.0;
  // |<target|psi(T)>|^2 at the calibrated duration.
  double transfer = 0.0;
  bool ok = true;
  std::string message;
};

struct CompiledProtocol {
  ProtocolSpec spec;
  DeviceParams params;
  ProtocolPlan formula_plan;
  ProtocolPlan plan;
  Timeline timeline;
  std::vector<CalibrationResult> calibration;
  // Ideal images used for the average fidelity.
  FidelityProblem problem;
  // Average fidelity reached by the joint optimizer (policy optimized only).
  std::optional<double> optimized_fidelity;
};

// Formula-duration plans.
ProtocolPlan plan_state_transfer(const DeviceParams& params);
ProtocolPlan plan_cphase(const DeviceParams& params);
ProtocolPlan plan_cnot(const DeviceParams& params);
// variant "drive_first": NVE1 drive, then the three transfer steps.
// variant "drive_last": the three transfer steps, then an NVE2 drive.
ProtocolPlan plan_fast_transfer(const DeviceParams& params, const std::string& variant);
std::vector<std::string> fast_transfer_variants();

// Splits every step at operation boundaries into piecewise-constant segments.
Timeline build_timeline(const DeviceParams& params, const ProtocolPlan& plan);

// Segment that realizes a single operation on its own.
ControlSegment operation_segment(const DeviceParams& params, const Operation& op);

// Scans [0.5 guess, 2 guess] for the duration maximizing |<target|psi(T)>|.
CalibrationResult calibrate_segment(const DeviceParams& params, const ControlSegment& seg,
                                    const PureState& source, const PureState& target, double guess,
                                    const PropagationOptions& options = {});

// Ideal images of a protocol's logical inputs.
FidelityProblem protocol_problem(const SubsystemLayout& layout, const ProtocolPlan& plan);

// Coordinate-wise maximization of the average fidelity over all operation
// durations. Returns the fidelity reached.
double optimize_durations(const DeviceParams& params, ProtocolPlan& plan, const FidelityProblem& problem,
                          int m = kDefaultThetaGrid);

CompiledProtocol compile_state_transfer(const DeviceParams& params, const ProtocolSpec& spec);
CompiledProtocol compile_cphase(const DeviceParams& params, const ProtocolSpec& spec);
CompiledProtocol compile_cnot(const DeviceParams& params, const ProtocolSpec& spec);
// Evaluates every variant under the optimized policy and keeps the best.
CompiledProtocol compile_fast_transfer(const DeviceParams& params, const ProtocolSpec& spec);
CompiledProtocol compile(const DeviceParams& params, const ProtocolSpec& spec);

}  // namespace hybridnv
