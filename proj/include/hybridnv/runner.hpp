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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hybridnv/io.hpp"

namespace hybridnv {

struct OutputSpec {
  std::string dir;
  bool trajectory_csv = true;
  bool density_csv = true;
  int samples = 1000;
};

struct Expectation {
  std::optional<double> average_fidelity;
  std::optional<double> fidelity_tolerance;
  std::optional<double> total_time_ns;
  std::optional<double> total_time_rel_tolerance;
  std::optional<double> gate_metric_max;
};

struct RunConfig {
  std::string name;
  DeviceParams params;
  ProtocolSpec protocol;
  Mode mode = Mode::full;
  Method method = Method::exact;
  std::optional<double> integrator_step_ns;
  FramePolicy frame = FramePolicy::segment;
  int theta_grid = kDefaultThetaGrid;
  OutputSpec output;
  Expectation expect;

  PropagationOptions propagation() const;
  // Device parameters after overrides.
  DeviceParams resolved_params() const;
  void validate() const;
};

std::filesystem::path bundled_config_dir();
std::vector<std::string> bundled_config_names();

RunConfig parse_config(const Json& j);
// Accepts a file path or the name of a bundled configuration.
RunConfig load_config(const std::string& path_or_name);
Json config_to_json(const RunConfig& c);

struct ThresholdCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct GateSummary {
  std::string target;
  Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Identity();
  double leakage = 0.0;
  double metric = 0.0;
};

struct RunReport {
  std::string tool = "hybridnv";
  std::string version;
  Json config;
  Json device_angular;
  Json plan;
  Timeline timeline;
  std::vector<CalibrationResult> calibration;
  std::optional<double> optimized_fidelity;
  FidelityReport fidelity;
  std::optional<GateSummary> gate;
  std::vector<ThresholdCheck> checks;
  double wall_seconds = 0.0;

  bool all_checks_pass() const;
  Json to_json() const;
  static RunReport from_json(const Json& j);
};

// Compiles, propagates and scores the configured protocol. Writes report.json
// and the CSV outputs when output.dir is set.
RunReport cmd_run(const RunConfig& config);

// Single-segment calibration of every transfer operation. Writes
// calibration.csv and calibration.json when output.dir is set.
std::vector<CalibrationResult> cmd_calibrate(const RunConfig& config);

struct ClusterReport {
  Json document;
  std::vector<double> stabilizers;
  bool state_built = false;
  std::string warning;
};

// gate: std::nullopt selects the ideal diag(1,1,-1,1); otherwise the c-phase
// gate extracted from the configuration's full-mode run.
ClusterReport cmd_cluster(const std::vector<int>& dims, const std::optional<RunConfig>& gate_source,
                          const std::string& out_dir);

// Reduced density matrices at the initial and final checkpoints.
Json cmd_dump_rho(const RunConfig& config);

// Parses "3x3" style dimension lists.
std::vector<int> parse_dims(const std::string& s);

}  // namespace hybridnv
