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

#include <ostream>
#include <string>
#include <vector>

#include "hybridnv/propagate.hpp"

namespace hybridnv {

struct DensityMatrixReport {
  std::vector<std::string> subsystems;
  std::vector<std::string> labels;
  Matrix rho;
  // Weight of the state inside the reported block before renormalization
  // (1 for a plain partial trace).
  double retained_weight = 1.0;
};

// Reduced density matrix over `keep`, ordered as listed. Labels concatenate
// the level names of the kept subsystems.
DensityMatrixReport partial_trace(const PureState& state, const SubsystemLayout& layout,
                                  const std::vector<int>& keep);

// NVE1 x NVE2 qutrit block, basis UU, U0, U1, 0U, 00, 01, 1U, 10, 11.
DensityMatrixReport nve_pair_density(const PureState& state, const SubsystemLayout& layout);

// Logical NVE1 x NVE2 x SPQ block, basis 00g, 00e, 01g, ..., 11e; renormalized.
DensityMatrixReport logical_spq_density(const PureState& state, const SubsystemLayout& layout);

void write_density_csv(std::ostream& os, const DensityMatrixReport& report);

struct LeakageSummary {
  // Largest photon-number-2 population seen at any sample for any basis input.
  double max_photon2 = 0.0;
  // Largest final population outside the support of the target kets.
  double final_nontarget = 0.0;
};

struct FidelityReport {
  std::string protocol;
  double average = 0.0;
  int grid = 0;
  std::vector<double> node_fidelities;
  double min = 0.0;
  double max = 0.0;
  double total_time_ns = 0.0;
  LeakageSummary leakage;
};

// Logical inputs and their ideal images. The input family is a real
// superposition of the basis inputs with grid-dependent coefficients.
struct FidelityProblem {
  std::string protocol;
  std::vector<int> inputs;
  // D x n, column j is the ideal image of input j.
  Matrix targets;
  // 1: coefficients (sin t, cos t); 2: (cos t1 cos t2, cos t1 sin t2, sin t1 cos t2, sin t1 sin t2).
  int axes = 1;
};

inline constexpr int kMinThetaGrid = 9;
inline constexpr int kDefaultThetaGrid = 16;

// Basis index of |x>_1 |0,g,0> |y>_2.
int nve_basis_index(const SubsystemLayout& layout, int nve1_level, int nve2_level);
// Logical two-NVE basis |00>, |01>, |10>, |11>.
std::vector<int> logical_basis(const SubsystemLayout& layout);

Eigen::Matrix4cd cphase_target();
Eigen::Matrix4cd cnot_target();

// Input |0>_1, |1>_1; targets |0>_2, |1>_2.
FidelityProblem transfer_problem(const SubsystemLayout& layout);
// Logical basis inputs; targets gate * basis.
FidelityProblem gate_problem(const SubsystemLayout& layout, const Eigen::Matrix4cd& gate, std::string name);

Eigen::MatrixXd grid_coefficients(int axes, int m);
// A = T^dagger Psi for the propagated basis inputs.
Matrix overlap_matrix(Propagator& prop, const Timeline& tl, const FidelityProblem& problem);
double average_from_overlap(const Matrix& a, int axes, int m, kernels::Exec exec = kernels::Exec::serial,
                            std::vector<double>* nodes = nullptr);

FidelityReport evaluate_fidelity(Propagator& prop, const Timeline& tl, const FidelityProblem& problem, int m,
                                 bool with_leakage = true);

FidelityReport avg_fidelity_transfer(const DeviceParams& params, const Timeline& tl, int m = kDefaultThetaGrid,
                                     const PropagationOptions& options = {});
FidelityReport avg_fidelity_cphase(const DeviceParams& params, const Timeline& tl, int m = kDefaultThetaGrid,
                                   const PropagationOptions& options = {});

struct LogicalGate {
  Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Identity();
  double leakage = 0.0;
};

LogicalGate extract_logical_gate(Propagator& prop, const Timeline& tl);
LogicalGate extract_logical_gate(const DeviceParams& params, const Timeline& tl,
                                 const PropagationOptions& options = {});

// 1 - |tr(target^dagger actual)| / 4
double gate_metric(const Eigen::Matrix4cd& target, const Eigen::Matrix4cd& actual);

}  // namespace hybridnv
