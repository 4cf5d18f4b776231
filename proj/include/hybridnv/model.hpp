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

#include <array>
#include <numbers>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include "hybridnv/tensorspace.hpp"

namespace hybridnv {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Linear frequency (GHz or MHz) to angular frequency in rad/ns.
constexpr double ghz(double f) { return kTwoPi * f; }
constexpr double mhz(double f) { return kTwoPi * f * 1e-3; }

// All frequencies and couplings are angular, in rad/ns.
struct DeviceParams {
  double omega_a = 0.0;
  double omega_b = 0.0;
  double omega_eg = 0.0;
  double omega_11 = 0.0;
  double omega_21 = 0.0;
  double omega_10_detuned = 0.0;
  double omega_20_detuned = 0.0;
  double g_on = 0.0;
  double g_off = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double rabi = 0.0;
  int n_max = 2;

  // Throws ValidationError naming the first offending field.
  void validate() const;
  SubsystemLayout layout() const { return SubsystemLayout::canonical(n_max); }

  static DeviceParams reference_state_transfer();
  static DeviceParams reference_cphase();
  // State-transfer parameters with g1 = g2 = 2pi * 70 MHz.
  static DeviceParams reference_fast_transfer();

  bool operator==(const DeviceParams&) const = default;
};

// Configuration name (linear frequency with unit suffix) of a DeviceParams
// member and the factor converting the linear value to rad/ns.
struct ParamField {
  const char* name;
  double DeviceParams::*member;
  double to_angular;
};

std::span<const ParamField> param_fields();
// Throws ValidationError for an unknown name.
const ParamField& param_field(std::string_view name);

enum class Transition { logical0, logical1 };

struct DriveSpec {
  int target = 1;  // NVE index, 1 or 2
  Transition transition = Transition::logical1;
  double rabi = 0.0;
  double phase = 0.0;

  bool operator==(const DriveSpec&) const = default;
};

struct ControlSegment {
  double duration = 0.0;
  double spq_coupling = 0.0;
  double nve1_freq = 0.0;
  double nve2_freq = 0.0;
  std::vector<DriveSpec> drives;
  // Protocol step this segment belongs to (several segments may share one).
  int step = 0;
  std::string label;

  void validate(const DeviceParams& params) const;
  bool operator==(const ControlSegment&) const = default;
};

// Coupling terms kept in the Hamiltonian. Everything is on by default; the
// switches exist to isolate a single exchange channel in oracle tests.
struct TermMask {
  bool spq = true;
  std::array<std::array<bool, 2>, 2> nve = {{{true, true}, {true, true}}};

  static TermMask only_nve(int nve, Transition t);
  static TermMask only_spq();
  bool operator==(const TermMask&) const = default;
};

// Local levels carrying free energy. Each basis state's free energy is the
// occupation-weighted sum of these entries.
enum Level : int {
  kTlrAQuanta = 0,
  kSpqExcitedLevel,
  kTlrBQuanta,
  kNve1Logical0,
  kNve1Logical1,
  kNve2Logical0,
  kNve2Logical1,
  kLevelCount
};
using LevelVector = std::array<double, kLevelCount>;

Level nve_level(int nve, Transition t);

// Level energies in effect during a segment.
LevelVector free_energies(const DeviceParams& params, const ControlSegment& seg);

// D x kLevelCount occupation table of the canonical layout.
Eigen::MatrixXd occupations(const SubsystemLayout& layout);
// Per-basis-state sums of level values (energies or phases).
Eigen::VectorXd basis_values(const Eigen::MatrixXd& occ, const LevelVector& v);
// Diagonal of the excitation-number operator.
Eigen::VectorXd excitation_numbers(const SubsystemLayout& layout);

enum class FramePolicy {
  // Phases re-referenced at every segment start: Phi = eps_seg * t.
  segment,
  // Phases integrated over the full history: Phi = int eps dt.
  continuous,
};

// Accumulated free-evolution phase of every local level.
class FrameLedger {
 public:
  explicit FrameLedger(FramePolicy policy = FramePolicy::segment) : policy_(policy) {}

  FramePolicy policy() const { return policy_; }
  double time() const { return time_; }
  const LevelVector& phases() const { return phases_; }

  // Ledger used inside a segment with the given level energies. Under the
  // segment policy the phases are reset to eps * time(); otherwise unchanged.
  FrameLedger entered(const LevelVector& eps) const;
  FrameLedger advanced(const LevelVector& eps, double dt) const;

  Eigen::VectorXd basis_phases(const Eigen::MatrixXd& occ) const { return basis_values(occ, phases_); }
  double level_phase(Level l) const { return phases_[l]; }

  bool operator==(const FrameLedger&) const = default;

 private:
  FramePolicy policy_;
  double time_ = 0.0;
  LevelVector phases_{};
};

// Off-diagonal coupling part of the lab Hamiltonian (no free terms, no drives).
Matrix coupling_matrix(const DeviceParams& params, const ControlSegment& seg,
                       const TermMask& mask = {});
// S+ of a drive, lifted; the drive's Rabi amplitude is not included.
Matrix drive_raising(const SubsystemLayout& layout, const DriveSpec& drive);

// Lab-frame Hamiltonian at absolute time t. `ledger` is the ledger at the end
// of the previous segment; the drive phase follows its transition phase.
Operator hamiltonian_lab(const DeviceParams& params, const ControlSegment& seg,
                         const FrameLedger& ledger, double t, const TermMask& mask = {});

// Interaction-frame Hamiltonian: lab Hamiltonian conjugated by the ledger
// phases, free part removed.
Operator hamiltonian_interaction(const DeviceParams& params, const ControlSegment& seg,
                                 const FrameLedger& ledger, double t,
                                 const TermMask& mask = {});

// Idealized interaction-frame generator of a segment: drive terms, the
// resonant NVE-resonator pair of a tuned NVE, and the SPQ bridge when the
// coupler is up. Constant in time.
Operator hamiltonian_effective(const DeviceParams& params, const ControlSegment& seg);

// Frequency of a driven transition in a segment.
double transition_frequency(const DeviceParams& params, const ControlSegment& seg,
                            const DriveSpec& drive);

bool nve_resonant(const DeviceParams& params, const ControlSegment& seg, int nve);
bool coupler_up(const DeviceParams& params, const ControlSegment& seg);

}  // namespace hybridnv
