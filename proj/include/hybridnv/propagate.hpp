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
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hybridnv/kernels.hpp"
#include "hybridnv/model.hpp"

namespace hybridnv {

enum class Mode { full, effective };
enum class Method {
  // Eigendecomposition of the (rotating-frame) segment generator.
  exact,
  // Fixed-step RK4 on the interaction-frame Hamiltonian.
  stepped,
};

struct PropagationOptions {
  Mode mode = Mode::full;
  Method method = Method::exact;
  // Integrator step cap in ns; 0 selects min(1/(40 f_max), duration/100).
  double max_step_ns = 0.0;
  FramePolicy frame = FramePolicy::segment;
  TermMask terms;
  kernels::Exec exec = kernels::Exec::serial;
};

struct Timeline {
  std::string name;
  std::vector<ControlSegment> segments;

  double total_duration() const;
  // Number of distinct protocol steps.
  int step_count() const;
  void validate(const DeviceParams& params) const;
  bool operator==(const Timeline&) const = default;
};

struct SamplingSpec {
  int samples = 1000;
  // Basis indices whose populations are recorded.
  std::vector<int> tracked;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<int> tracked;
  // samples x tracked
  Eigen::MatrixXd populations;
  std::vector<double> norms;
  PureState final_state;
  FrameLedger final_ledger;
};

// Propagator for one segment configuration. Duration independent: the same
// object serves every duration and start ledger.
class SegmentPropagator {
 public:
  SegmentPropagator(const DeviceParams& params, const ControlSegment& seg,
                    const PropagationOptions& options);

  // Advances an interaction-frame amplitude vector by tau starting from the
  // ledger at the end of the previous segment.
  Vector apply(const Vector& psi, const FrameLedger& ledger, double tau) const;
  bool exact() const { return exact_; }

 private:
  Vector apply_exact(const Vector& psi, const FrameLedger& ledger, double tau) const;
  Vector apply_stepped(const Vector& psi, const FrameLedger& ledger, double tau) const;
  void derivative(const Vector& psi, const Eigen::VectorXcd& phase, Vector& scratch, Vector& out) const;

  Mode mode_;
  bool exact_ = true;
  double step_cap_ = 0.0;
  kernels::Exec exec_ = kernels::Exec::serial;
  Eigen::MatrixXd occ_;
  LevelVector eps_{};
  Eigen::VectorXd basis_eps_;
  Eigen::VectorXd excitation_;
  // Exact route.
  Eigen::VectorXd lambda_;
  Matrix vectors_;
  double omega_d_ = 0.0;
  double drive_phase_ = 0.0;
  int drive_level_ = -1;
  // Stepped route.
  kernels::CsrMatrix coupling_;
  kernels::CsrMatrix drive_;
};

// Cache of segment propagators keyed by segment configuration. Thread safe.
class Propagator {
 public:
  Propagator(DeviceParams params, PropagationOptions options = {});

  const DeviceParams& params() const { return params_; }
  const PropagationOptions& options() const { return options_; }
  const SubsystemLayout& layout() const { return layout_; }

  std::shared_ptr<const SegmentPropagator> segment(const ControlSegment& seg);
  // Interaction-frame evolution through a full timeline from t = 0.
  Vector evolve(const Vector& psi, const Timeline& tl);
  std::pair<Vector, FrameLedger> evolve_from(const Vector& psi, const Timeline& tl, FrameLedger ledger);
  Trajectory run(const PureState& initial, const Timeline& tl, const SamplingSpec& sampling);

 private:
  DeviceParams params_;
  PropagationOptions options_;
  SubsystemLayout layout_;
  std::mutex mu_;
  std::map<std::vector<double>, std::shared_ptr<const SegmentPropagator>> cache_;
};

std::pair<PureState, FrameLedger> propagate_segment(const PureState& state, const ControlSegment& seg,
                                                    const DeviceParams& params, const FrameLedger& ledger,
                                                    const PropagationOptions& options = {});

// Final state is returned in the interaction frame.
Trajectory run_timeline(const PureState& initial, const Timeline& tl, const DeviceParams& params,
                        const SamplingSpec& sampling = {}, const PropagationOptions& options = {});

// Max entrywise difference between the exact lab-frame route (unwound through
// the ledger) and the stepped interaction-frame route. Without an explicit
// max_step_ns the stepped route runs at a quarter of the default cap.
double cross_check_frames(const PureState& initial, const Timeline& tl, const DeviceParams& params,
                          const PropagationOptions& options = {});

// Default integrator step cap for a parameter set, in ns.
double default_step_cap(const DeviceParams& params);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const SubsystemLayout& layout);

}  // namespace hybridnv
