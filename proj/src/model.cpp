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

#include "hybridnv/model.hpp"

#include <cmath>
#include <sstream>

#include "hybridnv/errors.hpp"

namespace hybridnv {
namespace {

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ValidationError(field + ": " + why);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

bool same_frequency(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); }

}  // namespace

void DeviceParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"omega_a", omega_a},   {"omega_b", omega_b},
      {"omega_eg", omega_eg}, {"omega_11", omega_11},
      {"omega_21", omega_21}, {"omega_10_detuned", omega_10_detuned},
      {"omega_20_detuned", omega_20_detuned}, {"g_on", g_on},
      {"g_off", g_off},       {"g1", g1},
      {"g2", g2},             {"rabi", rabi}};
  for (const auto& [name, v] : fields) require(positive(v), name, "must be finite and > 0");
  require(n_max >= 1, "n_max", "must be >= 1");
  require(n_max <= 8, "n_max", "must be <= 8");
  require(same_frequency(omega_a, omega_eg), "omega_eg", "must equal omega_a");
  require(same_frequency(omega_a, omega_b), "omega_b", "must equal omega_a");
  require(g_off < g1, "g_off", "must be smaller than g1");
  require(g_off < g2, "g_off", "must be smaller than g2");
  require(g_off < g_on, "g_off", "must be smaller than g_on");
  require(omega_11 > omega_a, "omega_11", "must exceed omega_a");
  require(omega_21 > omega_a, "omega_21", "must exceed omega_a");
  require(omega_10_detuned > omega_a, "omega_10_detuned", "must exceed omega_a");
  require(omega_20_detuned > omega_a, "omega_20_detuned", "must exceed omega_a");
}

DeviceParams DeviceParams::reference_state_transfer() {
  DeviceParams p;
  p.omega_a = p.omega_b = p.omega_eg = ghz(1.3);
  p.omega_11 = p.omega_21 = ghz(2.88);
  p.omega_10_detuned = p.omega_20_detuned = ghz(1.73);
  p.g_on = mhz(104.0);
  p.g_off = mhz(0.5);
  p.g1 = mhz(16.0);
  p.g2 = mhz(20.0);
  p.rabi = mhz(50.0);
  p.n_max = 2;
  return p;
}

DeviceParams DeviceParams::reference_cphase() {
  DeviceParams p = reference_state_transfer();
  p.omega_a = p.omega_b = p.omega_eg = ghz(1.4);
  p.omega_10_detuned = p.omega_20_detuned = ghz(2.08);
  return p;
}

DeviceParams DeviceParams::reference_fast_transfer() {
  DeviceParams p = reference_state_transfer();
  p.g1 = p.g2 = mhz(70.0);
  return p;
}

void ControlSegment::validate(const DeviceParams& params) const {
  require(std::isfinite(duration) && duration >= 0.0, "duration_ns", "must be finite and >= 0");
  require(std::isfinite(spq_coupling) && spq_coupling >= 0.0, "g_over_2pi_GHz", "must be >= 0");
  require(spq_coupling <= params.g_on * (1.0 + 1e-12), "g_over_2pi_GHz", "exceeds g_on");
  require(positive(nve1_freq), "nve1_freq_over_2pi_GHz", "must be finite and > 0");
  require(positive(nve2_freq), "nve2_freq_over_2pi_GHz", "must be finite and > 0");
  for (const auto& d : drives) {
    require(d.target == 1 || d.target == 2, "drives.target", "must be 1 or 2");
    require(std::isfinite(d.rabi) && d.rabi >= 0.0, "drives.rabi", "must be finite and >= 0");
    require(std::isfinite(d.phase), "drives.phase", "must be finite");
  }
}

std::span<const ParamField> param_fields() {
  static constexpr double kGhz = kTwoPi;
  static constexpr double kMhz = kTwoPi * 1e-3;
  static const ParamField fields[] = {
      {"omega_a_over_2pi_GHz", &DeviceParams::omega_a, kGhz},
      {"omega_b_over_2pi_GHz", &DeviceParams::omega_b, kGhz},
      {"omega_eg_over_2pi_GHz", &DeviceParams::omega_eg, kGhz},
      {"omega_11_over_2pi_GHz", &DeviceParams::omega_11, kGhz},
      {"omega_21_over_2pi_GHz", &DeviceParams::omega_21, kGhz},
      {"omega_10_detuned_over_2pi_GHz", &DeviceParams::omega_10_detuned, kGhz},
      {"omega_20_detuned_over_2pi_GHz", &DeviceParams::omega_20_detuned, kGhz},
      {"g_on_over_2pi_MHz", &DeviceParams::g_on, kMhz},
      {"g_off_over_2pi_MHz", &DeviceParams::g_off, kMhz},
      {"g1_over_2pi_MHz", &DeviceParams::g1, kMhz},
      {"g2_over_2pi_MHz", &DeviceParams::g2, kMhz},
      {"rabi_over_2pi_MHz", &DeviceParams::rabi, kMhz},
  };
  return fields;
}

const ParamField& param_field(std::string_view name) {
  for (const auto& f : param_fields()) {
    if (name == f.name) return f;
  }
  throw ValidationError(std::string(name) + ": unknown device parameter");
}

TermMask TermMask::only_nve(int nve, Transition t) {
  TermMask m;
  m.spq = false;
  m.nve = {{{false, false}, {false, false}}};
  m.nve.at(nve - 1)[t == Transition::logical0 ? 0 : 1] = true;
  return m;
}

TermMask TermMask::only_spq() {
  TermMask m;
  m.nve = {{{false, false}, {false, false}}};
  return m;
}

Level nve_level(int nve, Transition t) {
  if (nve == 1) return t == Transition::logical0 ? kNve1Logical0 : kNve1Logical1;
  if (nve == 2) return t == Transition::logical0 ? kNve2Logical0 : kNve2Logical1;
  throw ValidationError("NVE index must be 1 or 2");
}

LevelVector free_energies(const DeviceParams& params, const ControlSegment& seg) {
  LevelVector e{};
  e[kTlrAQuanta] = params.omega_a;
  e[kSpqExcitedLevel] = params.omega_eg;
  e[kTlrBQuanta] = params.omega_b;
  e[kNve1Logical0] = seg.nve1_freq;
  e[kNve1Logical1] = params.omega_11;
  e[kNve2Logical0] = seg.nve2_freq;
  e[kNve2Logical1] = params.omega_21;
  return e;
}

Eigen::MatrixXd occupations(const SubsystemLayout& layout) {
  if (!layout.is_canonical()) throw ShapeError("occupations requires the canonical layout");
  const int n = layout.total_dim();
  Eigen::MatrixXd occ = Eigen::MatrixXd::Zero(n, kLevelCount);
  for (int i = 0; i < n; ++i) {
    occ(i, kTlrAQuanta) = layout.digit(i, slot::kTlrA);
    occ(i, kSpqExcitedLevel) = layout.digit(i, slot::kSpq);
    occ(i, kTlrBQuanta) = layout.digit(i, slot::kTlrB);
    const int n1 = layout.digit(i, slot::kNve1);
    const int n2 = layout.digit(i, slot::kNve2);
    if (n1 == kLevel0) occ(i, kNve1Logical0) = 1;
    if (n1 == kLevel1) occ(i, kNve1Logical1) = 1;
    if (n2 == kLevel0) occ(i, kNve2Logical0) = 1;
    if (n2 == kLevel1) occ(i, kNve2Logical1) = 1;
  }
  return occ;
}

Eigen::VectorXd basis_values(const Eigen::MatrixXd& occ, const LevelVector& v) {
  return occ * Eigen::Map<const Eigen::VectorXd>(v.data(), kLevelCount);
}

Eigen::VectorXd excitation_numbers(const SubsystemLayout& layout) {
  return occupations(layout).rowwise().sum();
}

FrameLedger FrameLedger::entered(const LevelVector& eps) const {
  if (policy_ == FramePolicy::continuous) return *this;
  FrameLedger out = *this;
  for (int l = 0; l < kLevelCount; ++l) out.phases_[l] = eps[l] * time_;
  return out;
}

FrameLedger FrameLedger::advanced(const LevelVector& eps, double dt) const {
  FrameLedger out = entered(eps);
  for (int l = 0; l < kLevelCount; ++l) out.phases_[l] += eps[l] * dt;
  out.time_ += dt;
  return out;
}

Matrix coupling_matrix(const DeviceParams& params, const ControlSegment& seg, const TermMask& mask) {
  const SubsystemLayout layout = params.layout();
  const LocalGenerators gen = local_generators(layout);
  const int n = layout.total_dim();
  Matrix v = Matrix::Zero(n, n);
  if (mask.spq) v += seg.spq_coupling * (gen.a_dag * gen.sigma_minus + gen.b_dag * gen.sigma_minus);
  const double gk[2] = {params.g1, params.g2};
  const Matrix* mode_dag[2] = {&gen.a_dag, &gen.b_dag};
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      if (mask.nve[k][j]) v += gk[k] * (*mode_dag[k]) * gen.nve_minus[k][j];
    }
  }
  Matrix h = v + v.adjoint();
  return h;
}

Matrix drive_raising(const SubsystemLayout& layout, const DriveSpec& drive) {
  const int s = drive.target == 1 ? slot::kNve1 : drive.target == 2 ? slot::kNve2 : -1;
  if (s < 0) throw ValidationError("drives.target: must be 1 or 2");
  Matrix local = Matrix::Zero(3, 3);
  local(drive.transition == Transition::logical0 ? kLevel0 : kLevel1, kLevelU) = 1.0;
  return lift_local(local, s, layout).matrix();
}

double transition_frequency(const DeviceParams& params, const ControlSegment& seg,
                            const DriveSpec& drive) {
  return free_energies(params, seg)[nve_level(drive.target, drive.transition)];
}

bool nve_resonant(const DeviceParams& params, const ControlSegment& seg, int nve) {
  const double f = nve == 1 ? seg.nve1_freq : seg.nve2_freq;
  const double w = nve == 1 ? params.omega_a : params.omega_b;
  return std::abs(f - w) <= 1e-9 * w;
}

bool coupler_up(const DeviceParams& params, const ControlSegment& seg) {
  return seg.spq_coupling > params.g_off * (1.0 + 1e-9);
}

namespace {

void check_time(const ControlSegment& seg, const FrameLedger& ledger, double t) {
  const double t0 = ledger.time();
  const double tol = 1e-12 * std::max(1.0, std::abs(t0) + seg.duration);
  if (!(t >= t0 - tol && t <= t0 + seg.duration + tol)) {
    std::ostringstream os;
    os << "time " << t << " ns lies outside the segment [" << t0 << ", " << t0 + seg.duration << "] ns";
    throw ValidationError(os.str());
  }
}

// Lab Hamiltonian without its diagonal, plus the phases it must be conjugated
// with to reach the interaction frame.
Matrix offdiagonal_lab(const DeviceParams& params, const ControlSegment& seg,
                       const FrameLedger& ledger, double t, const TermMask& mask) {
  check_time(seg, ledger, t);
  seg.validate(params);
  const SubsystemLayout layout = params.layout();
  const LevelVector eps = free_energies(params, seg);
  const FrameLedger in = ledger.entered(eps);
  Matrix h = coupling_matrix(params, seg, mask);
  for (const auto& d : seg.drives) {
    const Level l = nve_level(d.target, d.transition);
    const double theta = in.level_phase(l) + eps[l] * (t - in.time()) + d.phase;
    const Matrix sp = drive_raising(layout, d);
    const cplx c = 0.5 * d.rabi * std::exp(cplx(0.0, -theta));
    h += c * sp + std::conj(c) * sp.adjoint();
  }
  return h;
}

Eigen::VectorXd phases_at(const DeviceParams& params, const ControlSegment& seg,
                          const FrameLedger& ledger, double t) {
  const LevelVector eps = free_energies(params, seg);
  const FrameLedger in = ledger.entered(eps);
  const Eigen::MatrixXd occ = occupations(params.layout());
  return in.basis_phases(occ) + basis_values(occ, eps) * (t - in.time());
}

}  // namespace

Operator hamiltonian_lab(const DeviceParams& params, const ControlSegment& seg,
                         const FrameLedger& ledger, double t, const TermMask& mask) {
  Matrix h = offdiagonal_lab(params, seg, ledger, t, mask);
  const Eigen::VectorXd eps = basis_values(occupations(params.layout()), free_energies(params, seg));
  h.diagonal() += eps.cast<cplx>();
  return Operator::hermitian(std::move(h));
}

Operator hamiltonian_interaction(const DeviceParams& params, const ControlSegment& seg,
                                 const FrameLedger& ledger, double t, const TermMask& mask) {
  Matrix h = offdiagonal_lab(params, seg, ledger, t, mask);
  const Eigen::VectorXd phi = phases_at(params, seg, ledger, t);
  const Eigen::VectorXcd p = (phi.cast<cplx>() * cplx(0.0, 1.0)).array().exp();
  h = p.asDiagonal() * h * p.conjugate().asDiagonal();
  // Restore exact Hermiticity lost to rounding in the conjugation.
  h = 0.5 * (h + h.adjoint()).eval();
  return Operator::hermitian(std::move(h));
}

Operator hamiltonian_effective(const DeviceParams& params, const ControlSegment& seg) {
  seg.validate(params);
  const SubsystemLayout layout = params.layout();
  const LocalGenerators gen = local_generators(layout);
  const int n = layout.total_dim();
  Matrix v = Matrix::Zero(n, n);
  if (nve_resonant(params, seg, 1)) v += params.g1 * gen.a_dag * gen.nve_minus[0][0];
  if (nve_resonant(params, seg, 2)) v += params.g2 * gen.b_dag * gen.nve_minus[1][0];
  if (coupler_up(params, seg)) {
    v += seg.spq_coupling * (gen.a_dag * gen.sigma_minus + gen.b_dag * gen.sigma_minus);
  }
  for (const auto& d : seg.drives) {
    v += 0.5 * d.rabi * std::exp(cplx(0.0, -d.phase)) * drive_raising(layout, d);
  }
  Matrix h = v + v.adjoint();
  return Operator::hermitian(std::move(h));
}

}  // namespace hybridnv
