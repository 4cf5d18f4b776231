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

#include "hybridnv/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "hybridnv/errors.hpp"

namespace hybridnv {
namespace {

constexpr double kNormDriftLimit = 1e-7;
constexpr double kMinStepDuration = 1e-9;

Eigen::VectorXcd unit_phases(const Eigen::VectorXd& phi) {
  Eigen::VectorXcd p(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) p(i) = std::polar(1.0, phi(i));
  return p;
}

void check_norm(double before, double after) {
  if (std::abs(after - before) > kNormDriftLimit * std::max(before, 1.0)) {
    throw NumericalError("norm drift " + std::to_string(after - before) + " exceeds 1e-7");
  }
}

}  // namespace

double Timeline::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

int Timeline::step_count() const {
  int count = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i == 0 || segments[i].step == 0 || segments[i].step != segments[i - 1].step) ++count;
  }
  return count;
}

void Timeline::validate(const DeviceParams& params) const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    try {
      segments[i].validate(params);
    } catch (const ValidationError& e) {
      throw ValidationError("segments[" + std::to_string(i) + "]." + e.what());
    }
  }
}

double default_step_cap(const DeviceParams& p) {
  const double w = std::max({p.omega_a, p.omega_b, p.omega_eg, p.omega_11, p.omega_21,
                             p.omega_10_detuned, p.omega_20_detuned});
  return 1.0 / (40.0 * (w / kTwoPi));
}

SegmentPropagator::SegmentPropagator(const DeviceParams& params, const ControlSegment& seg,
                                     const PropagationOptions& options)
    : mode_(options.mode), exec_(options.exec) {
  seg.validate(params);
  const SubsystemLayout layout = params.layout();
  occ_ = occupations(layout);
  eps_ = free_energies(params, seg);
  basis_eps_ = basis_values(occ_, eps_);
  excitation_ = occ_.rowwise().sum();
  step_cap_ = options.max_step_ns > 0.0 ? options.max_step_ns : default_step_cap(params);

  if (mode_ == Mode::effective) {
    const Operator h = hamiltonian_effective(params, seg);
    exact_ = options.method == Method::exact;
    if (exact_) {
      const Eigensystem es = eig_hermitian(h);
      lambda_ = es.values;
      vectors_ = es.vectors;
    } else {
      coupling_ = kernels::CsrMatrix::from_dense(h.matrix());
    }
    return;
  }

  const Matrix vc = coupling_matrix(params, seg, options.terms);
  Matrix d = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (const auto& drive : seg.drives) {
    const Matrix sp = drive_raising(layout, drive);
    const cplx c = 0.5 * drive.rabi * std::exp(cplx(0.0, -drive.phase));
    d += c * sp + std::conj(c) * sp.adjoint();
  }
  coupling_ = kernels::CsrMatrix::from_dense(vc);
  drive_ = kernels::CsrMatrix::from_dense(d);

  exact_ = options.method == Method::exact && seg.drives.size() <= 1;
  if (!exact_) return;
  Matrix k = vc;
  k.diagonal() += basis_eps_.cast<cplx>();
  if (!seg.drives.empty()) {
    const DriveSpec& drive = seg.drives.front();
    drive_level_ = nve_level(drive.target, drive.transition);
    omega_d_ = eps_[drive_level_];
    drive_phase_ = drive.phase;
    k.diagonal() -= (omega_d_ * excitation_).cast<cplx>();
    const Matrix sp = drive_raising(layout, drive);
    k += 0.5 * drive.rabi * (sp + sp.adjoint());
  }
  const Eigensystem es = eig_hermitian(Operator::hermitian(std::move(k)));
  lambda_ = es.values;
  vectors_ = es.vectors;
}

Vector SegmentPropagator::apply(const Vector& psi, const FrameLedger& ledger, double tau) const {
  if (psi.size() != occ_.rows()) throw ShapeError("state dimension does not match the segment");
  if (tau == 0.0) return psi;
  return exact_ ? apply_exact(psi, ledger, tau) : apply_stepped(psi, ledger, tau);
}

Vector SegmentPropagator::apply_exact(const Vector& psi, const FrameLedger& ledger, double tau) const {
  const Eigen::VectorXcd rot = (-lambda_ * tau).unaryExpr([](double x) { return std::polar(1.0, x); });
  if (mode_ == Mode::effective) {
    Vector c = vectors_.adjoint() * psi;
    c.array() *= rot.array();
    return vectors_ * c;
  }
  const FrameLedger in = ledger.entered(eps_);
  const Eigen::VectorXd phi0 = in.basis_phases(occ_);
  const double theta0 = drive_level_ >= 0 ? in.level_phase(static_cast<Level>(drive_level_)) + drive_phase_ : 0.0;
  const Eigen::VectorXcd pre = unit_phases(theta0 * excitation_ - phi0);
  const Eigen::VectorXcd post =
      unit_phases(phi0 + basis_eps_ * tau - (omega_d_ * tau + theta0) * excitation_);
  Vector c = vectors_.adjoint() * pre.cwiseProduct(psi);
  c.array() *= rot.array();
  Vector out = vectors_ * c;
  out.array() *= post.array();
  return out;
}

void SegmentPropagator::derivative(const Vector& psi, const Eigen::VectorXcd& phase, Vector& scratch,
                                   Vector& out) const {
  const cplx minus_i(0.0, -1.0);
  if (mode_ == Mode::effective) {
    kernels::csr_matvec(exec_, coupling_, psi.data(), out.data());
    out *= minus_i;
    return;
  }
  scratch = phase.conjugate().cwiseProduct(psi);
  kernels::csr_matvec(exec_, coupling_, scratch.data(), out.data());
  out.array() *= phase.array();
  kernels::csr_matvec(exec_, drive_, psi.data(), scratch.data());
  out += scratch;
  out *= minus_i;
}

Vector SegmentPropagator::apply_stepped(const Vector& psi, const FrameLedger& ledger, double tau) const {
  const auto steps = static_cast<long>(std::max(100.0, std::ceil(tau / step_cap_ - 1e-9)));
  const double h = tau / static_cast<double>(steps);
  const FrameLedger in = ledger.entered(eps_);
  const Eigen::VectorXd phi0 = in.basis_phases(occ_);
  const Eigen::Index n = psi.size();
  Vector y = psi, k1(n), k2(n), k3(n), k4(n), tmp(n), scratch(n);
  Eigen::VectorXcd p0(n), pm(n), p1(n);
  if (mode_ == Mode::effective) p0.setOnes();
  auto phase_at = [&](double t, Eigen::VectorXcd& out) {
    if (mode_ == Mode::full) out = unit_phases(phi0 + basis_eps_ * t);
  };
  phase_at(0.0, p1);
  for (long s = 0; s < steps; ++s) {
    const double t = h * static_cast<double>(s);
    p0 = p1;
    phase_at(t + 0.5 * h, pm);
    phase_at(h * static_cast<double>(s + 1), p1);
    derivative(y, p0, scratch, k1);
    tmp = y + (0.5 * h) * k1;
    derivative(tmp, pm, scratch, k2);
    tmp = y + (0.5 * h) * k2;
    derivative(tmp, pm, scratch, k3);
    tmp = y + h * k3;
    derivative(tmp, p1, scratch, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  check_norm(psi.norm(), y.norm());
  return y;
}

Propagator::Propagator(DeviceParams params, PropagationOptions options)
    : params_(std::move(params)), options_(std::move(options)), layout_(SubsystemLayout::canonical(1)) {
  params_.validate();
  layout_ = params_.layout();
}

std::shared_ptr<const SegmentPropagator> Propagator::segment(const ControlSegment& seg) {
  std::vector<double> key = {seg.spq_coupling, seg.nve1_freq, seg.nve2_freq};
  for (const auto& d : seg.drives) {
    key.insert(key.end(), {static_cast<double>(d.target), d.transition == Transition::logical0 ? 0.0 : 1.0,
                           d.rabi, d.phase});
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto built = std::make_shared<const SegmentPropagator>(params_, seg, options_);
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(std::move(key), std::move(built)).first->second;
}

std::pair<Vector, FrameLedger> Propagator::evolve_from(const Vector& psi, const Timeline& tl,
                                                       FrameLedger ledger) {
  tl.validate(params_);
  Vector y = psi;
  for (const auto& seg : tl.segments) {
    y = segment(seg)->apply(y, ledger, seg.duration);
    ledger = ledger.advanced(free_energies(params_, seg), seg.duration);
  }
  return {std::move(y), ledger};
}

Vector Propagator::evolve(const Vector& psi, const Timeline& tl) {
  return evolve_from(psi, tl, FrameLedger(options_.frame)).first;
}

Trajectory Propagator::run(const PureState& initial, const Timeline& tl, const SamplingSpec& sampling) {
  tl.validate(params_);
  if (initial.dim() != layout_.total_dim()) throw ShapeError("initial state dimension does not match layout");
  if (sampling.samples < 0) throw ValidationError("samples: must be >= 0");
  for (int i : sampling.tracked) {
    if (i < 0 || i >= layout_.total_dim()) throw ShapeError("tracked basis index out of range");
  }
  Trajectory traj;
  traj.tracked = sampling.tracked;
  const int ns = sampling.samples;
  const double total = tl.total_duration();
  traj.times.resize(ns);
  for (int k = 0; k < ns; ++k) traj.times[k] = ns > 1 ? total * k / (ns - 1) : 0.0;
  if (ns > 0) traj.times.back() = ns > 1 ? total : 0.0;
  traj.populations = Eigen::MatrixXd::Zero(ns, static_cast<Eigen::Index>(sampling.tracked.size()));
  traj.norms.resize(ns);

  auto record = [&](int k, const Vector& y) {
    for (std::size_t j = 0; j < sampling.tracked.size(); ++j) {
      traj.populations(k, static_cast<Eigen::Index>(j)) = std::norm(y(sampling.tracked[j]));
    }
    traj.norms[k] = y.norm();
  };

  // At t = 0 the lab and interaction frames coincide.
  Vector y = initial.amplitudes();
  FrameLedger ledger(options_.frame);
  int k = 0;
  double t0 = 0.0;
  for (std::size_t s = 0; s < tl.segments.size(); ++s) {
    const ControlSegment& seg = tl.segments[s];
    const auto prop = segment(seg);
    const LevelVector eps = free_energies(params_, seg);
    const double t1 = t0 + seg.duration;
    const bool last = s + 1 == tl.segments.size();
    Vector cur = y;
    FrameLedger cur_ledger = ledger;
    double cur_t = t0;
    while (k < ns && (traj.times[k] <= t1 || last)) {
      const double dt = std::clamp(traj.times[k] - t0, 0.0, seg.duration);
      if (prop->exact()) {
        record(k, prop->apply(y, ledger, dt));
      } else {
        const double step = std::max(0.0, t0 + dt - cur_t);
        cur = prop->apply(cur, cur_ledger, step);
        cur_ledger = cur_ledger.advanced(eps, step);
        cur_t += step;
        record(k, cur);
      }
      ++k;
    }
    y = prop->exact() ? prop->apply(y, ledger, seg.duration)
                      : prop->apply(cur, cur_ledger, std::max(0.0, t1 - cur_t));
    ledger = ledger.advanced(eps, seg.duration);
    t0 = t1;
  }
  for (; k < ns; ++k) record(k, y);
  traj.final_state = PureState(std::move(y), Frame::interaction, kNormDriftLimit);
  traj.final_ledger = ledger;
  return traj;
}

std::pair<PureState, FrameLedger> propagate_segment(const PureState& state, const ControlSegment& seg,
                                                    const DeviceParams& params, const FrameLedger& ledger,
                                                    const PropagationOptions& options) {
  if (ledger.policy() != options.frame) throw ValidationError("ledger policy does not match options.frame");
  if (state.dim() != params.layout().total_dim()) throw ShapeError("state dimension does not match layout");
  const SegmentPropagator prop(params, seg, options);
  if (!prop.exact() && seg.duration > 0.0 && seg.duration < kMinStepDuration) {
    throw NumericalError("integrator step underflow: duration " + std::to_string(seg.duration) + " ns");
  }
  const LevelVector eps = free_energies(params, seg);
  const FrameLedger next = ledger.advanced(eps, seg.duration);
  if (state.frame() == Frame::interaction) {
    return {PureState(prop.apply(state.amplitudes(), ledger, seg.duration), Frame::interaction, kNormDriftLimit),
            next};
  }
  const Eigen::MatrixXd occ = occupations(params.layout());
  const Vector in = unit_phases(ledger.entered(eps).basis_phases(occ)).cwiseProduct(state.amplitudes());
  const Vector out = prop.apply(in, ledger, seg.duration);
  const Vector lab = unit_phases(-next.basis_phases(occ)).cwiseProduct(out);
  return {PureState(lab, Frame::lab, kNormDriftLimit), next};
}

Trajectory run_timeline(const PureState& initial, const Timeline& tl, const DeviceParams& params,
                        const SamplingSpec& sampling, const PropagationOptions& options) {
  Propagator prop(params, options);
  return prop.run(initial, tl, sampling);
}

double cross_check_frames(const PureState& initial, const Timeline& tl, const DeviceParams& params,
                          const PropagationOptions& options) {
  params.validate();
  tl.validate(params);
  const SubsystemLayout layout = params.layout();
  const Eigen::MatrixXd occ = occupations(layout);
  const Eigen::VectorXd n_exc = occ.rowwise().sum();

  // Lab route: exact propagators built from hamiltonian_lab, converted at
  // every segment boundary through the ledger.
  Vector y = initial.amplitudes();
  FrameLedger ledger(options.frame);
  for (const auto& seg : tl.segments) {
    if (seg.drives.size() > 1) throw ValidationError("cross_check_frames supports at most one drive per segment");
    const LevelVector eps = free_energies(params, seg);
    const FrameLedger in = ledger.entered(eps);
    const FrameLedger next = ledger.advanced(eps, seg.duration);
    Vector lab = unit_phases(-in.basis_phases(occ)).cwiseProduct(y);
    Matrix h = hamiltonian_lab(params, seg, ledger, ledger.time(), options.terms).matrix();
    double omega_d = 0.0, theta0 = 0.0;
    if (!seg.drives.empty()) {
      const DriveSpec& d = seg.drives.front();
      const Level l = nve_level(d.target, d.transition);
      omega_d = eps[l];
      theta0 = in.level_phase(l) + d.phase;
      const Eigen::VectorXcd r = unit_phases(theta0 * n_exc);
      h = r.asDiagonal() * h * r.conjugate().asDiagonal();
      h.diagonal() -= (omega_d * n_exc).cast<cplx>();
      h = 0.5 * (h + h.adjoint()).eval();
    }
    const Eigensystem es = eig_hermitian(Operator::hermitian(std::move(h), 1e-10));
    lab = unit_phases(theta0 * n_exc).cwiseProduct(lab);
    Vector c = es.vectors.adjoint() * lab;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::polar(1.0, -es.values(i) * seg.duration);
    lab = es.vectors * c;
    lab = unit_phases(-(omega_d * seg.duration + theta0) * n_exc).cwiseProduct(lab);
    y = unit_phases(next.basis_phases(occ)).cwiseProduct(lab);
    ledger = next;
  }

  PropagationOptions stepped = options;
  stepped.mode = Mode::full;
  stepped.method = Method::stepped;
  // RK4 truncation at the default cap sits near 1e-8; a quarter step keeps it
  // well under the frame mismatch we are trying to see.
  if (stepped.max_step_ns <= 0.0) stepped.max_step_ns = 0.25 * default_step_cap(params);
  Propagator prop(params, stepped);
  const Vector z = prop.evolve(initial.amplitudes(), tl);
  return (y - z).cwiseAbs().maxCoeff();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const SubsystemLayout& layout) {
  os << "t_ns,norm";
  for (int i : traj.tracked) {
    std::string label;
    for (int s = 0; s < layout.size(); ++s) label += level_name(layout[s].kind, layout.digit(i, s));
    os << ",pop_" << label;
  }
  os << '\n' << std::setprecision(12);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << traj.times[k] << ',' << traj.norms[k];
    for (Eigen::Index j = 0; j < traj.populations.cols(); ++j) {
      os << ',' << traj.populations(static_cast<Eigen::Index>(k), j);
    }
    os << '\n';
  }
}

}  // namespace hybridnv
