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

#include "hybridnv/analysis.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>

#include "hybridnv/errors.hpp"

namespace hybridnv {

DensityMatrixReport partial_trace(const PureState& state, const SubsystemLayout& layout,
                                  const std::vector<int>& keep) {
  if (keep.empty()) throw ValidationError("partial_trace: keep set is empty");
  if (state.dim() != layout.total_dim()) throw ShapeError("partial_trace: state does not match layout");
  std::vector<bool> kept(layout.size(), false);
  for (int s : keep) {
    if (s < 0 || s >= layout.size()) throw ShapeError("partial_trace: subsystem index out of range");
    if (kept[s]) throw ValidationError("partial_trace: duplicate subsystem in keep set");
    kept[s] = true;
  }
  int k_dim = 1;
  for (int s : keep) k_dim *= layout.dim(s);
  const int e_dim = layout.total_dim() / k_dim;

  Matrix psi = Matrix::Zero(k_dim, e_dim);
  for (int i = 0; i < layout.total_dim(); ++i) {
    const auto d = layout.digits(i);
    int k = 0, e = 0;
    for (int s : keep) k = k * layout.dim(s) + d[s];
    for (int s = 0; s < layout.size(); ++s) {
      if (!kept[s]) e = e * layout.dim(s) + d[s];
    }
    psi(k, e) = state[i];
  }

  DensityMatrixReport r;
  r.rho = psi * psi.adjoint();
  for (int s : keep) r.subsystems.push_back(layout[s].name);
  r.labels.resize(k_dim);
  for (int k = 0; k < k_dim; ++k) {
    std::string label;
    int rem = k;
    for (auto it = keep.rbegin(); it != keep.rend(); ++it) {
      label.insert(0, level_name(layout[*it].kind, rem % layout.dim(*it)));
      rem /= layout.dim(*it);
    }
    r.labels[k] = label;
  }
  return r;
}

DensityMatrixReport nve_pair_density(const PureState& state, const SubsystemLayout& layout) {
  if (!layout.is_canonical()) throw ShapeError("nve_pair_density requires the canonical layout");
  return partial_trace(state, layout, {slot::kNve1, slot::kNve2});
}

DensityMatrixReport logical_spq_density(const PureState& state, const SubsystemLayout& layout) {
  if (!layout.is_canonical()) throw ShapeError("logical_spq_density requires the canonical layout");
  const DensityMatrixReport full = partial_trace(state, layout, {slot::kNve1, slot::kNve2, slot::kSpq});
  // Rows of the 3x3x2 block with both NVEs in a logical level.
  std::vector<int> rows;
  for (int x : {kLevel0, kLevel1}) {
    for (int y : {kLevel0, kLevel1}) {
      for (int q : {kSpqGround, kSpqExcited}) rows.push_back((x * 3 + y) * 2 + q);
    }
  }
  DensityMatrixReport r;
  r.subsystems = full.subsystems;
  const auto n = static_cast<Eigen::Index>(rows.size());
  r.rho = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.labels.push_back(full.labels[rows[i]]);
    for (Eigen::Index j = 0; j < n; ++j) r.rho(i, j) = full.rho(rows[i], rows[j]);
  }
  r.retained_weight = r.rho.trace().real();
  if (r.retained_weight <= 0.0) throw NumericalError("logical_spq_density: no weight in the logical block");
  r.rho /= r.retained_weight;
  return r;
}

void write_density_csv(std::ostream& os, const DensityMatrixReport& report) {
  os << "row,col,re,im\n" << std::setprecision(12);
  for (Eigen::Index i = 0; i < report.rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < report.rho.cols(); ++j) {
      os << report.labels[i] << ',' << report.labels[j] << ',' << report.rho(i, j).real() << ','
         << report.rho(i, j).imag() << '\n';
    }
  }
}

int nve_basis_index(const SubsystemLayout& layout, int nve1_level, int nve2_level) {
  return layout.index({nve1_level, 0, kSpqGround, 0, nve2_level});
}

std::vector<int> logical_basis(const SubsystemLayout& layout) {
  return {nve_basis_index(layout, kLevel0, kLevel0), nve_basis_index(layout, kLevel0, kLevel1),
          nve_basis_index(layout, kLevel1, kLevel0), nve_basis_index(layout, kLevel1, kLevel1)};
}

Eigen::Matrix4cd cphase_target() {
  Eigen::Matrix4cd t = Eigen::Matrix4cd::Identity();
  t(2, 2) = -1.0;
  return t;
}

Eigen::Matrix4cd cnot_target() {
  Eigen::Matrix4cd t = Eigen::Matrix4cd::Zero();
  t(0, 1) = t(1, 0) = t(2, 2) = t(3, 3) = 1.0;
  return t;
}

FidelityProblem transfer_problem(const SubsystemLayout& layout) {
  FidelityProblem p;
  p.protocol = "state_transfer";
  p.axes = 1;
  p.inputs = {nve_basis_index(layout, kLevel0, kLevelU), nve_basis_index(layout, kLevel1, kLevelU)};
  p.targets = Matrix::Zero(layout.total_dim(), 2);
  p.targets(nve_basis_index(layout, kLevelU, kLevel0), 0) = 1.0;
  p.targets(nve_basis_index(layout, kLevelU, kLevel1), 1) = 1.0;
  return p;
}

FidelityProblem gate_problem(const SubsystemLayout& layout, const Eigen::Matrix4cd& gate, std::string name) {
  FidelityProblem p;
  p.protocol = std::move(name);
  p.axes = 2;
  p.inputs = logical_basis(layout);
  p.targets = Matrix::Zero(layout.total_dim(), 4);
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) p.targets(p.inputs[i], j) = gate(i, j);
  }
  return p;
}

Eigen::MatrixXd grid_coefficients(int axes, int m) {
  if (m < kMinThetaGrid) throw ValidationError("theta_grid: must be >= 9");
  if (axes == 1) {
    Eigen::MatrixXd c(m, 2);
    for (int k = 0; k < m; ++k) {
      const double t = kTwoPi * k / m;
      c(k, 0) = std::sin(t);
      c(k, 1) = std::cos(t);
    }
    return c;
  }
  if (axes == 2) {
    Eigen::MatrixXd c(m * m, 4);
    for (int k1 = 0; k1 < m; ++k1) {
      const double t1 = kTwoPi * k1 / m;
      for (int k2 = 0; k2 < m; ++k2) {
        const double t2 = kTwoPi * k2 / m;
        const int r = k1 * m + k2;
        c(r, 0) = std::cos(t1) * std::cos(t2);
        c(r, 1) = std::cos(t1) * std::sin(t2);
        c(r, 2) = std::sin(t1) * std::cos(t2);
        c(r, 3) = std::sin(t1) * std::sin(t2);
      }
    }
    return c;
  }
  throw ValidationError("grid axes must be 1 or 2");
}

namespace {

Matrix propagate_inputs(Propagator& prop, const Timeline& tl, const std::vector<int>& inputs) {
  const int d = prop.layout().total_dim();
  Matrix psi(d, static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    Vector e = Vector::Zero(d);
    e(inputs[j]) = 1.0;
    psi.col(static_cast<Eigen::Index>(j)) = prop.evolve(e, tl);
  }
  return psi;
}

}  // namespace

Matrix overlap_matrix(Propagator& prop, const Timeline& tl, const FidelityProblem& problem) {
  if (problem.targets.rows() != prop.layout().total_dim() ||
      problem.targets.cols() != static_cast<Eigen::Index>(problem.inputs.size())) {
    throw ShapeError("fidelity problem does not match the layout");
  }
  return problem.targets.adjoint() * propagate_inputs(prop, tl, problem.inputs);
}

double average_from_overlap(const Matrix& a, int axes, int m, kernels::Exec exec, std::vector<double>* nodes) {
  const Eigen::MatrixXd c = grid_coefficients(axes, m);
  std::vector<double> f(static_cast<std::size_t>(c.rows()));
  kernels::quadratic_fidelities(exec, a, c, f);
  const double avg = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
  if (nodes) *nodes = std::move(f);
  return avg;
}

FidelityReport evaluate_fidelity(Propagator& prop, const Timeline& tl, const FidelityProblem& problem, int m,
                                 bool with_leakage) {
  FidelityReport r;
  r.protocol = problem.protocol;
  r.grid = m;
  r.total_time_ns = tl.total_duration();
  const SubsystemLayout& layout = prop.layout();
  const Matrix psi = propagate_inputs(prop, tl, problem.inputs);
  const Matrix a = problem.targets.adjoint() * psi;
  r.average = average_from_overlap(a, problem.axes, m, prop.options().exec, &r.node_fidelities);
  r.min = *std::min_element(r.node_fidelities.begin(), r.node_fidelities.end());
  r.max = *std::max_element(r.node_fidelities.begin(), r.node_fidelities.end());

  std::vector<bool> support(layout.total_dim(), false);
  for (Eigen::Index j = 0; j < problem.targets.cols(); ++j) {
    for (Eigen::Index i = 0; i < problem.targets.rows(); ++i) {
      if (problem.targets(i, j) != cplx(0.0)) support[i] = true;
    }
  }
  for (Eigen::Index j = 0; j < psi.cols(); ++j) {
    double inside = 0.0;
    for (int i = 0; i < layout.total_dim(); ++i) {
      if (support[i]) inside += std::norm(psi(i, j));
    }
    r.leakage.final_nontarget = std::max(r.leakage.final_nontarget, std::max(0.0, 1.0 - inside));
  }

  if (with_leakage) {
    SamplingSpec spec;
    for (int i = 0; i < layout.total_dim(); ++i) {
      if (layout.digit(i, slot::kTlrA) == 2 || layout.digit(i, slot::kTlrB) == 2) spec.tracked.push_back(i);
    }
    for (int input : problem.inputs) {
      Vector e = Vector::Zero(layout.total_dim());
      e(input) = 1.0;
      const Trajectory traj = prop.run(PureState(e, Frame::interaction), tl, spec);
      if (traj.populations.size() > 0) {
        r.leakage.max_photon2 = std::max(r.leakage.max_photon2, traj.populations.rowwise().sum().maxCoeff());
      }
    }
  }
  return r;
}

FidelityReport avg_fidelity_transfer(const DeviceParams& params, const Timeline& tl, int m,
                                     const PropagationOptions& options) {
  if (m < kMinThetaGrid) throw ValidationError("theta_grid: must be >= 9");
  Propagator prop(params, options);
  return evaluate_fidelity(prop, tl, transfer_problem(prop.layout()), m);
}

FidelityReport avg_fidelity_cphase(const DeviceParams& params, const Timeline& tl, int m,
                                   const PropagationOptions& options) {
  if (m < kMinThetaGrid) throw ValidationError("theta_grid: must be >= 9");
  Propagator prop(params, options);
  return evaluate_fidelity(prop, tl, gate_problem(prop.layout(), cphase_target(), "cphase"), m);
}

LogicalGate extract_logical_gate(Propagator& prop, const Timeline& tl) {
  const std::vector<int> basis = logical_basis(prop.layout());
  const Matrix psi = propagate_inputs(prop, tl, basis);
  LogicalGate g;
  double min_norm = 1.0;
  for (int j = 0; j < 4; ++j) {
    double col = 0.0;
    for (int i = 0; i < 4; ++i) {
      g.matrix(i, j) = psi(basis[i], j);
      col += std::norm(g.matrix(i, j));
    }
    min_norm = std::min(min_norm, col);
  }
  g.leakage = 1.0 - min_norm;
  if (g.leakage > 0.5) {
    throw NumericalError("logical gate extraction degenerate: leakage " + std::to_string(g.leakage));
  }
  return g;
}

LogicalGate extract_logical_gate(const DeviceParams& params, const Timeline& tl, const PropagationOptions& options) {
  Propagator prop(params, options);
  return extract_logical_gate(prop, tl);
}

double gate_metric(const Eigen::Matrix4cd& target, const Eigen::Matrix4cd& actual) {
  return 1.0 - std::abs((target.adjoint() * actual).trace()) / 4.0;
}

}  // namespace hybridnv
