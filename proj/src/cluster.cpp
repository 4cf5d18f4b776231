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

#include "hybridnv/cluster.hpp"

#include <cmath>

#include "hybridnv/errors.hpp"

namespace hybridnv {

Lattice::Lattice(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ValidationError("dims: lattice needs at least one axis");
  strides_.assign(dims_.size(), 1);
  for (int ax = static_cast<int>(dims_.size()) - 1; ax >= 0; --ax) {
    if (dims_[ax] < 1) throw ValidationError("dims: every extent must be >= 1");
    strides_[ax] = nodes_;
    if (nodes_ > (1 << 24) / dims_[ax]) throw ValidationError("dims: lattice too large");
    nodes_ *= dims_[ax];
  }
  for (int ax = 0; ax < dimensions(); ++ax) {
    for (int n = 0; n < nodes_; ++n) {
      if ((n / strides_[ax]) % dims_[ax] + 1 < dims_[ax]) edges_.push_back({n, n + strides_[ax], ax});
    }
  }
}

std::vector<int> Lattice::coords(int node) const {
  if (node < 0 || node >= nodes_) throw ShapeError("node index out of range");
  std::vector<int> c(dims_.size());
  for (std::size_t ax = 0; ax < dims_.size(); ++ax) c[ax] = (node / strides_[ax]) % dims_[ax];
  return c;
}

int Lattice::node(const std::vector<int>& c) const {
  if (c.size() != dims_.size()) throw ShapeError("coordinate rank does not match lattice");
  int n = 0;
  for (std::size_t ax = 0; ax < dims_.size(); ++ax) {
    if (c[ax] < 0 || c[ax] >= dims_[ax]) throw ShapeError("coordinate out of range");
    n += c[ax] * strides_[ax];
  }
  return n;
}

std::vector<int> Lattice::neighbors(int node) const {
  std::vector<int> out;
  for (const auto& e : edges_) {
    if (e.a == node) out.push_back(e.b);
    if (e.b == node) out.push_back(e.a);
  }
  return out;
}

LatticeSchedule schedule_lattice(const Lattice& lat) {
  LatticeSchedule s;
  for (int ax = 0; ax < lat.dimensions(); ++ax) {
    std::vector<Edge> round_a, round_b;
    for (const auto& e : lat.edges()) {
      if (e.axis != ax) continue;
      // 1-based coordinate of the lower end: odd pairs (2i-1, 2i) go first.
      const int lower = lat.coords(e.a)[ax] + 1;
      (lower % 2 == 1 ? round_a : round_b).push_back(e);
    }
    s.rounds.push_back(std::move(round_a));
    s.rounds.push_back(std::move(round_b));
  }
  return s;
}

LogicalState::LogicalState(int n_qubits, Vector amplitudes) : n_(n_qubits), v_(std::move(amplitudes)) {
  if (n_qubits < 1 || n_qubits > 30 || v_.size() != (Eigen::Index{1} << n_qubits)) {
    throw ShapeError("logical state needs 2^n amplitudes");
  }
  if (std::abs(v_.norm() - 1.0) > 1e-12) throw ValidationError("logical state is not normalized");
}

LogicalState prepare_plus_all(const Lattice& lat) {
  const int n = lat.node_count();
  if (n > 24) throw ValidationError("dims: too many nodes for a state vector");
  const auto size = Eigen::Index{1} << n;
  return LogicalState(n, Vector::Constant(size, cplx(std::pow(2.0, -0.5 * n), 0.0)));
}

LogicalState apply_schedule(LogicalState state, const LatticeSchedule& sched, const Matrix& gate,
                            kernels::Exec exec, double* retained_weight) {
  if (gate.rows() != 4 || gate.cols() != 4) throw ShapeError("cluster gate must be 4x4");
  Eigen::Matrix4cd relabel = Eigen::Matrix4cd::Identity();
  relabel(2, 2) = relabel(3, 3) = -1.0;
  const Eigen::Matrix4cd g = relabel * Eigen::Matrix4cd(gate);
  const int n = state.qubits();
  Vector& v = state.amplitudes();
  std::span<cplx> amps(v.data(), static_cast<std::size_t>(v.size()));
  double retained = 1.0;
  for (const auto& round : sched.rounds) {
    for (const auto& e : round) {
      if (e.a >= n || e.b >= n) throw ShapeError("schedule references a node outside the state");
      kernels::apply_two_qubit(exec, amps, n, e.a, e.b, g);
      const double norm = v.norm();
      if (norm <= 0.0) throw NumericalError("cluster state vanished under the supplied gate");
      retained *= norm * norm;
      v /= norm;
    }
  }
  if (retained_weight) *retained_weight = retained;
  return state;
}

std::vector<double> stabilizer_check(const LogicalState& state, const Lattice& lat, kernels::Exec exec) {
  const int n = lat.node_count();
  if (state.qubits() != n) throw ShapeError("state size does not match lattice");
  const auto& v = state.amplitudes();
  std::span<const cplx> amps(v.data(), static_cast<std::size_t>(v.size()));
  auto bit = [n](int q) { return std::uint64_t{1} << (n - 1 - q); };
  std::vector<double> out(n);
  for (int a = 0; a < n; ++a) {
    std::uint64_t z = 0;
    for (int b : lat.neighbors(a)) z |= bit(b);
    out[a] = kernels::pauli_expectation(exec, amps, bit(a), z);
  }
  return out;
}

std::string edge_label(const Lattice& lat, const Edge& e) {
  auto fmt = [](const std::vector<int>& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i] + 1);
    return s + ")";
  };
  return fmt(lat.coords(e.a)) + "-" + fmt(lat.coords(e.b));
}

}  // namespace hybridnv
