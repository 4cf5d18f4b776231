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

#include <string>
#include <vector>

#include "hybridnv/kernels.hpp"
#include "hybridnv/tensorspace.hpp"

namespace hybridnv {

// Largest lattice for which state vectors are built.
inline constexpr int kClusterStateNodeCap = 16;

struct Edge {
  int a = 0;  // lower coordinate along `axis`
  int b = 0;
  int axis = 0;
  bool operator==(const Edge&) const = default;
};

// Hypercubic lattice. Node index is row-major in the coordinates, the first
// axis being the slowest.
class Lattice {
 public:
  explicit Lattice(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int dimensions() const { return static_cast<int>(dims_.size()); }
  int node_count() const { return nodes_; }
  std::vector<int> coords(int node) const;
  int node(const std::vector<int>& coords) const;
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<int> neighbors(int node) const;

 private:
  std::vector<int> dims_;
  std::vector<int> strides_;
  int nodes_ = 1;
  std::vector<Edge> edges_;
};

struct LatticeSchedule {
  // Two rounds per axis: pairs (2i-1, 2i) then (2i, 2i+1), 1-based coordinates.
  std::vector<std::vector<Edge>> rounds;
};

LatticeSchedule schedule_lattice(const Lattice& lat);

// Amplitudes over n qubits; qubit 0 is the most significant bit.
class LogicalState {
 public:
  LogicalState(int n_qubits, Vector amplitudes);
  int qubits() const { return n_; }
  const Vector& amplitudes() const { return v_; }
  Vector& amplitudes() { return v_; }

 private:
  int n_;
  Vector v_;
};

LogicalState prepare_plus_all(const Lattice& lat);

// Applies the device c-phase gate on every scheduled edge, round by round.
// The device gate diag(1,1,-1,1) equals CZ up to a Z on the edge's first
// qubit; that local Z is absorbed as a frame relabeling, so the entangler
// applied is diag(1,1,-1,-1) * gate. Non-unitary (leaky) gates are applied
// as given and the state renormalized; the product of the retained norms is
// returned through `retained_weight`.
LogicalState apply_schedule(LogicalState state, const LatticeSchedule& sched, const Matrix& gate,
                            kernels::Exec exec = kernels::Exec::serial, double* retained_weight = nullptr);

// <X_a prod_{b in nbr(a)} Z_b> for every node a.
std::vector<double> stabilizer_check(const LogicalState& state, const Lattice& lat,
                                     kernels::Exec exec = kernels::Exec::serial);

// Schedule rounds rendered as coordinate pairs, e.g. "(1,2)-(1,3)".
std::string edge_label(const Lattice& lat, const Edge& e);

}  // namespace hybridnv
