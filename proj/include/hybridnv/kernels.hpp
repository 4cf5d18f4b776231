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

// Hot loops with two interchangeable implementations. The serial versions are
// the reference; the parallel versions use OpenMP and must agree with them to
// rounding. Reductions are done over per-thread-independent partial arrays and
// summed in a fixed order, so parallel results do not depend on thread count.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hybridnv::kernels {

using cplx = std::complex<double>;

enum class Exec { serial, parallel };

// Compressed sparse row matrix.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<cplx> val;

  static CsrMatrix from_dense(const Eigen::MatrixXcd& m, double drop = 0.0);
  Eigen::MatrixXcd to_dense() const;
  std::size_t nnz() const { return val.size(); }
};

// y = A x
void csr_matvec(Exec exec, const CsrMatrix& a, const cplx* x, cplx* y);

// Fidelity of each grid node for a quadratic overlap problem.
//   out[k] = |c_k^T A c_k|^2,  c_k = coeffs.row(k)
// A is the n x n overlap matrix between targets and evolved basis inputs.
void quadratic_fidelities(Exec exec, const Eigen::MatrixXcd& a,
                          const Eigen::MatrixXd& coeffs, std::span<double> out);

// Applies a 4x4 gate to qubits (qa, qb) of an n-qubit amplitude vector.
// Qubit 0 is the most significant bit; the gate basis is |q_a q_b>.
void apply_two_qubit(Exec exec, std::span<cplx> amps, int n_qubits, int qa,
                     int qb, const Eigen::Matrix4cd& gate);

// <psi| X^x_mask Z^z_mask |psi> for masks over amplitude-index bits.
double pauli_expectation(Exec exec, std::span<const cplx> amps,
                         std::uint64_t x_mask, std::uint64_t z_mask);

}  // namespace hybridnv::kernels
