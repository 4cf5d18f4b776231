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

#include "hybridnv/kernels.hpp"

#include <bit>

#include "hybridnv/errors.hpp"

namespace hybridnv::kernels {

CsrMatrix CsrMatrix::from_dense(const Eigen::MatrixXcd& m, double drop) {
  CsrMatrix out;
  out.rows = static_cast<int>(m.rows());
  out.cols = static_cast<int>(m.cols());
  out.row_ptr.reserve(out.rows + 1);
  out.row_ptr.push_back(0);
  for (int i = 0; i < out.rows; ++i) {
    for (int j = 0; j < out.cols; ++j) {
      const cplx v = m(i, j);
      if (std::abs(v) > drop) {
        out.col.push_back(j);
        out.val.push_back(v);
      }
    }
    out.row_ptr.push_back(static_cast<int>(out.val.size()));
  }
  return out;
}

Eigen::MatrixXcd CsrMatrix::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) m(i, col[k]) += val[k];
  }
  return m;
}

void csr_matvec(Exec exec, const CsrMatrix& a, const cplx* x, cplx* y) {
  const int rows = a.rows;
  if (exec == Exec::serial) {
    for (int i = 0; i < rows; ++i) {
      cplx acc = 0.0;
      for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.val[k] * x[a.col[k]];
      y[i] = acc;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) {
    cplx acc = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.val[k] * x[a.col[k]];
    y[i] = acc;
  }
}

namespace {

double node_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& coeffs, Eigen::Index k) {
  const Eigen::Index n = a.rows();
  cplx overlap = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cplx row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) row += a(i, j) * coeffs(k, j);
    overlap += coeffs(k, i) * row;
  }
  return std::norm(overlap);
}

}  // namespace

void quadratic_fidelities(Exec exec, const Eigen::MatrixXcd& a,
                          const Eigen::MatrixXd& coeffs, std::span<double> out) {
  if (a.rows() != a.cols() || coeffs.cols() != a.rows() ||
      static_cast<std::size_t>(coeffs.rows()) != out.size()) {
    throw ShapeError("quadratic_fidelities: inconsistent operand shapes");
  }
  const auto nodes = static_cast<std::int64_t>(coeffs.rows());
  if (exec == Exec::serial) {
    for (std::int64_t k = 0; k < nodes; ++k) out[k] = node_fidelity(a, coeffs, k);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < nodes; ++k) out[k] = node_fidelity(a, coeffs, k);
}

void apply_two_qubit(Exec exec, std::span<cplx> amps, int n_qubits, int qa, int qb,
                     const Eigen::Matrix4cd& gate) {
  if (n_qubits < 2 || n_qubits > 40 || amps.size() != (std::size_t{1} << n_qubits)) {
    throw ShapeError("apply_two_qubit: amplitude count is not 2^n");
  }
  if (qa < 0 || qb < 0 || qa >= n_qubits || qb >= n_qubits || qa == qb) {
    throw ShapeError("apply_two_qubit: invalid qubit pair");
  }
  const std::uint64_t ma = std::uint64_t{1} << (n_qubits - 1 - qa);
  const std::uint64_t mb = std::uint64_t{1} << (n_qubits - 1 - qb);
  const auto groups = static_cast<std::int64_t>(amps.size() >> 2);
  const std::uint64_t lo = std::min(ma, mb);
  const std::uint64_t hi = std::max(ma, mb);

  auto body = [&](std::int64_t g) {
    // Insert zero bits at the positions of the two target qubits.
    auto base = static_cast<std::uint64_t>(g);
    base = ((base & ~(lo - 1)) << 1) | (base & (lo - 1));
    base = ((base & ~(hi - 1)) << 1) | (base & (hi - 1));
    const std::uint64_t idx[4] = {base, base | mb, base | ma, base | ma | mb};
    cplx v[4];
    for (int r = 0; r < 4; ++r) v[r] = amps[idx[r]];
    for (int r = 0; r < 4; ++r) {
      amps[idx[r]] = gate(r, 0) * v[0] + gate(r, 1) * v[1] + gate(r, 2) * v[2] + gate(r, 3) * v[3];
    }
  };

  if (exec == Exec::serial) {
    for (std::int64_t g = 0; g < groups; ++g) body(g);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t g = 0; g < groups; ++g) body(g);
}

double pauli_expectation(Exec exec, std::span<const cplx> amps, std::uint64_t x_mask,
                         std::uint64_t z_mask) {
  const auto n = static_cast<std::int64_t>(amps.size());
  if (n == 0 || (n & (n - 1)) != 0) throw ShapeError("pauli_expectation: size is not 2^n");
  auto term = [&](std::int64_t x) {
    const auto ux = static_cast<std::uint64_t>(x);
    const double sign = (std::popcount(ux & z_mask) & 1) ? -1.0 : 1.0;
    return sign * (std::conj(amps[ux ^ x_mask]) * amps[ux]).real();
  };
  if (exec == Exec::serial) {
    double acc = 0.0;
    for (std::int64_t x = 0; x < n; ++x) acc += term(x);
    return acc;
  }
  // Fixed block partition so the summation order is independent of threads.
  constexpr std::int64_t kBlock = 4096;
  const std::int64_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    double acc = 0.0;
    const std::int64_t end = std::min(n, (b + 1) * kBlock);
    for (std::int64_t x = b * kBlock; x < end; ++x) acc += term(x);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

}  // namespace hybridnv::kernels
