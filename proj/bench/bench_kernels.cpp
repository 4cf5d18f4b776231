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


// Serial reference vs OpenMP kernels. Each benchmark takes the execution
// policy as its first argument (0 serial, 1 parallel) and a size as its second.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "hybridnv/kernels.hpp"

namespace {

using hybridnv::kernels::cplx;
using hybridnv::kernels::Exec;

Exec exec_of(const benchmark::State& st) { return st.range(0) == 0 ? Exec::serial : Exec::parallel; }

std::vector<cplx> random_amps(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

void BM_CsrMatvec(benchmark::State& st) {
  const int n = static_cast<int>(st.range(1));
  // banded matrix, roughly the fill of a coupled-ladder Hamiltonian
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int off : {0, 1, 3, 9, 27}) {
      if (i + off < n) {
        dense(i, i + off) = cplx(1.0 + off, 0.5);
        dense(i + off, i) = std::conj(dense(i, i + off));
      }
    }
  }
  const auto a = hybridnv::kernels::CsrMatrix::from_dense(dense);
  const auto x = random_amps(static_cast<std::size_t>(n), 1);
  std::vector<cplx> y(static_cast<std::size_t>(n));
  for (auto _ : st) {
    hybridnv::kernels::csr_matvec(exec_of(st), a, x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(a.nnz()));
}
BENCHMARK(BM_CsrMatvec)->ArgsProduct({{0, 1}, {162, 1024, 8192}});

void BM_QuadraticFidelities(benchmark::State& st) {
  const int nodes = static_cast<int>(st.range(1));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  Eigen::MatrixXcd a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = {d(rng), d(rng)};
  Eigen::MatrixXd coeffs(nodes, 4);
  for (int k = 0; k < nodes; ++k) coeffs.row(k) = Eigen::Vector4d(d(rng), d(rng), d(rng), d(rng)).normalized();
  std::vector<double> out(static_cast<std::size_t>(nodes));
  for (auto _ : st) {
    hybridnv::kernels::quadratic_fidelities(exec_of(st), a, coeffs, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * nodes);
}
BENCHMARK(BM_QuadraticFidelities)->ArgsProduct({{0, 1}, {256, 4096, 65536}});

void BM_ApplyTwoQubit(benchmark::State& st) {
  const int nq = static_cast<int>(st.range(1));
  auto amps = random_amps(std::size_t{1} << nq, 3);
  Eigen::Matrix4cd cz = Eigen::Matrix4cd::Identity();
  cz(3, 3) = -1.0;
  for (auto _ : st) {
    hybridnv::kernels::apply_two_qubit(exec_of(st), amps, nq, 1, nq - 2, cz);
    benchmark::DoNotOptimize(amps.data());
  }
  st.SetItemsProcessed(st.iterations() * (int64_t{1} << nq));
}
BENCHMARK(BM_ApplyTwoQubit)->ArgsProduct({{0, 1}, {10, 16, 20}});

void BM_PauliExpectation(benchmark::State& st) {
  const int nq = static_cast<int>(st.range(1));
  const auto amps = random_amps(std::size_t{1} << nq, 4);
  const std::uint64_t x_mask = 0b0101;
  const std::uint64_t z_mask = (std::uint64_t{1} << (nq - 1)) | 0b1010;
  for (auto _ : st) {
    benchmark::DoNotOptimize(hybridnv::kernels::pauli_expectation(exec_of(st), amps, x_mask, z_mask));
  }
  st.SetItemsProcessed(st.iterations() * (int64_t{1} << nq));
}
BENCHMARK(BM_PauliExpectation)->ArgsProduct({{0, 1}, {10, 16, 20}});

}  // namespace

BENCHMARK_MAIN();
