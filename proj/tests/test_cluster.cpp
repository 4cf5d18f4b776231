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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "hybridnv/analysis.hpp"
#include "hybridnv/errors.hpp"

namespace {

using namespace hybridnv;

int bit_of(std::uint64_t basis, int q, int n) { return static_cast<int>((basis >> (n - 1 - q)) & 1u); }

// <X_a prod_b Z_b> by explicit bit manipulation.
double stabilizer_oracle(const Vector& v, const Lattice& lat, int a) {
  const int n = lat.node_count();
  double sum = 0.0;
  for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(v.size()); ++x) {
    const std::uint64_t flipped = x ^ (std::uint64_t{1} << (n - 1 - a));
    int parity = 0;
    for (int b : lat.neighbors(a)) parity ^= bit_of(x, b, n);
    sum += (std::conj(v(flipped)) * v(x)).real() * (parity ? -1.0 : 1.0);
  }
  return sum;
}

// Graph-state amplitudes: 2^{-n/2} (-1)^{sum over edges x_a x_b}.
Vector graph_state_oracle(const Lattice& lat) {
  const int n = lat.node_count();
  Vector v(Eigen::Index{1} << n);
  for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(v.size()); ++x) {
    int parity = 0;
    for (const auto& e : lat.edges()) parity ^= bit_of(x, e.a, n) & bit_of(x, e.b, n);
    v(x) = std::pow(2.0, -0.5 * n) * (parity ? -1.0 : 1.0);
  }
  return v;
}

LogicalState ideal_cluster(const Lattice& lat) {
  return apply_schedule(prepare_plus_all(lat), schedule_lattice(lat), cphase_target());
}

TEST(LatticeTest, EdgeCountAndCoordinates) {
  for (const auto& dims : std::vector<std::vector<int>>{{1}, {4}, {3, 3}, {2, 3, 4}}) {
    const Lattice lat(dims);
    long expected = 0;
    for (std::size_t ax = 0; ax < dims.size(); ++ax) {
      long other = 1;
      for (std::size_t k = 0; k < dims.size(); ++k)
        if (k != ax) other *= dims[k];
      expected += (dims[ax] - 1) * other;
    }
    EXPECT_EQ(static_cast<long>(lat.edges().size()), expected);
    for (int i = 0; i < lat.node_count(); ++i) EXPECT_EQ(lat.node(lat.coords(i)), i);
  }
  EXPECT_THROW(Lattice({0}), ValidationError);
  EXPECT_THROW(Lattice(std::vector<int>{}), ValidationError);
}

TEST(Schedule, RoundCountIsTwiceDimension) {
  for (const auto& dims : std::vector<std::vector<int>>{{1}, {4}, {5}, {3, 3}, {2, 2, 2}, {3, 1, 2}}) {
    EXPECT_EQ(schedule_lattice(Lattice(dims)).rounds.size(), 2 * dims.size());
  }
}

TEST(Schedule, SingleNodeHasTwoEmptyRounds) {
  const auto s = schedule_lattice(Lattice({1}));
  ASSERT_EQ(s.rounds.size(), 2u);
  EXPECT_TRUE(s.rounds[0].empty());
  EXPECT_TRUE(s.rounds[1].empty());
}

TEST(Schedule, ChainOfFour) {
  const Lattice lat({4});
  const auto s = schedule_lattice(lat);
  ASSERT_EQ(s.rounds.size(), 2u);
  std::vector<std::string> a, b;
  for (const auto& e : s.rounds[0]) a.push_back(edge_label(lat, e));
  for (const auto& e : s.rounds[1]) b.push_back(edge_label(lat, e));
  EXPECT_EQ(a, (std::vector<std::string>{"(1)-(2)", "(3)-(4)"}));
  EXPECT_EQ(b, (std::vector<std::string>{"(2)-(3)"}));
}

TEST(Schedule, DisjointRoundsCoverEveryEdgeOnce) {
  for (const auto& dims : std::vector<std::vector<int>>{{3, 3}, {4, 4}, {2, 3, 4}, {7}}) {
    const Lattice lat(dims);
    const auto s = schedule_lattice(lat);
    std::multiset<std::pair<int, int>> seen;
    for (const auto& round : s.rounds) {
      std::set<int> nodes;
      for (const auto& e : round) {
        EXPECT_TRUE(nodes.insert(e.a).second);
        EXPECT_TRUE(nodes.insert(e.b).second);
        seen.insert({e.a, e.b});
      }
    }
    std::multiset<std::pair<int, int>> all;
    for (const auto& e : lat.edges()) all.insert({e.a, e.b});
    EXPECT_EQ(seen, all);
  }
}

TEST(Schedule, GridLabels) {
  const Lattice lat({3, 3});
  const auto s = schedule_lattice(lat);
  ASSERT_EQ(s.rounds.size(), 4u);
  EXPECT_EQ(s.rounds[0].size() + s.rounds[1].size() + s.rounds[2].size() + s.rounds[3].size(), 12u);
  EXPECT_EQ(edge_label(lat, s.rounds[0].front()), "(1,1)-(2,1)");
}

TEST(State, PlusAll) {
  for (int n : {1, 2, 9}) {
    const auto s = prepare_plus_all(Lattice({n}));
    EXPECT_EQ(s.amplitudes().size(), Eigen::Index{1} << n);
    EXPECT_NEAR((s.amplitudes().array() - std::pow(2.0, -0.5 * n)).abs().maxCoeff(), 0.0, 1e-15);
  }
  EXPECT_THROW(LogicalState(2, Vector::Constant(4, 1.0)), ValidationError);
  EXPECT_THROW(LogicalState(2, Vector::Constant(3, 0.5)), ShapeError);
}

TEST(State, TwoNodeChain) {
  const auto s = ideal_cluster(Lattice({2}));
  Vector expect(4);
  expect << 0.5, 0.5, 0.5, -0.5;
  EXPECT_LT((s.amplitudes() - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(State, MatchesGraphStateOracle) {
  for (const auto& dims : std::vector<std::vector<int>>{{2, 2}, {4}, {3, 3}, {2, 2, 2}}) {
    const Lattice lat(dims);
    EXPECT_LT((ideal_cluster(lat).amplitudes() - graph_state_oracle(lat)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(State, EmptyScheduleLeavesStateUnchanged) {
  const Lattice lat({3});
  const auto s = prepare_plus_all(lat);
  EXPECT_EQ(apply_schedule(s, LatticeSchedule{}, cphase_target()).amplitudes(), s.amplitudes());
}

TEST(State, IdealGateIsOrderIndependent) {
  const Lattice lat({3, 3});
  std::vector<Edge> edges = lat.edges();
  std::mt19937 rng(9);
  std::shuffle(edges.begin(), edges.end(), rng);
  const auto shuffled = apply_schedule(prepare_plus_all(lat), LatticeSchedule{{edges}}, cphase_target());
  EXPECT_LT((shuffled.amplitudes() - ideal_cluster(lat).amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(State, RejectsWrongGateSize) {
  const Lattice lat({2});
  EXPECT_THROW(apply_schedule(prepare_plus_all(lat), schedule_lattice(lat), Matrix::Identity(3, 3)), ShapeError);
}

TEST(State, SerialAndParallelAgree) {
  const Lattice lat({4, 4});
  const auto s = apply_schedule(prepare_plus_all(lat), schedule_lattice(lat), cphase_target(), kernels::Exec::serial);
  const auto p =
      apply_schedule(prepare_plus_all(lat), schedule_lattice(lat), cphase_target(), kernels::Exec::parallel);
  EXPECT_LT((s.amplitudes() - p.amplitudes()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(State, RetainedWeightReportsLeakage) {
  const Lattice lat({2});
  Eigen::Matrix4cd lossy = cphase_target() * 0.9;
  double retained = 0.0;
  const auto s = apply_schedule(prepare_plus_all(lat), schedule_lattice(lat), lossy, kernels::Exec::serial, &retained);
  EXPECT_NEAR(retained, 0.81, 1e-12);
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-12);
}

TEST(Stabilizers, IdealClustersAreAllPlusOne) {
  for (const auto& dims : std::vector<std::vector<int>>{{4}, {3, 3}, {4, 4}, {2, 2, 2}}) {
    const Lattice lat(dims);
    const auto st = ideal_cluster(lat);
    for (auto exec : {kernels::Exec::serial, kernels::Exec::parallel}) {
      for (double k : stabilizer_check(st, lat, exec)) EXPECT_NEAR(k, 1.0, 1e-12);
    }
  }
}

TEST(Stabilizers, MatchBitFlipOracle) {
  const Lattice lat({3, 3});
  // A partially built cluster is not a stabilizer eigenstate.
  LatticeSchedule half = schedule_lattice(lat);
  half.rounds.resize(2);
  const auto st = apply_schedule(prepare_plus_all(lat), half, cphase_target());
  const auto k = stabilizer_check(st, lat);
  for (int a = 0; a < lat.node_count(); ++a) EXPECT_NEAR(k[a], stabilizer_oracle(st.amplitudes(), lat, a), 1e-12);
}

TEST(Stabilizers, PlusProductStateGivesZero) {
  const Lattice lat({2});
  for (double k : stabilizer_check(prepare_plus_all(lat), lat)) EXPECT_NEAR(k, 0.0, 1e-15);
  EXPECT_THROW(stabilizer_check(prepare_plus_all(Lattice({3})), lat), ShapeError);
}

}  // namespace
