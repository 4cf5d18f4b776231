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

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hybridnv {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class SubsystemKind { nve, resonator, spq };

struct Subsystem {
  SubsystemKind kind;
  int dim;
  std::string name;
};

// Slots of the canonical five-part layout.
namespace slot {
inline constexpr int kNve1 = 0;
inline constexpr int kTlrA = 1;
inline constexpr int kSpq = 2;
inline constexpr int kTlrB = 3;
inline constexpr int kNve2 = 4;
}  // namespace slot

// Local level indices. NV-ensemble qutrit levels are |U>, |0>, |1>.
inline constexpr int kLevelU = 0;
inline constexpr int kLevel0 = 1;
inline constexpr int kLevel1 = 2;
inline constexpr int kSpqGround = 0;
inline constexpr int kSpqExcited = 1;

// Ordered list of subsystems with mixed-radix indexing. The first subsystem is
// the most significant digit.
class SubsystemLayout {
 public:
  explicit SubsystemLayout(std::vector<Subsystem> parts);

  // [NVE1, TLRa, SPQ, TLRb, NVE2] with Fock cutoff n_max.
  static SubsystemLayout canonical(int n_max);

  int size() const { return static_cast<int>(parts_.size()); }
  const Subsystem& operator[](int i) const { return parts_.at(i); }
  const std::vector<Subsystem>& parts() const { return parts_; }
  int dim(int i) const { return parts_.at(i).dim; }
  int total_dim() const { return total_; }
  int stride(int i) const { return strides_.at(i); }
  bool is_canonical() const;
  // Fock cutoff of the resonators in a canonical layout.
  int n_max() const;

  int index(std::span<const int> digits) const;
  int index(std::initializer_list<int> digits) const;
  std::vector<int> digits(int index) const;
  int digit(int index, int subsystem) const { return (index / strides_[subsystem]) % parts_[subsystem].dim; }

  // Human-readable label of a basis state, e.g. "|U,1,g,0,U>".
  std::string label(int index) const;

  bool operator==(const SubsystemLayout& other) const;

 private:
  std::vector<Subsystem> parts_;
  std::vector<int> strides_;
  int total_ = 1;
};

std::string level_name(SubsystemKind kind, int level);

// Matrix with an optional Hermiticity guarantee checked at construction.
class Operator {
 public:
  Operator() = default;
  static Operator general(Matrix m);
  // Throws ValidationError if max|H - H^dagger| exceeds tol.
  static Operator hermitian(Matrix m, double tol = 1e-12);

  const Matrix& matrix() const { return m_; }
  bool is_hermitian() const { return hermitian_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
  bool hermitian_ = false;
};

enum class Frame { lab, interaction };

// Normalized ket tagged with the frame it is expressed in.
class PureState {
 public:
  PureState() = default;
  // Throws ValidationError unless | ||v|| - 1 | < tol.
  PureState(Vector v, Frame frame, double tol = 1e-9);
  static PureState basis(const SubsystemLayout& layout, std::span<const int> digits,
                         Frame frame = Frame::interaction);
  static PureState basis(const SubsystemLayout& layout, std::initializer_list<int> digits,
                         Frame frame = Frame::interaction);

  const Vector& amplitudes() const { return v_; }
  Frame frame() const { return frame_; }
  Eigen::Index dim() const { return v_.size(); }
  cplx operator[](Eigen::Index i) const { return v_(i); }

 private:
  Vector v_;
  Frame frame_ = Frame::interaction;
};

// Embeds a local operator acting on one subsystem into the full space.
Operator lift_local(const Matrix& local, int subsystem, const SubsystemLayout& layout);

// Raising/lowering operators of the canonical layout, lifted to full space.
// nve_minus[k][j] = |U><j| on NVE k+1 for logical level j (0 or 1).
struct LocalGenerators {
  Matrix a, a_dag;
  Matrix b, b_dag;
  Matrix sigma_minus, sigma_plus;
  std::array<std::array<Matrix, 2>, 2> nve_minus;
  std::array<std::array<Matrix, 2>, 2> nve_plus;
};

LocalGenerators local_generators(const SubsystemLayout& layout);

// Truncated annihilation operator of a Fock space of the given dimension.
Matrix fock_annihilation(int dim);

struct Eigensystem {
  Eigen::VectorXd values;
  Matrix vectors;
};

// Throws ValidationError if the operator is not tagged Hermitian.
Eigensystem eig_hermitian(const Operator& h);

}  // namespace hybridnv
