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

#include "hybridnv/tensorspace.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hybridnv/errors.hpp"

namespace hybridnv {

SubsystemLayout::SubsystemLayout(std::vector<Subsystem> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ShapeError("layout must contain at least one subsystem");
  strides_.assign(parts_.size(), 1);
  for (int i = static_cast<int>(parts_.size()) - 1; i >= 0; --i) {
    if (parts_[i].dim < 2) throw ShapeError("subsystem '" + parts_[i].name + "' has dimension < 2");
    strides_[i] = total_;
    if (total_ > (1 << 26) / parts_[i].dim) throw ShapeError("layout dimension too large");
    total_ *= parts_[i].dim;
  }
}

SubsystemLayout SubsystemLayout::canonical(int n_max) {
  if (n_max < 1) throw ShapeError("n_max must be >= 1");
  return SubsystemLayout({{SubsystemKind::nve, 3, "NVE1"},
                          {SubsystemKind::resonator, n_max + 1, "TLRa"},
                          {SubsystemKind::spq, 2, "SPQ"},
                          {SubsystemKind::resonator, n_max + 1, "TLRb"},
                          {SubsystemKind::nve, 3, "NVE2"}});
}

bool SubsystemLayout::is_canonical() const {
  return parts_.size() == 5 && parts_[0].kind == SubsystemKind::nve && parts_[0].dim == 3 &&
         parts_[1].kind == SubsystemKind::resonator && parts_[2].kind == SubsystemKind::spq &&
         parts_[2].dim == 2 && parts_[3].kind == SubsystemKind::resonator &&
         parts_[3].dim == parts_[1].dim && parts_[4].kind == SubsystemKind::nve && parts_[4].dim == 3;
}

int SubsystemLayout::n_max() const {
  if (!is_canonical()) throw ShapeError("n_max requested on a non-canonical layout");
  return parts_[1].dim - 1;
}

int SubsystemLayout::index(std::span<const int> digits) const {
  if (digits.size() != parts_.size()) throw ShapeError("digit count does not match layout");
  int idx = 0;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= parts_[i].dim) {
      throw ShapeError("digit out of range for subsystem '" + parts_[i].name + "'");
    }
    idx += digits[i] * strides_[i];
  }
  return idx;
}

int SubsystemLayout::index(std::initializer_list<int> digits) const {
  return index(std::span<const int>(digits.begin(), digits.size()));
}

std::vector<int> SubsystemLayout::digits(int idx) const {
  if (idx < 0 || idx >= total_) throw ShapeError("basis index out of range");
  std::vector<int> out(parts_.size());
  for (std::size_t i = 0; i < parts_.size(); ++i) out[i] = (idx / strides_[i]) % parts_[i].dim;
  return out;
}

std::string level_name(SubsystemKind kind, int level) {
  switch (kind) {
    case SubsystemKind::nve:
      return level == kLevelU ? "U" : std::to_string(level - 1);
    case SubsystemKind::spq:
      return level == kSpqGround ? "g" : "e";
    case SubsystemKind::resonator:
      return std::to_string(level);
  }
  return "?";
}

std::string SubsystemLayout::label(int idx) const {
  const auto d = digits(idx);
  std::ostringstream os;
  os << '|';
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) os << ',';
    os << level_name(parts_[i].kind, d[i]);
  }
  os << '>';
  return os.str();
}

bool SubsystemLayout::operator==(const SubsystemLayout& other) const {
  if (parts_.size() != other.parts_.size()) return false;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i].kind != other.parts_[i].kind || parts_[i].dim != other.parts_[i].dim) return false;
  }
  return true;
}

Operator Operator::general(Matrix m) {
  if (m.rows() != m.cols()) throw ShapeError("operator must be square");
  Operator op;
  op.m_ = std::move(m);
  return op;
}

Operator Operator::hermitian(Matrix m, double tol) {
  if (m.rows() != m.cols()) throw ShapeError("operator must be square");
  const double dev = m.rows() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (!(dev <= tol)) {
    throw ValidationError("operator is not Hermitian (max deviation " + std::to_string(dev) + ")");
  }
  Operator op;
  op.m_ = std::move(m);
  op.hermitian_ = true;
  return op;
}

PureState::PureState(Vector v, Frame frame, double tol) : v_(std::move(v)), frame_(frame) {
  const double n = v_.norm();
  if (!(std::abs(n - 1.0) < tol)) {
    throw ValidationError("state is not normalized (norm " + std::to_string(n) + ")");
  }
}

PureState PureState::basis(const SubsystemLayout& layout, std::span<const int> digits, Frame frame) {
  Vector v = Vector::Zero(layout.total_dim());
  v(layout.index(digits)) = 1.0;
  return PureState(std::move(v), frame);
}

PureState PureState::basis(const SubsystemLayout& layout, std::initializer_list<int> digits,
                           Frame frame) {
  return basis(layout, std::span<const int>(digits.begin(), digits.size()), frame);
}

Operator lift_local(const Matrix& local, int subsystem, const SubsystemLayout& layout) {
  if (subsystem < 0 || subsystem >= layout.size()) throw ShapeError("subsystem index out of range");
  const int d = layout.dim(subsystem);
  if (local.rows() != d || local.cols() != d) {
    throw ShapeError("local operator is " + std::to_string(local.rows()) + "x" +
                     std::to_string(local.cols()) + ", subsystem '" + layout[subsystem].name +
                     "' has dimension " + std::to_string(d));
  }
  const int inner = layout.stride(subsystem);
  const int outer = layout.total_dim() / (inner * d);
  Matrix m = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int hi = 0; hi < outer; ++hi) {
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        const cplx v = local(r, c);
        if (v == cplx(0.0)) continue;
        for (int lo = 0; lo < inner; ++lo) {
          m(hi * d * inner + r * inner + lo, hi * d * inner + c * inner + lo) = v;
        }
      }
    }
  }
  return Operator::general(std::move(m));
}

Matrix fock_annihilation(int dim) {
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

LocalGenerators local_generators(const SubsystemLayout& layout) {
  if (!layout.is_canonical()) throw ShapeError("local_generators requires the canonical layout");
  LocalGenerators g;
  const Matrix fa = fock_annihilation(layout.dim(slot::kTlrA));
  g.a = lift_local(fa, slot::kTlrA, layout).matrix();
  g.a_dag = g.a.adjoint();
  g.b = lift_local(fa, slot::kTlrB, layout).matrix();
  g.b_dag = g.b.adjoint();
  Matrix sm = Matrix::Zero(2, 2);
  sm(kSpqGround, kSpqExcited) = 1.0;
  g.sigma_minus = lift_local(sm, slot::kSpq, layout).matrix();
  g.sigma_plus = g.sigma_minus.adjoint();
  const int nve_slots[2] = {slot::kNve1, slot::kNve2};
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      Matrix s = Matrix::Zero(3, 3);
      s(kLevelU, kLevel0 + j) = 1.0;
      g.nve_minus[k][j] = lift_local(s, nve_slots[k], layout).matrix();
      g.nve_plus[k][j] = g.nve_minus[k][j].adjoint();
    }
  }
  return g;
}

Eigensystem eig_hermitian(const Operator& h) {
  if (!h.is_hermitian()) throw ValidationError("eig_hermitian requires a Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace hybridnv
