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

#include <stdexcept>
#include <string>

namespace hybridnv {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension or index mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Rejected configuration, parameter set or control segment.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Integration or linear-algebra failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hybridnv
