// Copyright 2026 The Memtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace memtrack {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatches and corrupt masks (run lengths not summing to H*W).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Inputs that parse but violate a declared invariant (bad scores, dangling
// ids, non-bijective associations, empty videos, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Files that cannot be parsed or lack required schema fields.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

// A brute-force oracle was asked for a problem above its size cap.
class OracleSizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace memtrack
