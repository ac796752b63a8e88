// Copyright 2026 The boca-cpp Authors
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

namespace boca {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, out-of-range values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidCutoff : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A report violates (N) or carries a negative value.
class InvalidReport : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A documented precondition does not hold (e.g. the full bundle was never reported).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

/// The problem is too large for the requested exact method.
class UnsupportedSize : public Error {
 public:
  using Error::Error;
};

/// Every bundle of some bidder has already been queried.
class ExhaustedBidder : public Error {
 public:
  using Error::Error;
};

}  // namespace boca
