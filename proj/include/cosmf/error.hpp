// Copyright 2026 The cosmf Authors
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

#ifndef COSMF_ERROR_HPP
#define COSMF_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cosmf {

// Mirrors cosmf_status in the C API; keep the numeric values in sync.
enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kParse = 3,
  kIo = 4,
  kNumerical = 5,
  kBudgetExhausted = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace cosmf

#endif  // COSMF_ERROR_HPP
