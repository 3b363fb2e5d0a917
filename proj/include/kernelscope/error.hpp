/* Copyright 2026 The kernelscope Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace kernelscope {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad file contents, violated preconditions, mismatched
// shapes or architectures.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The operating system refused a read or write.
class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& message) {
  throw ValidationError(message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(message);
}

}  // namespace detail
}  // namespace kernelscope
