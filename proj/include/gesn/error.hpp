// Copyright 2026 The GESN Authors.
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

#ifndef GESN_ERROR_HPP_
#define GESN_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gesn {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method ran out of iterations. Carries the last estimate so
// callers can decide whether it is usable.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_estimate,
                   std::size_t iterations)
      : Error(what), last_estimate_(last_estimate), iterations_(iterations) {}

  double last_estimate() const { return last_estimate_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double last_estimate_;
  std::size_t iterations_;
};

// Malformed input file; what() is "<file>:<line>: <message>".
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line,
             const std::string& message)
      : Error(file + ":" + std::to_string(line) + ": " + message),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace gesn

#endif  // GESN_ERROR_HPP_
