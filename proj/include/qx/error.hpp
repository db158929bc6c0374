// Copyright 2026 The QX Authors.
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

#ifndef QX_ERROR_HPP_
#define QX_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace qx {

// All recoverable failures (bad input files, unresolvable ids, invalid or
// degenerate parameters) are thrown as qx::Error with a one-line message
// carrying the locus (row, record or trial index) where it applies.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qx

#endif  // QX_ERROR_HPP_
