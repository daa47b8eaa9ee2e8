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

#ifndef CORPUSQC_ERRORS_HPP_
#define CORPUSQC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace corpusqc {

// Base class for all hard errors raised by the toolkit. Recoverable
// per-record conditions (malformed lines, rejected pairs) are reported
// through result structs instead.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace corpusqc

#endif  // CORPUSQC_ERRORS_HPP_
