// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef VSBUTTON_ERRORS_HPP
#define VSBUTTON_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vsbutton {

// Base of every error raised by the library. Callers that only need to report
// a failure can catch this; the derived types exist so tests and the CLI can
// tell the failure modes apart.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class FormatError : public Error {
    using Error::Error;
};

class TruncationError : public Error {
  public:
    TruncationError(const std::string &what, std::size_t offset) : Error(what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

class InvariantError : public Error {
    using Error::Error;
};

class IoError : public Error {
  public:
    IoError(const std::string &what, std::size_t bytes_written) : Error(what), bytes_written_(bytes_written) {}
    std::size_t bytes_written() const noexcept { return bytes_written_; }

  private:
    std::size_t bytes_written_;
};

class EmptyInputError : public Error {
    using Error::Error;
};
class ModelError : public Error {
    using Error::Error;
};
class ConfigError : public Error {
    using Error::Error;
};
class DegenerateDataError : public Error {
    using Error::Error;
};
class IndexError : public Error {
    using Error::Error;
};
class GeometryError : public Error {
    using Error::Error;
};
class DegenerateBaselineError : public Error {
    using Error::Error;
};
class LabelCoverageError : public Error {
    using Error::Error;
};
class ClockError : public Error {
    using Error::Error;
};
class SourceStallError : public Error {
    using Error::Error;
};

} // namespace vsbutton

#endif
