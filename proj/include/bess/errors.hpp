// Copyright 2026 The bess-arbitrage Authors
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

namespace bess {

// Malformed input text: bad record layout, unparseable field, bad config value.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string source, int line, int column, const std::string& message);
  explicit FormatError(const std::string& message)
      : std::runtime_error(message) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }      // 1-based, 0 when not applicable
  int column() const { return column_; }  // 1-based field index, 0 when not applicable

 private:
  std::string source_;
  int line_ = 0;
  int column_ = 0;
};

// Well-formed data that does not cover what the run needs (missing snapshot,
// incomplete half-hour of actual prices, conflicting duplicates).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system failures: unreadable paths, short writes, corrupt archives.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bess
