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

#include "bess/errors.hpp"

namespace bess {

namespace {

std::string Describe(const std::string& source, int line, int column,
                     const std::string& message) {
  std::string out = source;
  if (line > 0) out += ":" + std::to_string(line);
  if (column > 0) out += ":" + std::to_string(column);
  return out + ": " + message;
}

}  // namespace

FormatError::FormatError(std::string source, int line, int column,
                         const std::string& message)
    : std::runtime_error(Describe(source, line, column, message)),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

}  // namespace bess
