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

#include <string>
#include <string_view>
#include <vector>

namespace bess {

// Splits one CSV record. Double-quoted fields may contain commas and doubled
// quotes; a trailing carriage return is dropped. Returns false on an
// unterminated quote.
bool SplitCsvLine(std::string_view line, std::vector<std::string>& fields);

// Quotes a field only when it contains a comma, quote or newline.
std::string QuoteCsvField(std::string_view field);

std::string JoinCsv(const std::vector<std::string>& fields);

// Fixed six-decimal rendering used by every report file.
std::string FormatFixed(double value);

// Shortest text that parses back to the same double.
std::string FormatExact(double value);

// Strict full-field parse; rejects empty text, trailing junk and non-finite
// values.
bool ParseDouble(std::string_view text, double& out);

}  // namespace bess
