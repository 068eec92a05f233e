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

#include <filesystem>
#include <string>

namespace bess {

// Extracts the only member of a single-file zip archive (stored or deflated).
// Throws IoError on unreadable or corrupt archives and FormatError when the
// archive holds more than one file.
std::string ReadSingleFileZip(const std::filesystem::path& path);

bool LooksLikeZip(const std::string& bytes);

}  // namespace bess
