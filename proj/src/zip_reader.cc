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

#include "bess/zip_reader.hpp"

#include <cstdint>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "bess/errors.hpp"

namespace bess {

namespace {

constexpr std::uint32_t kLocalHeader = 0x04034b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kEndOfDirectory = 0x06054b50;
constexpr std::size_t kEndRecordSize = 22;

std::uint32_t Read16(const std::string& b, std::size_t at) {
  return static_cast<unsigned char>(b[at]) | static_cast<unsigned char>(b[at + 1]) << 8;
}

std::uint32_t Read32(const std::string& b, std::size_t at) {
  return Read16(b, at) | Read16(b, at + 2) << 16;
}

std::string Inflate(const char* data, std::size_t size, std::size_t expected,
                    const std::string& name) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw IoError(name + ": inflate init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data));
  zs.avail_in = static_cast<uInt>(size);
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw IoError(name + ": corrupt deflate stream");
  }
  return out;
}

}  // namespace

bool LooksLikeZip(const std::string& bytes) {
  return bytes.size() >= 4 && Read32(bytes, 0) == kLocalHeader;
}

std::string ReadSingleFileZip(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(name + ": cannot open");
  const std::string b{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (b.size() < kEndRecordSize) throw IoError(name + ": truncated zip archive");

  std::size_t eocd = std::string::npos;
  for (std::size_t at = b.size() - kEndRecordSize + 1; at-- > 0;) {
    if (Read32(b, at) == kEndOfDirectory) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string::npos) throw IoError(name + ": zip end record not found");
  const std::uint32_t entries = Read16(b, eocd + 10);
  const std::uint32_t dir_offset = Read32(b, eocd + 16);
  if (entries != 1) {
    throw FormatError(name, 0, 0,
                      "zip archive must hold exactly one file, found " + std::to_string(entries));
  }
  if (dir_offset + 46 > b.size() || Read32(b, dir_offset) != kCentralHeader) {
    throw IoError(name + ": bad zip central directory");
  }
  const std::uint32_t method = Read16(b, dir_offset + 10);
  const std::uint32_t crc = Read32(b, dir_offset + 16);
  const std::uint32_t packed = Read32(b, dir_offset + 20);
  const std::uint32_t unpacked = Read32(b, dir_offset + 24);
  const std::uint32_t local = Read32(b, dir_offset + 42);
  if (local + 30 > b.size() || Read32(b, local) != kLocalHeader) {
    throw IoError(name + ": bad zip local header");
  }
  const std::size_t data = local + 30 + Read16(b, local + 26) + Read16(b, local + 28);
  if (data + packed > b.size()) throw IoError(name + ": truncated zip member");

  std::string out;
  if (method == 0) {
    out = b.substr(data, packed);
  } else if (method == 8) {
    out = Inflate(b.data() + data, packed, unpacked, name);
  } else {
    throw IoError(name + ": unsupported zip compression method " + std::to_string(method));
  }
  const auto check = crc32(0L, reinterpret_cast<const Bytef*>(out.data()),
                           static_cast<uInt>(out.size()));
  if (check != crc) throw IoError(name + ": zip member checksum mismatch");
  return out;
}

}  // namespace bess
