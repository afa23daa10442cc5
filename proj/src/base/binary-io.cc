// src/base/binary-io.cc

// Copyright 2026  awe contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "awe/base/binary-io.h"

#include <bit>
#include <cstring>
#include <vector>

#include "awe/base/common.h"

namespace awe {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

namespace {

std::uint32_t ToLittle(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
           (v >> 24);
  }
}

void ReadExact(std::istream &is, char *dst, std::size_t n, const char *what) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw Error(std::string("truncated file while reading ") + what);
}

}  // namespace

void WriteU32(std::ostream &os, std::uint32_t v) {
  v = ToLittle(v);
  os.write(reinterpret_cast<const char *>(&v), 4);
}

void WriteF32(std::ostream &os, float v) {
  WriteU32(os, std::bit_cast<std::uint32_t>(v));
}

void WriteF32s(std::ostream &os, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char *>(values.data()),
             static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (float v : values) WriteF32(os, v);
  }
}

void WriteString(std::ostream &os, const std::string &s) {
  WriteU32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void WriteMagic(std::ostream &os, const char magic[4]) { os.write(magic, 4); }

std::uint32_t ReadU32(std::istream &is, const char *what) {
  std::uint32_t v;
  ReadExact(is, reinterpret_cast<char *>(&v), 4, what);
  return ToLittle(v);
}

float ReadF32(std::istream &is, const char *what) {
  return std::bit_cast<float>(ReadU32(is, what));
}

void ReadF32s(std::istream &is, std::span<float> out, const char *what) {
  if constexpr (std::endian::native == std::endian::little) {
    ReadExact(is, reinterpret_cast<char *>(out.data()), out.size_bytes(), what);
  } else {
    for (float &v : out) v = ReadF32(is, what);
  }
}

std::string ReadString(std::istream &is, const char *what,
                       std::uint32_t max_len) {
  std::uint32_t n = ReadU32(is, what);
  if (n > max_len)
    throw Error(std::string("implausible string length while reading ") + what);
  std::string s(n, '\0');
  ReadExact(is, s.data(), n, what);
  return s;
}

void ExpectMagic(std::istream &is, const char magic[4], const std::string &path) {
  char got[4];
  is.read(got, 4);
  if (is.gcount() != 4 || std::memcmp(got, magic, 4) != 0)
    throw Error("bad magic in " + path + ": expected \"" +
                std::string(magic, 4) + "\"");
}

}  // namespace awe
