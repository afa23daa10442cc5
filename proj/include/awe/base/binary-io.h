// include/awe/base/binary-io.h

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

#ifndef AWE_BASE_BINARY_IO_H_
#define AWE_BASE_BINARY_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>

namespace awe {

// Little-endian primitives shared by the AWEF / AWEC / AWEI formats.
// Readers throw awe::Error on short reads, naming `what`.

void WriteU32(std::ostream &os, std::uint32_t v);
void WriteF32(std::ostream &os, float v);
void WriteF32s(std::ostream &os, std::span<const float> values);
void WriteString(std::ostream &os, const std::string &s);  // u32 length + bytes
void WriteMagic(std::ostream &os, const char magic[4]);

std::uint32_t ReadU32(std::istream &is, const char *what);
float ReadF32(std::istream &is, const char *what);
void ReadF32s(std::istream &is, std::span<float> out, const char *what);
std::string ReadString(std::istream &is, const char *what,
                       std::uint32_t max_len = 1u << 24);
/// Throws if the next four bytes are not `magic`.
void ExpectMagic(std::istream &is, const char magic[4], const std::string &path);

}  // namespace awe

#endif  // AWE_BASE_BINARY_IO_H_
