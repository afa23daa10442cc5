// src/feats/wave.cc

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

#include "awe/feats/wave.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "awe/base/binary-io.h"
#include "awe/base/common.h"

namespace awe {

namespace {

std::uint16_t ReadU16(std::istream &is, const char *what) {
  unsigned char b[2];
  is.read(reinterpret_cast<char *>(b), 2);
  if (is.gcount() != 2) throw Error(std::string("truncated WAV ") + what);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void WriteU16(std::ostream &os, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

}  // namespace

bool IsSupportedSampleRate(int rate) {
  switch (rate) {
    case 8000:
    case 16000:
    case 22050:
    case 44100:
    case 48000:
      return true;
    default:
      return false;
  }
}

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char tag[4];
  ExpectMagic(in, "RIFF", path);
  ReadU32(in, "RIFF size");
  ExpectMagic(in, "WAVE", path);

  int channels = 0, bits = 0, rate = 0, format = 0;
  bool have_fmt = false;
  while (true) {
    in.read(tag, 4);
    if (in.gcount() != 4) throw Error(path + ": no data chunk");
    std::uint32_t size = ReadU32(in, "chunk size");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = ReadU16(in, "fmt");
      channels = ReadU16(in, "fmt");
      rate = static_cast<int>(ReadU32(in, "fmt"));
      ReadU32(in, "fmt");  // byte rate
      ReadU16(in, "fmt");  // block align
      bits = ReadU16(in, "fmt");
      in.ignore(size - 16 + (size & 1));
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw Error(path + ": data chunk before fmt chunk");
      if (format != 1 || bits != 16)
        throw Error(path + ": only 16-bit PCM is supported");
      if (channels != 1) throw Error(path + ": only mono audio is supported");
      Waveform wave;
      wave.sample_rate = rate;
      wave.samples.resize(size / 2);
      for (auto &s : wave.samples)
        s = static_cast<std::int16_t>(ReadU16(in, "samples")) / 32768.0f;
      return wave;
    } else {
      in.ignore(size + (size & 1));
    }
  }
}

void WriteWav(const std::string &path, const Waveform &wave) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  auto data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 2);
  WriteMagic(out, "RIFF");
  WriteU32(out, 36 + data_bytes);
  WriteMagic(out, "WAVE");
  WriteMagic(out, "fmt ");
  WriteU32(out, 16);
  WriteU16(out, 1);
  WriteU16(out, 1);
  WriteU32(out, static_cast<std::uint32_t>(wave.sample_rate));
  WriteU32(out, static_cast<std::uint32_t>(wave.sample_rate * 2));
  WriteU16(out, 2);
  WriteU16(out, 16);
  WriteMagic(out, "data");
  WriteU32(out, data_bytes);
  for (float s : wave.samples) {
    float c = std::clamp(s, -1.0f, 1.0f);
    WriteU16(out, static_cast<std::uint16_t>(
                      static_cast<std::int16_t>(std::lround(c * 32767.0f))));
  }
}

}  // namespace awe
