// src/encoder/checkpoint.cc

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

#include "awe/encoder/checkpoint.h"

#include <fstream>

#include <json.hpp>

#include "awe/base/binary-io.h"

namespace awe {

namespace {

using nlohmann::json;

json ToJson(const Checkpoint &c) {
  json j;
  j["encoder"] = {{"input_dim", c.config.input_dim},
                  {"hidden_dim", c.config.hidden_dim},
                  {"n_layers", c.config.n_layers},
                  {"embed_dim", c.config.embed_dim},
                  {"cell", CellTypeName(c.config.cell)},
                  {"max_frames", c.config.max_frames}};
  j["training_languages"] = c.metadata.training_languages;
  j["seed"] = c.metadata.seed;
  j["epoch"] = c.metadata.epoch;
  j["dev_score"] = c.metadata.dev_score;
  j["dev_language"] = c.metadata.dev_language;
  j["extra"] = c.metadata.extra;
  return j;
}

void FromJson(const json &j, Checkpoint *c) {
  const json &e = j.at("encoder");
  c->config.input_dim = e.at("input_dim").get<int>();
  c->config.hidden_dim = e.at("hidden_dim").get<int>();
  c->config.n_layers = e.at("n_layers").get<int>();
  c->config.embed_dim = e.at("embed_dim").get<int>();
  c->config.cell = ParseCellType(e.at("cell").get<std::string>());
  c->config.max_frames = e.at("max_frames").get<int>();
  c->config.Validate();
  c->metadata.training_languages = j.at("training_languages").get<std::vector<std::string>>();
  c->metadata.seed = j.at("seed").get<std::uint64_t>();
  c->metadata.epoch = j.at("epoch").get<int>();
  c->metadata.dev_score = j.at("dev_score").get<double>();
  c->metadata.dev_language = j.value("dev_language", "");
  c->metadata.extra = j.value("extra", std::map<std::string, std::string>{});
}

}  // namespace

void SaveCheckpoint(const Checkpoint &ckpt, const std::string &path) {
  ckpt.params.CheckShapes(ckpt.config);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  WriteMagic(out, "AWEC");
  WriteU32(out, kCheckpointVersion);
  WriteString(out, ToJson(ckpt).dump());

  std::uint32_t count = 0;
  ckpt.params.ForEachTensor([&](const std::string &, const auto &) { ++count; });
  WriteU32(out, count);
  ckpt.params.ForEachTensor([&](const std::string &name, const auto &t) {
    WriteString(out, name);
    if constexpr (std::decay_t<decltype(t)>::ColsAtCompileTime == 1) {
      WriteU32(out, 1);
      WriteU32(out, static_cast<std::uint32_t>(t.rows()));
    } else {
      WriteU32(out, 2);
      WriteU32(out, static_cast<std::uint32_t>(t.rows()));
      WriteU32(out, static_cast<std::uint32_t>(t.cols()));
    }
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = t;
    WriteF32s(out, std::span<const float>(row_major.data(), row_major.size()));
  });
  if (!out) throw Error("write failed for " + path);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  ExpectMagic(in, "AWEC", path);
  std::uint32_t version = ReadU32(in, "AWEC version");
  if (version != kCheckpointVersion)
    throw Error(path + ": unsupported AWEC version " + std::to_string(version));

  Checkpoint ckpt;
  try {
    FromJson(json::parse(ReadString(in, "AWEC metadata")), &ckpt);
  } catch (const json::exception &e) {
    throw Error(path + ": bad checkpoint metadata: " + e.what());
  }
  ckpt.params = EncoderParams::Zeros(ckpt.config);

  std::uint32_t count = ReadU32(in, "AWEC tensor count");
  std::uint32_t expected = 0;
  ckpt.params.ForEachTensor([&](const std::string &, const auto &) { ++expected; });
  if (count != expected)
    throw Error(path + ": expected " + std::to_string(expected) + " tensors, found " +
                std::to_string(count));
  ckpt.params.ForEachTensor([&](const std::string &name, auto &t) {
    std::string got = ReadString(in, "AWEC tensor name");
    if (got != name) throw Error(path + ": expected tensor " + name + ", found " + got);
    std::uint32_t rank = ReadU32(in, "AWEC rank");
    if (rank < 1 || rank > 2) throw Error(path + ": bad rank for " + name);
    std::uint32_t rows = ReadU32(in, "AWEC dims");
    std::uint32_t cols = rank == 2 ? ReadU32(in, "AWEC dims") : 1;
    if (rows != t.rows() || cols != t.cols())
      throw Error(path + ": dimension mismatch for tensor " + name);
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major(rows, cols);
    ReadF32s(in, std::span<float>(row_major.data(), row_major.size()), "AWEC payload");
    t = row_major;
  });
  return ckpt;
}

}  // namespace awe
