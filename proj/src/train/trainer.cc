// src/train/trainer.cc

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

#include "awe/train/trainer.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "awe/eval/samediff.h"
#include "awe/train/loss.h"

namespace awe {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;  // "init"
constexpr std::uint64_t kDevStream = 0x646576;     // "dev"

}  // namespace

void TrainConfig::Validate() const {
  if (!(tau > 0)) throw Error("tau must be positive");
  if (k_negatives < 1) throw Error("K must be at least 1");
  if (batch_pairs < 1) throw Error("batch_pairs must be at least 1");
  if (!(adam.lr > 0)) throw Error("learning rate must be positive");
  if (epochs < 1) throw Error("epochs must be at least 1");
  if (dev_max_segments < 2) throw Error("dev_max_segments must be at least 2");
}

TrainConfig TrainConfig::FromConfig(const ConfigFile &cfg, const std::string &prefix) {
  TrainConfig c;
  c.tau = cfg.GetDouble(prefix + "tau", c.tau);
  c.k_negatives = static_cast<int>(cfg.GetInt(prefix + "k_negatives", c.k_negatives));
  c.batch_pairs = static_cast<int>(cfg.GetInt(prefix + "batch_pairs", c.batch_pairs));
  c.adam.lr = cfg.GetDouble(prefix + "lr", c.adam.lr);
  c.adam.beta1 = cfg.GetDouble(prefix + "adam_beta1", c.adam.beta1);
  c.adam.beta2 = cfg.GetDouble(prefix + "adam_beta2", c.adam.beta2);
  c.adam.eps = cfg.GetDouble(prefix + "adam_eps", c.adam.eps);
  c.epochs = static_cast<int>(cfg.GetInt(prefix + "epochs", c.epochs));
  c.seed = static_cast<std::uint64_t>(cfg.GetInt(prefix + "seed", static_cast<long long>(c.seed)));
  c.negative_policy = ParseNegativePolicy(
      cfg.GetString(prefix + "negative_policy", NegativePolicyName(c.negative_policy)));
  c.dev_max_segments =
      static_cast<int>(cfg.GetInt(prefix + "dev_max_segments", c.dev_max_segments));
  c.Validate();
  return c;
}

std::string TrainConfig::ToConfigText(const std::string &prefix) const {
  std::ostringstream os;
  os.precision(17);
  os << prefix << "tau = " << tau << "\n"
     << prefix << "k_negatives = " << k_negatives << "\n"
     << prefix << "batch_pairs = " << batch_pairs << "\n"
     << prefix << "lr = " << adam.lr << "\n"
     << prefix << "adam_beta1 = " << adam.beta1 << "\n"
     << prefix << "adam_beta2 = " << adam.beta2 << "\n"
     << prefix << "adam_eps = " << adam.eps << "\n"
     << prefix << "epochs = " << epochs << "\n"
     << prefix << "seed = " << seed << "\n"
     << prefix << "negative_policy = " << QuoteConfigString(NegativePolicyName(negative_policy)) << "\n"
     << prefix << "dev_max_segments = " << dev_max_segments << "\n";
  return os.str();
}

EncoderConfig EncoderConfigFromConfig(const ConfigFile &cfg, const std::string &prefix,
                                      EncoderConfig c) {
  c.input_dim = static_cast<int>(cfg.GetInt(prefix + "input_dim", c.input_dim));
  c.hidden_dim = static_cast<int>(cfg.GetInt(prefix + "hidden_dim", c.hidden_dim));
  c.n_layers = static_cast<int>(cfg.GetInt(prefix + "n_layers", c.n_layers));
  c.embed_dim = static_cast<int>(cfg.GetInt(prefix + "embed_dim", c.embed_dim));
  c.cell = ParseCellType(cfg.GetString(prefix + "cell", CellTypeName(c.cell)));
  c.max_frames = static_cast<int>(cfg.GetInt(prefix + "max_frames", c.max_frames));
  c.Validate();
  return c;
}

std::string EncoderConfigText(const EncoderConfig &c, const std::string &prefix) {
  return fmt::format(
      "{0}input_dim = {1}\n{0}hidden_dim = {2}\n{0}n_layers = {3}\n{0}embed_dim = {4}\n"
      "{0}cell = {5}\n{0}max_frames = {6}\n",
      prefix, c.input_dim, c.hidden_dim, c.n_layers, c.embed_dim,
      QuoteConfigString(CellTypeName(c.cell)), c.max_frames);
}

DevSet MakeDevSet(const std::string &language, const FeatureArchive *archive,
                  std::vector<WordSegment> segments, int max_segments, std::uint64_t seed) {
  std::sort(segments.begin(), segments.end());
  segments.erase(std::unique(segments.begin(), segments.end()), segments.end());
  for (const auto &s : segments)
    if (s.language_id != language)
      throw Error("dev set for " + language + " contains a segment of " + s.language_id);
  if (segments.size() > static_cast<std::size_t>(max_segments)) {
    Rng rng(DeriveSeed(seed, kDevStream));
    rng.Shuffle(segments.begin(), segments.end());
    segments.resize(static_cast<std::size_t>(max_segments));
    std::sort(segments.begin(), segments.end());
  }
  return {language, archive, std::move(segments)};
}

std::vector<std::string> TrainingData::Languages() const {
  std::set<std::string> langs;
  for (const auto &s : segments) langs.insert(s.language_id);
  for (const auto &p : pairs) langs.insert(p.anchor.language_id);
  return {langs.begin(), langs.end()};
}

std::size_t SelectBestEpoch(const std::vector<double> &dev_scores) {
  if (dev_scores.empty()) throw Error("no epochs to select from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < dev_scores.size(); ++i)
    if (dev_scores[i] > dev_scores[best]) best = i;
  return best;
}

double TrainStep(const std::vector<TrainingExample> &batch,
                 const std::vector<FeatureMatrix> &features, const EncoderConfig &enc_cfg,
                 const TrainConfig &cfg, EncoderParams *params, AdamState *state) {
  if (batch.empty()) throw Error("empty batch");
  // Each distinct segment is encoded once; in-batch negatives reuse the
  // columns of other examples' anchors and positives.
  std::vector<std::size_t> unique;
  for (const auto &ex : batch) {
    unique.push_back(ex.anchor);
    unique.push_back(ex.positive);
    unique.insert(unique.end(), ex.negatives.begin(), ex.negatives.end());
  }
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  auto column = [&](std::size_t idx) {
    return static_cast<Eigen::Index>(std::lower_bound(unique.begin(), unique.end(), idx) -
                                     unique.begin());
  };

  std::vector<const FeatureMatrix *> ptrs;
  ptrs.reserve(unique.size());
  for (std::size_t idx : unique) ptrs.push_back(&features[idx]);
  EncoderPass<float> pass(*params, enc_cfg);
  const Eigen::MatrixXf z = pass.Forward(ptrs, true);
  const Eigen::MatrixXd zd = z.cast<double>();

  Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(z.rows(), z.cols());
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;
  std::vector<Eigen::VectorXd> negs;
  for (const auto &ex : batch) {
    negs.clear();
    for (std::size_t n : ex.negatives) negs.emplace_back(zd.col(column(n)));
    const Eigen::Index ca = column(ex.anchor), cp = column(ex.positive);
    const auto r = ContrastiveLoss<double>(zd.col(ca), zd.col(cp), negs, cfg.tau);
    loss_sum += r.loss;
    dz.col(ca) += scale * r.grad_anchor;
    dz.col(cp) += scale * r.grad_positive;
    for (std::size_t j = 0; j < ex.negatives.size(); ++j)
      dz.col(column(ex.negatives[j])) += scale * r.grad_negatives[j];
  }

  ParamGradients grads = ParamGradients::Zeros(enc_cfg);
  pass.Backward(dz.cast<float>(), &grads);
  AdamStep(params, grads, state, cfg.adam);
  return loss_sum * scale;
}

TrainResult TrainMultiDev(const TrainingData &data, const std::vector<DevSet> &dev_sets,
                          const EncoderConfig &enc_cfg, const TrainConfig &cfg) {
  enc_cfg.Validate();
  cfg.Validate();
  if (data.archive == nullptr) throw Error("training data has no feature archive");
  if (data.pairs.empty()) throw Error("no training pairs");
  const std::vector<std::string> languages = data.Languages();
  for (const auto &dev : dev_sets) {
    if (std::find(languages.begin(), languages.end(), dev.language) != languages.end())
      throw Error("dev language " + dev.language + " is also a training language");
    if (dev.archive == nullptr) throw Error("dev set " + dev.language + " has no archive");
  }

  const SegmentTable table(data.segments, data.pairs);
  std::vector<IndexPair> pairs;
  pairs.reserve(data.pairs.size());
  for (const auto &p : data.pairs) {
    if (p.anchor.word_type != p.positive.word_type || p.anchor.SameOccurrence(p.positive))
      throw Error("invalid positive pair: " + FormatAlignmentLine(p.anchor));
    pairs.push_back({table.IndexOf(p.anchor), table.IndexOf(p.positive)});
  }
  std::vector<FeatureMatrix> features;
  features.reserve(table.size());
  for (const auto &seg : table.segments()) features.push_back(SliceSegment(*data.archive, seg));

  EncoderParams params = InitParams(enc_cfg, DeriveSeed(cfg.seed, kInitStream));
  AdamState state = AdamState::ZerosLike(enc_cfg);

  TrainResult result;
  result.best.resize(dev_sets.size());
  result.best_epoch.assign(dev_sets.size(), 0);
  std::vector<double> best_ap(dev_sets.size(), -1.0);
  const std::string config_text = EncoderConfigText(enc_cfg) + cfg.ToConfigText();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto batches = AssembleBatches(pairs, table, cfg.Batching(), cfg.seed, epoch);
    double loss_sum = 0.0;
    std::size_t n_examples = 0;
    for (const auto &batch : batches) {
      loss_sum += TrainStep(batch, features, enc_cfg, cfg, &params, &state) *
                  static_cast<double>(batch.size());
      n_examples += batch.size();
    }
    EpochLog entry{epoch, loss_sum / static_cast<double>(n_examples), {}};
    for (std::size_t d = 0; d < dev_sets.size(); ++d) {
      const auto emb = EmbedSegments(params, enc_cfg, *dev_sets[d].archive,
                                     dev_sets[d].segments, 1);
      const double ap = SameDiffAp(emb, false, 1).ap;
      entry.dev_ap.push_back(ap);
      if (ap > best_ap[d]) {
        best_ap[d] = ap;
        result.best_epoch[d] = epoch;
        CheckpointMetadata meta{languages, cfg.seed, epoch, ap, dev_sets[d].language, {}};
        meta.extra["config_hash"] = HexDigest(Fnv1a64(config_text));
        meta.extra["n_pairs"] = std::to_string(pairs.size());
        result.best[d] = Checkpoint{enc_cfg, params, std::move(meta)};
      }
    }
    spdlog::debug("epoch {} loss {:.4f}", epoch, entry.mean_loss);
    result.log.push_back(std::move(entry));
  }
  return result;
}

void WriteEpochLog(const std::string &path, const std::vector<EpochLog> &log,
                   const std::vector<std::string> &dev_languages) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << "epoch,mean_loss";
  if (dev_languages.size() == 1) {
    os << ",dev_ap";
  } else {
    for (const auto &l : dev_languages) os << ",dev_ap_" << l;
  }
  os << "\n";
  for (const auto &e : log) {
    os << e.epoch << fmt::format(",{:.6f}", e.mean_loss);
    for (double ap : e.dev_ap) os << fmt::format(",{:.6f}", ap);
    os << "\n";
  }
}

}  // namespace awe
