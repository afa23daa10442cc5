// tools/awe.cc

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

// Command-line front end: one subcommand per pipeline stage.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "awe/base/config-file.h"
#include "awe/corpus/pairs.h"
#include "awe/corpus/synthetic.h"
#include "awe/eval/samediff.h"
#include "awe/expt/experiment.h"
#include "awe/feats/feature-archive.h"
#include "awe/feats/mfcc.h"
#include "awe/feats/wave.h"
#include "awe/qbe/qbe.h"
#include "awe/train/trainer.h"

namespace fs = std::filesystem;
using namespace awe;

namespace {

std::vector<std::string> SplitCommas(const std::string &s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

FeatureArchive LoadArchives(const std::string &paths) {
  FeatureArchive archive;
  for (const auto &p : SplitCommas(paths)) archive.Merge(FeatureArchive::Load(p));
  return archive;
}

int Featurize(const std::string &wav_dir, const std::string &out, const MfccConfig &cfg) {
  std::vector<fs::path> wavs;
  for (const auto &entry : fs::directory_iterator(wav_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav") wavs.push_back(entry.path());
  if (wavs.empty()) throw Error("no .wav files in " + wav_dir);
  std::sort(wavs.begin(), wavs.end());
  std::vector<FeatureSequence> feats;
  for (const auto &w : wavs) {
    const Waveform wave = ReadWav(w.string());
    const FrameGeometry geom = ComputeFrameGeometry(cfg, wave.sample_rate);
    if (NumFrames(static_cast<int>(wave.samples.size()), geom) == 0) {
      spdlog::warn("{}: shorter than one analysis window, skipped", w.string());
      continue;
    }
    feats.push_back(ComputeMfcc(wave, cfg, w.stem().string()));
  }
  WriteFeatureArchive(feats, out);
  spdlog::info("wrote {} utterances to {}", feats.size(), out);
  return 0;
}

int Synth(const std::string &spec_path, const std::string &out_dir) {
  SyntheticFamilySpec spec;
  if (!spec_path.empty()) {
    ConfigFile cfg = ConfigFile::Load(spec_path);
    spec = SyntheticFamilySpec::FromConfig(cfg);
    cfg.CheckAllConsumed();
  }
  SyntheticCorpus corpus = GenerateSyntheticCorpus(spec);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  WriteFeatureArchive(corpus.features, (dir / "feats.awef").string());
  WriteAlignments((dir / "align.tsv").string(), corpus.segments);
  WriteFamilyMap((dir / "families.tsv").string(), corpus.family_of);
  WriteGroundTruth((dir / "truth.tsv").string(), GroundTruthFromSegments(corpus.segments));
  std::ofstream((dir / "spec.toml").string()) << spec.ToConfigText();
  spdlog::info("wrote {} utterances, {} segments to {}", corpus.features.size(),
               corpus.segments.size(), out_dir);
  return 0;
}

int Train(const std::string &feats, const std::string &pairs_paths, const std::string &align,
          const std::string &dev_feats, const std::string &dev_align,
          const std::string &dev_language, const std::string &config, const std::string &out,
          const std::string &log_path) {
  EncoderConfig enc_cfg;
  TrainConfig train_cfg;
  if (!config.empty()) {
    ConfigFile cfg = ConfigFile::Load(config);
    enc_cfg = EncoderConfigFromConfig(cfg, "encoder.", enc_cfg);
    train_cfg = TrainConfig::FromConfig(cfg, "train.");
    cfg.CheckAllConsumed();
  }
  FeatureArchive archive = LoadArchives(feats);
  TrainingData data{&archive, {}, {}};
  for (const auto &p : SplitCommas(pairs_paths)) {
    auto more = ReadPairs(p);
    data.pairs.insert(data.pairs.end(), more.begin(), more.end());
  }
  if (!align.empty()) {
    data.segments = DropShortSegments(LoadAlignments(align, &archive));
  } else {
    for (const auto &p : data.pairs) {
      data.segments.push_back(p.anchor);
      data.segments.push_back(p.positive);
    }
  }
  FeatureArchive dev_archive = LoadArchives(dev_feats);
  auto dev_segments = DropShortSegments(LoadAlignments(dev_align, &dev_archive));
  std::string lang = dev_language;
  if (lang.empty()) {
    std::set<std::string> langs;
    for (const auto &s : dev_segments) langs.insert(s.language_id);
    if (langs.size() != 1) throw Error("dev alignments span several languages; pass --dev-language");
    lang = *langs.begin();
  }
  std::erase_if(dev_segments, [&](const WordSegment &s) { return s.language_id != lang; });
  DevSet dev = MakeDevSet(lang, &dev_archive, dev_segments, train_cfg.dev_max_segments,
                          train_cfg.seed);
  TrainResult result = TrainModel(data, dev, enc_cfg, train_cfg);
  SaveCheckpoint(result.best[0], out);
  if (!log_path.empty()) WriteEpochLog(log_path, result.log, {lang});
  for (const auto &e : result.log)
    std::cout << fmt::format("epoch {} loss {:.6f} dev_ap {:.6f}\n", e.epoch, e.mean_loss,
                             e.dev_ap[0]);
  spdlog::info("best epoch {} (dev AP {:.4f}) saved to {}", result.best_epoch[0],
               result.best[0].metadata.dev_score, out);
  return 0;
}

int EvalSameDiff(const std::string &model, const std::string &feats, const std::string &align,
                 const std::string &report, const std::string &pr_curve, int threads) {
  Checkpoint ckpt = LoadCheckpoint(model);
  FeatureArchive archive = LoadArchives(feats);
  auto segments = DropShortSegments(LoadAlignments(align, &archive));
  auto set = EmbedSegments(ckpt, archive, segments, threads);
  ApResult r = SameDiffAp(set, !pr_curve.empty(), threads);
  if (!report.empty()) WriteApReport(report, segments.size(), r);
  if (!pr_curve.empty()) WritePrCurve(pr_curve, r);
  std::cout << fmt::format("n_items {} n_scored {} n_pos {} ap {:.6f}\n", segments.size(),
                           r.n_scored_pairs, r.n_positive_pairs, r.ap);
  return 0;
}

int QbeIndex(const std::string &model, const std::string &feats, const std::string &out,
             const WindowConfig &wcfg, int threads) {
  Checkpoint ckpt = LoadCheckpoint(model);
  FeatureArchive archive = LoadArchives(feats);
  SegmentIndex index = BuildIndex(ckpt.params, ckpt.config, archive, wcfg, threads);
  WriteIndex(index, out);
  spdlog::info("indexed {} windows over {} utterances", index.NumWindows(), index.utterances.size());
  return 0;
}

int Qbe(const std::string &index_path, const std::string &model, const std::string &queries,
        const std::string &query_feats, const std::string &truth_path, const std::string &report,
        bool pool_min, int threads) {
  Checkpoint ckpt = LoadCheckpoint(model);
  SegmentIndex index = ReadIndex(index_path);
  FeatureArchive archive = LoadArchives(query_feats);
  GroundTruth truth = LoadGroundTruth(truth_path);
  auto grouped = GroupQueries(LoadAlignments(queries, &archive));
  std::ofstream os;
  if (!report.empty()) {
    os.open(report);
    if (!os) throw Error("cannot write " + report);
    os << "query_word,n_instances,relevant_total,p_at_10\n";
  }
  double sum = 0.0;
  for (const auto &q : grouped) {
    QbeResult r = RunQbe(ckpt.params, ckpt.config, q, archive, index, truth, pool_min, threads);
    sum += r.p_at_10;
    if (os.is_open())
      os << fmt::format("{},{},{},{:.6f}\n", r.query_word, q.instances.size(), r.relevant_total,
                        r.p_at_10);
  }
  const double mean = grouped.empty() ? 0.0 : sum / static_cast<double>(grouped.size());
  if (os.is_open()) os << fmt::format("mean,,,{:.6f}\n", mean);
  std::cout << fmt::format("queries {} mean_p_at_10 {:.6f}\n", grouped.size(), mean);
  return 0;
}

int Experiment(const std::string &plan_path, const std::string &out_dir, int threads) {
  ExperimentPlan plan = plan_path.empty() ? ExperimentPlan{} : ExperimentPlan::Load(plan_path);
  if (threads > 0) plan.threads = threads;
  fs::create_directories(out_dir);
  std::ofstream(fs::path(out_dir) / "plan.toml") << plan.ToConfigText();
  ExperimentRunner runner(plan, out_dir);
  ResultTable table = runner.RunAll();
  table.WriteCsv((fs::path(out_dir) / "results.csv").string());
  WriteHeatmap((fs::path(out_dir) / "heatmap.csv").string(), table);
  spdlog::info("{} models, {} result rows written to {}", runner.num_trained(), table.rows.size(),
               out_dir);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Contrastive acoustic word embeddings for zero-resource languages"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: AWE_NUM_THREADS or all cores)");

  std::string wav_dir, out, feats, align, spec, out_dir, pairs, dev_feats, dev_align,
      dev_language, config, log_path, model, report, pr_curve, index, queries, query_feats,
      truth, plan;

  auto *fe = app.add_subcommand("featurize", "MFCCs for every .wav in a directory");
  MfccConfig mfcc;
  bool no_cmvn = false;
  fe->add_option("--wav-dir", wav_dir)->required();
  fe->add_option("--out", out)->required();
  fe->add_flag("--no-cmvn", no_cmvn, "Skip per-utterance mean/variance normalization");
  fe->add_option("--window-ms", mfcc.window_ms)->capture_default_str();
  fe->add_option("--shift-ms", mfcc.shift_ms)->capture_default_str();
  fe->add_option("--n-mels", mfcc.n_mels)->capture_default_str();
  fe->add_option("--n-ceps", mfcc.n_ceps)->capture_default_str();
  fe->add_option("--preemphasis", mfcc.preemphasis)->capture_default_str();

  auto *sy = app.add_subcommand("synth", "Generate a synthetic multi-family corpus");
  sy->add_option("--spec", spec, "Spec file (defaults when omitted)");
  sy->add_option("--out-dir", out_dir)->required();

  auto *mp = app.add_subcommand("mine-pairs", "Sample same-word positive pairs");
  std::uint64_t n_pairs = 100000, seed = 0;
  bool pooled = false;
  mp->add_option("--align", align)->required();
  mp->add_option("--n", n_pairs, "Pairs per language")->capture_default_str();
  mp->add_option("--seed", seed)->capture_default_str();
  mp->add_flag("--pooled", pooled, "One budget over all languages");
  mp->add_option("--out", out)->required();

  auto *tr = app.add_subcommand("train", "Train an encoder with the contrastive loss");
  tr->add_option("--feats", feats, "Comma-separated AWEF archives")->required();
  tr->add_option("--pairs", pairs, "Comma-separated pair TSVs")->required();
  tr->add_option("--align", align, "Negative pool (default: segments of the pairs)");
  tr->add_option("--dev-feats", dev_feats)->required();
  tr->add_option("--dev-align", dev_align)->required();
  tr->add_option("--dev-language", dev_language);
  tr->add_option("--config", config, "[encoder] and [train] sections");
  tr->add_option("--out", out)->required();
  tr->add_option("--log", log_path, "Per-epoch CSV");

  auto *ev = app.add_subcommand("eval-samediff", "Same-different average precision");
  ev->add_option("--model", model)->required();
  ev->add_option("--feats", feats)->required();
  ev->add_option("--align", align)->required();
  ev->add_option("--report", report);
  ev->add_option("--pr-curve", pr_curve);

  auto *qi = app.add_subcommand("qbe-index", "Embed sliding windows of a search collection");
  WindowConfig wcfg;
  qi->add_option("--model", model)->required();
  qi->add_option("--feats", feats)->required();
  qi->add_option("--out", out)->required();
  qi->add_option("--min-len", wcfg.min_len)->capture_default_str();
  qi->add_option("--max-len", wcfg.max_len)->capture_default_str();
  qi->add_option("--len-step", wcfg.len_step)->capture_default_str();
  qi->add_option("--stride", wcfg.stride)->capture_default_str();

  auto *qb = app.add_subcommand("qbe", "Search an index with spoken queries");
  bool pool_min = false;
  qb->add_option("--index", index)->required();
  qb->add_option("--model", model)->required();
  qb->add_option("--queries", queries, "Alignment TSV of query instances")->required();
  qb->add_option("--query-feats", query_feats, "Archive holding the query audio")->required();
  qb->add_option("--truth", truth)->required();
  qb->add_option("--report", report);
  qb->add_flag("--pool-min", pool_min, "Min over instances instead of averaging P@10");

  auto *ex = app.add_subcommand("experiment", "Run an experiment plan");
  ex->add_option("--plan", plan, "Plan file (defaults when omitted)");
  ex->add_option("--out", out_dir)->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
  try {
    if (*fe) {
      mfcc.cmvn = !no_cmvn;
      return Featurize(wav_dir, out, mfcc);
    }
    if (*sy) return Synth(spec, out_dir);
    if (*mp) {
      auto segments = DropShortSegments(LoadAlignments(align));
      auto mined = MinePairs(segments, n_pairs, !pooled, seed);
      WritePairs(out, mined);
      spdlog::info("wrote {} pairs to {}", mined.size(), out);
      return 0;
    }
    if (*tr)
      return Train(feats, pairs, align, dev_feats, dev_align, dev_language, config, out, log_path);
    if (*ev) return EvalSameDiff(model, feats, align, report, pr_curve, threads);
    if (*qi) return QbeIndex(model, feats, out, wcfg, threads);
    if (*qb) return Qbe(index, model, queries, query_feats, truth, report, pool_min, threads);
    if (*ex) return Experiment(plan, out_dir, threads);
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
