// src/expt/experiment.cc

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

#include "awe/expt/experiment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "awe/base/parallel.h"
#include "awe/eval/samediff.h"

namespace awe {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kQueryStream = 0x71756572;  // "quer"

std::string Join(const std::vector<std::string> &items, const std::string &sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string ListText(const std::vector<std::string> &items) {
  std::vector<std::string> quoted;
  for (const auto &s : items) quoted.push_back(QuoteConfigString(s));
  return "[" + Join(quoted, ", ") + "]";
}

std::string ListListText(const std::vector<std::vector<std::string>> &items) {
  std::vector<std::string> inner;
  for (const auto &l : items) inner.push_back(ListText(l));
  return "[" + Join(inner, ", ") + "]";
}

std::string SubsetScheduleName(SubsetSchedule s) {
  return s == SubsetSchedule::kEqualUpdates ? "equal-updates" : "equal-epochs";
}

SubsetSchedule ParseSubsetSchedule(const std::string &name) {
  if (name == "equal-updates") return SubsetSchedule::kEqualUpdates;
  if (name == "equal-epochs") return SubsetSchedule::kEqualEpochs;
  throw Error("unknown subset_schedule '" + name + "' (expected equal-updates or equal-epochs)");
}

std::string CellText(double v) { return fmt::format("{:.6f}", v); }

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------
// Corpus and speaker split.

bool ExperimentCorpus::IsTestSpeaker(const WordSegment &s) const {
  auto it = test_speakers.find(s.language_id);
  return it != test_speakers.end() && it->second.count(s.speaker_id) > 0;
}

std::vector<WordSegment> ExperimentCorpus::TrainSegments(const std::string &language) const {
  std::vector<WordSegment> out;
  for (const auto &s : segments)
    if (s.language_id == language && !IsTestSpeaker(s)) out.push_back(s);
  return out;
}

std::vector<WordSegment> ExperimentCorpus::TestSegments(const std::string &language) const {
  std::vector<WordSegment> out;
  for (const auto &s : segments)
    if (s.language_id == language && IsTestSpeaker(s)) out.push_back(s);
  return out;
}

bool ExperimentCorpus::SameFamily(const std::string &a, const std::string &b) const {
  auto ia = family_of.find(a), ib = family_of.find(b);
  return ia != family_of.end() && ib != family_of.end() && ia->second == ib->second;
}

std::map<std::string, std::set<std::string>> SplitSpeakers(
    const std::vector<WordSegment> &segments, int n_test) {
  if (n_test < 1) throw Error("test_speakers must be at least 1");
  std::map<std::string, std::set<std::string>> speakers;
  for (const auto &s : segments) speakers[s.language_id].insert(s.speaker_id);
  std::map<std::string, std::set<std::string>> out;
  for (const auto &[lang, spk] : speakers) {
    if (spk.size() <= static_cast<std::size_t>(n_test))
      throw Error(fmt::format("language {} has {} speakers; holding out {} leaves none for training",
                              lang, spk.size(), n_test));
    auto it = spk.end();
    std::advance(it, -n_test);
    out[lang] = std::set<std::string>(it, spk.end());
  }
  return out;
}

ExperimentCorpus LoadExperimentCorpus(const ExperimentPlan &plan) {
  ExperimentCorpus c;
  if (plan.feats.empty()) {
    SyntheticCorpus syn = GenerateSyntheticCorpus(plan.synthetic);
    c.archive = FeatureArchive(std::move(syn.features));
    c.segments = std::move(syn.segments);
    c.family_of = std::move(syn.family_of);
  } else {
    if (plan.align.empty()) throw Error("plan names features but no alignment file");
    c.archive = FeatureArchive::Load(plan.feats);
    c.segments = DropShortSegments(LoadAlignments(plan.align, &c.archive));
    if (!plan.families.empty()) c.family_of = ReadFamilyMap(plan.families);
  }
  std::set<std::string> langs;
  for (const auto &s : c.segments) langs.insert(s.language_id);
  c.languages.assign(langs.begin(), langs.end());
  c.test_speakers = SplitSpeakers(c.segments, plan.test_speakers);
  return c;
}

// ---------------------------------------------------------------------------
// Plan.

EncoderConfig ExperimentPlan::DeskEncoder() {
  EncoderConfig c;
  c.hidden_dim = 64;
  c.embed_dim = 32;
  return c;
}

TrainConfig ExperimentPlan::DeskTraining() {
  TrainConfig t;
  t.epochs = 10;
  return t;
}

void ExperimentPlan::Validate() const {
  encoder.Validate();
  train.Validate();
  qbe_windows.Validate();
  if (feats.empty()) synthetic.Validate();
  if (test_speakers < 1) throw Error("test_speakers must be at least 1");
  if (eval_languages.empty()) throw Error("plan has no eval languages");
  if (dev_languages.empty()) throw Error("plan has no dev languages");
  if (!(subset_fraction > 0.0 && subset_fraction <= 1.0))
    throw Error("subset_fraction must be in (0, 1]");
  if (pair_budget < 1) throw Error("pair_budget must be positive");
  if (seeds.empty()) throw Error("plan has no seeds");
  if (qbe_query_words < 1 || qbe_max_instances < 1)
    throw Error("qbe query_words and max_instances must be positive");
  auto check_disjoint = [&](const std::vector<std::string> &train, const char *what) {
    if (train.empty()) throw Error(std::string("empty language list in ") + what);
    std::set<std::string> uniq(train.begin(), train.end());
    if (uniq.size() != train.size()) throw Error(std::string("repeated language in ") + what);
  };
  for (const auto &c : combinations) check_disjoint(c, "combinations");
  for (const auto &c : subset_combinations) check_disjoint(c, "subset_combinations");
  for (const auto &s : sequences) check_disjoint(s, "sequences");
}

ExperimentPlan ExperimentPlan::FromConfig(const ConfigFile &cfg) {
  ExperimentPlan p;
  p.synthetic = SyntheticFamilySpec::FromConfig(cfg, "synthetic.");
  p.feats = cfg.GetString("corpus.feats", p.feats);
  p.align = cfg.GetString("corpus.align", p.align);
  p.families = cfg.GetString("corpus.families", p.families);
  p.test_speakers = static_cast<int>(cfg.GetInt("corpus.test_speakers", p.test_speakers));

  p.languages = cfg.GetStringList("plan.languages", p.languages);
  p.eval_languages = cfg.GetStringList("plan.eval_languages", p.eval_languages);
  p.dev_languages = cfg.GetStringList("plan.dev_languages", p.dev_languages);
  if (cfg.Has("plan.dev_language"))
    p.dev_languages = {cfg.GetString("plan.dev_language", "")};
  p.run_matrix = cfg.GetBool("plan.run_matrix", p.run_matrix);
  p.matrix_diagonal = cfg.GetBool("plan.matrix_diagonal", p.matrix_diagonal);
  p.run_combinations = cfg.GetBool("plan.run_combinations", p.run_combinations);
  p.run_sequences = cfg.GetBool("plan.run_sequences", p.run_sequences);
  p.sequences_qbe = cfg.GetBool("plan.sequences_qbe", p.sequences_qbe);
  p.combinations = cfg.GetStringListList("plan.combinations", p.combinations);
  p.subset_combinations = cfg.GetStringListList("plan.subset_combinations", p.subset_combinations);
  p.subset_fraction = cfg.GetDouble("plan.subset_fraction", p.subset_fraction);
  p.subset_schedule = ParseSubsetSchedule(
      cfg.GetString("plan.subset_schedule", SubsetScheduleName(p.subset_schedule)));
  p.sequences = cfg.GetStringListList("plan.sequences", p.sequences);
  p.pair_budget = static_cast<std::uint64_t>(
      cfg.GetInt("plan.pair_budget", static_cast<long long>(p.pair_budget)));
  if (cfg.Has("plan.seeds")) {
    p.seeds.clear();
    for (const auto &s : cfg.GetStringList("plan.seeds", {})) {
      try {
        p.seeds.push_back(std::stoull(s));
      } catch (const std::exception &) {
        throw Error("plan.seeds: not an unsigned integer: " + s);
      }
    }
  }
  p.threads = static_cast<int>(cfg.GetInt("plan.threads", p.threads));

  p.encoder = EncoderConfigFromConfig(cfg, "encoder.", p.encoder);
  TrainConfig t = TrainConfig::FromConfig(cfg, "train.");
  if (!cfg.Has("train.epochs")) t.epochs = p.train.epochs;
  p.train = t;

  p.qbe_windows.min_len = static_cast<int>(cfg.GetInt("qbe.min_len", p.qbe_windows.min_len));
  p.qbe_windows.max_len = static_cast<int>(cfg.GetInt("qbe.max_len", p.qbe_windows.max_len));
  p.qbe_windows.len_step = static_cast<int>(cfg.GetInt("qbe.len_step", p.qbe_windows.len_step));
  p.qbe_windows.stride = static_cast<int>(cfg.GetInt("qbe.stride", p.qbe_windows.stride));
  p.qbe_query_words = static_cast<int>(cfg.GetInt("qbe.query_words", p.qbe_query_words));
  p.qbe_max_instances = static_cast<int>(cfg.GetInt("qbe.max_instances", p.qbe_max_instances));
  cfg.CheckAllConsumed();
  p.Validate();
  return p;
}

ExperimentPlan ExperimentPlan::Load(const std::string &path) {
  return FromConfig(ConfigFile::Load(path));
}

std::string ExperimentPlan::ToConfigText() const {
  std::ostringstream os;
  os.precision(17);
  os << "[corpus]\n"
     << "feats = " << QuoteConfigString(feats) << "\n"
     << "align = " << QuoteConfigString(align) << "\n"
     << "families = " << QuoteConfigString(families) << "\n"
     << "test_speakers = " << test_speakers << "\n\n[synthetic]\n"
     << synthetic.ToConfigText() << "\n[plan]\n"
     << "languages = " << ListText(languages) << "\n"
     << "eval_languages = " << ListText(eval_languages) << "\n"
     << "dev_languages = " << ListText(dev_languages) << "\n"
     << "run_matrix = " << (run_matrix ? "true" : "false") << "\n"
     << "matrix_diagonal = " << (matrix_diagonal ? "true" : "false") << "\n"
     << "run_combinations = " << (run_combinations ? "true" : "false") << "\n"
     << "run_sequences = " << (run_sequences ? "true" : "false") << "\n"
     << "sequences_qbe = " << (sequences_qbe ? "true" : "false") << "\n"
     << "combinations = " << ListListText(combinations) << "\n"
     << "subset_combinations = " << ListListText(subset_combinations) << "\n"
     << "subset_fraction = " << subset_fraction << "\n"
     << "subset_schedule = " << QuoteConfigString(SubsetScheduleName(subset_schedule)) << "\n"
     << "sequences = " << ListListText(sequences) << "\n"
     << "pair_budget = " << pair_budget << "\n";
  std::vector<std::string> seed_text;
  for (auto s : seeds) seed_text.push_back(std::to_string(s));
  os << "seeds = [" << Join(seed_text, ", ") << "]\n"
     << "threads = " << threads << "\n\n[encoder]\n"
     << EncoderConfigText(encoder) << "\n[train]\n"
     << train.ToConfigText() << "\n[qbe]\n"
     << "min_len = " << qbe_windows.min_len << "\n"
     << "max_len = " << qbe_windows.max_len << "\n"
     << "len_step = " << qbe_windows.len_step << "\n"
     << "stride = " << qbe_windows.stride << "\n"
     << "query_words = " << qbe_query_words << "\n"
     << "max_instances = " << qbe_max_instances << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Results.

void ResultTable::Append(const ResultTable &other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::vector<const ResultRow *> ResultTable::Select(const std::string &experiment,
                                                   const std::string &eval_language,
                                                   const std::string &metric) const {
  std::vector<const ResultRow *> out;
  for (const auto &r : rows)
    if ((experiment.empty() || r.experiment == experiment) &&
        (eval_language.empty() || r.eval_language == eval_language) &&
        (metric.empty() || r.metric == metric))
      out.push_back(&r);
  return out;
}

std::string ResultTable::ToCsv() const {
  std::string out =
      "experiment,sequence,step,model_id,train_set,subset_fraction,eval_language,metric,value,"
      "seed,dev_language,checkpoint,config_hash\n";
  for (const auto &r : rows)
    out += fmt::format("{},{},{},{},{},{:g},{},{},{},{},{},{},{}\n", r.experiment,
                       CsvField(r.sequence), r.step, r.model_id, r.train_set, r.subset_fraction,
                       r.eval_language, r.metric, CellText(r.value), r.seed, r.dev_language,
                       CsvField(r.checkpoint), r.config_hash);
  return out;
}

void ResultTable::WriteCsv(const std::string &path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << ToCsv();
}

std::string HeatmapCsv(const ResultTable &table) {
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> cells;
  for (const ResultRow *r : table.Select("matrix", "", "ap")) {
    auto &c = cells[{r->train_set, r->eval_language}];
    c.first += r->value;
    c.second += 1;
  }
  std::map<std::string, double> column_max;
  for (const auto &[key, c] : cells) {
    if (key.first == key.second) continue;
    double &m = column_max[key.second];
    m = std::max(m, c.first / c.second);
  }
  std::string out = "row,col,value,normalized_value\n";
  for (const auto &[key, c] : cells) {
    const double mean = c.first / c.second;
    const double m = column_max.count(key.second) ? column_max[key.second] : 0.0;
    out += fmt::format("{},{},{},{}\n", key.first, key.second, CellText(mean),
                       CellText(m > 0 ? mean / m : 0.0));
  }
  return out;
}

void WriteHeatmap(const std::string &path, const ResultTable &table) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << HeatmapCsv(table);
}

// ---------------------------------------------------------------------------
// Runner.

struct ExperimentRunner::Request {
  std::string experiment;
  std::string sequence;
  int step = 0;
  RunKey key;
  std::string eval_language;
  bool qbe = false;
};

ExperimentRunner::ExperimentRunner(ExperimentPlan plan, std::string out_dir)
    : plan_(std::move(plan)), out_dir_(std::move(out_dir)) {
  plan_.Validate();
  corpus_ = LoadExperimentCorpus(plan_);
  if (plan_.languages.empty()) plan_.languages = corpus_.languages;
  const std::set<std::string> known(corpus_.languages.begin(), corpus_.languages.end());
  auto check = [&](const std::string &l) {
    if (!known.count(l)) throw Error("plan references unknown language " + l);
  };
  for (const auto &l : plan_.languages) check(l);
  for (const auto &l : plan_.eval_languages) check(l);
  for (const auto &l : plan_.dev_languages) check(l);
  // Lists of experiments that are switched off may keep their defaults.
  auto check_lists = [&](const std::vector<std::vector<std::string>> &lists) {
    for (const auto &list : lists)
      for (const auto &l : list) check(l);
  };
  if (plan_.run_combinations) {
    check_lists(plan_.combinations);
    check_lists(plan_.subset_combinations);
  }
  if (plan_.run_sequences) check_lists(plan_.sequences);
}

std::string ExperimentRunner::DevLanguageFor(const std::vector<std::string> &train,
                                             const std::string &eval) const {
  for (const auto &d : plan_.dev_languages)
    if (d != eval && std::find(train.begin(), train.end(), d) == train.end()) return d;
  throw Error("no dev language available for training set " + Join(train, "+") +
              " evaluated on " + eval + "; extend dev_languages");
}

std::string ExperimentRunner::ModelId(const RunKey &key) const {
  return fmt::format("{}_f{:g}_s{}", Join(key.languages, "+"), key.fraction, key.seed);
}

std::string ExperimentRunner::ConfigHash(const RunKey &key) const {
  std::string text = plan_.feats.empty() ? plan_.synthetic.ToConfigText()
                                         : plan_.feats + "\n" + plan_.align + "\n";
  text += fmt::format("test_speakers = {}\npair_budget = {}\nsubset_schedule = {}\n",
                      plan_.test_speakers, plan_.pair_budget,
                      SubsetScheduleName(plan_.subset_schedule));
  text += EncoderConfigText(plan_.encoder) + plan_.train.ToConfigText() + ModelId(key);
  return HexDigest(Fnv1a64(text));
}

ExperimentRunner::RunOutcome ExperimentRunner::TrainOne(
    const RunKey &key, const std::set<std::string> &dev_languages) const {
  TrainingData data{&corpus_.archive, {}, {}};
  for (const auto &l : key.languages) {
    auto segs = corpus_.TrainSegments(l);
    data.segments.insert(data.segments.end(), segs.begin(), segs.end());
  }
  const auto budget = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::llround(plan_.pair_budget * key.fraction)));
  // Pair groups are seeded by language name, so a language contributes the
  // same pairs to every training set it joins.
  data.pairs = MinePairs(data.segments, budget, true, key.seed);

  TrainConfig cfg = plan_.train;
  cfg.seed = key.seed;
  if (key.fraction < 1.0 && plan_.subset_schedule == SubsetSchedule::kEqualUpdates)
    cfg.epochs = static_cast<int>(std::lround(cfg.epochs / key.fraction));

  std::vector<DevSet> devs;
  for (const auto &d : dev_languages)
    devs.push_back(MakeDevSet(d, &corpus_.archive, corpus_.TestSegments(d),
                              cfg.dev_max_segments, key.seed));
  for (const auto &d : devs)
    for (const auto &l : key.languages)
      if (d.language == l) throw Error("zero-resource violation: dev language " + l + " in training");

  TrainResult result = TrainMultiDev(data, devs, plan_.encoder, cfg);

  RunOutcome out;
  out.model_id = ModelId(key);
  const std::string hash = ConfigHash(key);
  for (std::size_t d = 0; d < devs.size(); ++d) {
    out.dev_languages.push_back(devs[d].language);
    result.best[d].metadata.extra["model_id"] = out.model_id;
    result.best[d].metadata.extra["config_hash"] = hash;
    out.best.push_back(std::move(result.best[d]));
  }
  if (!out_dir_.empty()) {
    const fs::path dir = fs::path(out_dir_) / "runs" / out.model_id;
    fs::create_directories(dir);
    WriteEpochLog((dir / "log.csv").string(), result.log, out.dev_languages);
    for (std::size_t d = 0; d < out.best.size(); ++d) {
      const std::string rel = "runs/" + out.model_id + "/best_dev_" + out.dev_languages[d] + ".awec";
      SaveCheckpoint(out.best[d], (fs::path(out_dir_) / rel).string());
      out.checkpoint_paths.push_back(rel);
    }
  } else {
    out.checkpoint_paths.assign(out.best.size(), "");
  }
  spdlog::info("trained {} ({} pairs, {} epochs)", out.model_id, data.pairs.size(), cfg.epochs);
  return out;
}

void ExperimentRunner::TrainMissing(const std::map<RunKey, std::set<std::string>> &needed) {
  std::vector<std::pair<RunKey, std::set<std::string>>> todo;
  for (const auto &[key, devs] : needed) {
    auto it = runs_.find(key);
    std::set<std::string> all = devs;
    if (it != runs_.end()) {
      bool covered = true;
      for (const auto &d : devs)
        covered = covered && std::count(it->second.dev_languages.begin(),
                                        it->second.dev_languages.end(), d) > 0;
      if (covered) continue;
      // Training does not depend on which dev sets are tracked, so a rerun
      // with more dev languages reproduces the same trajectory.
      all.insert(it->second.dev_languages.begin(), it->second.dev_languages.end());
    }
    todo.emplace_back(key, std::move(all));
  }
  std::vector<RunOutcome> outcomes(todo.size());
  ParallelFor(todo.size(), [&](std::size_t i) { outcomes[i] = TrainOne(todo[i].first, todo[i].second); },
              plan_.threads);
  for (std::size_t i = 0; i < todo.size(); ++i) runs_[todo[i].first] = std::move(outcomes[i]);
}

ResultTable ExperimentRunner::Execute(const std::vector<Request> &requests) {
  std::map<RunKey, std::set<std::string>> needed;
  std::vector<std::string> dev_of(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    for (const auto &l : requests[i].key.languages)
      if (l == requests[i].eval_language && requests[i].experiment != "matrix")
        throw Error("eval language " + l + " appears in a training set");
    dev_of[i] = DevLanguageFor(requests[i].key.languages, requests[i].eval_language);
    needed[requests[i].key].insert(dev_of[i]);
  }
  TrainMissing(needed);

  // Per eval language: test segments, and the QbE search collection.
  struct EvalData {
    std::vector<WordSegment> test;
    FeatureArchive search;
    GroundTruth truth;
    std::vector<QbeQuery> queries;
  };
  std::map<std::string, EvalData> eval_data;
  for (const auto &r : requests) {
    auto [it, fresh] = eval_data.try_emplace(r.eval_language);
    EvalData &e = it->second;
    if (fresh) e.test = corpus_.TestSegments(r.eval_language);
    if (!r.qbe || !e.queries.empty()) continue;
    std::set<std::string> utts;
    for (const auto &s : e.test) utts.insert(s.utterance_id);
    std::vector<FeatureSequence> search;
    for (const auto &u : utts) search.push_back(corpus_.archive.At(u));
    e.search = FeatureArchive(std::move(search));
    e.truth = GroundTruthFromSegments(e.test);
    // Queries are spoken by the eval language's other speakers.
    std::set<std::string> searchable;
    for (const auto &s : e.test) searchable.insert(s.word_type);
    std::vector<QbeQuery> pool;
    for (auto &q : GroupQueries(corpus_.TrainSegments(r.eval_language))) {
      if (!searchable.count(q.query_word)) continue;
      std::erase_if(q.instances, [](const WordSegment &s) { return s.NumFrames() < kMinSegmentFrames; });
      if (!q.instances.empty()) pool.push_back(std::move(q));
    }
    Rng rng(DeriveSeed(Fnv1a64(r.eval_language), kQueryStream));
    rng.Shuffle(pool.begin(), pool.end());
    if (pool.size() > static_cast<std::size_t>(plan_.qbe_query_words)) pool.resize(plan_.qbe_query_words);
    for (auto &q : pool) {
      rng.Shuffle(q.instances.begin(), q.instances.end());
      if (q.instances.size() > static_cast<std::size_t>(plan_.qbe_max_instances))
        q.instances.resize(plan_.qbe_max_instances);
      std::sort(q.instances.begin(), q.instances.end());
    }
    std::sort(pool.begin(), pool.end(),
              [](const QbeQuery &a, const QbeQuery &b) { return a.query_word < b.query_word; });
    if (pool.empty()) throw Error("no QbE queries available for " + r.eval_language);
    e.queries = std::move(pool);
  }

  std::vector<std::vector<ResultRow>> rows(requests.size());
  ParallelFor(requests.size(), [&](std::size_t i) {
    const Request &r = requests[i];
    const RunOutcome &run = runs_.at(r.key);
    const auto d = static_cast<std::size_t>(
        std::find(run.dev_languages.begin(), run.dev_languages.end(), dev_of[i]) -
        run.dev_languages.begin());
    const Checkpoint &ckpt = run.best.at(d);
    const EvalData &e = eval_data.at(r.eval_language);

    ResultRow row{r.experiment, r.sequence, r.step, run.model_id, Join(r.key.languages, "+"),
                  r.key.fraction, r.eval_language, "ap", 0.0, r.key.seed, dev_of[i],
                  run.checkpoint_paths.at(d), ConfigHash(r.key)};
    row.value = SameDiffAp(EmbedSegments(ckpt, corpus_.archive, e.test, 1), false, 1).ap;
    rows[i].push_back(row);
    if (r.qbe) {
      const SegmentIndex index = BuildIndex(ckpt.params, ckpt.config, e.search, plan_.qbe_windows, 1);
      double sum = 0.0;
      for (const auto &q : e.queries)
        sum += RunQbe(ckpt.params, ckpt.config, q, corpus_.archive, index, e.truth, false, 1).p_at_10;
      row.metric = "p_at_10";
      row.value = sum / static_cast<double>(e.queries.size());
      rows[i].push_back(row);
    }
  }, plan_.threads);

  ResultTable table;
  for (auto &r : rows) table.rows.insert(table.rows.end(), r.begin(), r.end());
  return table;
}

ResultTable ExperimentRunner::RunCrosslingualMatrix() {
  if (plan_.languages.size() < 2) throw Error("the cross-lingual matrix needs at least 2 languages");
  std::vector<Request> requests;
  for (std::uint64_t seed : plan_.seeds)
    for (const auto &train : plan_.languages)
      for (const auto &eval : plan_.languages) {
        if (train == eval && !plan_.matrix_diagonal) continue;
        requests.push_back({"matrix", "", 0, RunKey{{train}, 1.0, seed}, eval, false});
      }
  return Execute(requests);
}

ResultTable ExperimentRunner::RunCombinationTable() {
  std::vector<Request> requests;
  auto add = [&](const std::vector<std::vector<std::string>> &combos, double fraction) {
    for (std::uint64_t seed : plan_.seeds)
      for (const auto &combo : combos) {
        std::vector<std::string> langs = combo;
        std::sort(langs.begin(), langs.end());
        for (const auto &eval : plan_.eval_languages) {
          if (std::count(langs.begin(), langs.end(), eval)) continue;
          requests.push_back({"combination", "", 0, RunKey{langs, fraction, seed}, eval, false});
        }
      }
  };
  add(plan_.combinations, 1.0);
  add(plan_.subset_combinations, plan_.subset_fraction);
  return Execute(requests);
}

ResultTable ExperimentRunner::RunIncrementalSequences(bool with_qbe) {
  std::vector<Request> requests;
  for (const auto &seq : plan_.sequences) {
    if (seq.empty()) throw Error("empty language sequence");
    for (const auto &eval : plan_.eval_languages)
      if (std::count(seq.begin(), seq.end(), eval))
        throw Error("sequence " + Join(seq, ">") + " contains eval language " + eval);
  }
  for (std::uint64_t seed : plan_.seeds)
    for (const auto &seq : plan_.sequences) {
      const std::string label = Join(seq, ">");
      for (std::size_t k = 1; k <= seq.size(); ++k) {
        std::vector<std::string> langs(seq.begin(), seq.begin() + static_cast<long>(k));
        std::sort(langs.begin(), langs.end());
        for (const auto &eval : plan_.eval_languages)
          requests.push_back({"sequence", label, static_cast<int>(k), RunKey{langs, 1.0, seed},
                              eval, with_qbe});
      }
    }
  return Execute(requests);
}

ResultTable ExperimentRunner::RunAll() {
  ResultTable table;
  if (plan_.run_matrix) table.Append(RunCrosslingualMatrix());
  if (plan_.run_combinations) table.Append(RunCombinationTable());
  if (plan_.run_sequences) table.Append(RunIncrementalSequences(plan_.sequences_qbe));
  return table;
}

ResultTable RunCrosslingualMatrix(const ExperimentPlan &plan, const std::string &out_dir) {
  return ExperimentRunner(plan, out_dir).RunCrosslingualMatrix();
}

ResultTable RunCombinationTable(const ExperimentPlan &plan, const std::string &out_dir) {
  return ExperimentRunner(plan, out_dir).RunCombinationTable();
}

ResultTable RunIncrementalSequences(const ExperimentPlan &plan, bool with_qbe,
                                    const std::string &out_dir) {
  return ExperimentRunner(plan, out_dir).RunIncrementalSequences(with_qbe);
}

}  // namespace awe
