// src/corpus/synthetic.cc

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

#include "awe/corpus/synthetic.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace awe {

namespace {

Eigen::MatrixXd GaussianRows(int rows, int cols, Rng *rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng->Normal();
  return m;
}

IntRange ReadRange(const ConfigFile &cfg, const std::string &key, IntRange def) {
  auto items = cfg.GetStringList(
      key, {std::to_string(def.lo), std::to_string(def.hi)});
  if (items.size() != 2) throw Error("range '" + key + "' needs two values");
  try {
    return {std::stoi(items[0]), std::stoi(items[1])};
  } catch (const std::exception &) {
    throw Error("range '" + key + "' must hold integers");
  }
}

void CheckRange(const IntRange &r, const char *name) {
  if (r.lo < 1 || r.hi < r.lo)
    throw Error(std::string("invalid range for ") + name);
}

std::string Pad(std::uint64_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*llu", width, static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void SyntheticFamilySpec::Validate() const {
  if (n_families < 1 || languages_per_family < 1 || phones_per_language < 1 ||
      n_word_types < 1 || n_speakers < 1 || instances_per_type < 1 || feature_dim < 1)
    throw Error("synthetic spec counts must all be >= 1");
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(shared_fraction_within_family) || !in_unit(shared_fraction_across_family))
    throw Error("shared fractions must lie in [0, 1]");
  if (shared_fraction_across_family > shared_fraction_within_family)
    throw Error("shared_fraction_across_family exceeds shared_fraction_within_family");
  if (speaker_subspace_dim > feature_dim)
    throw Error("speaker_subspace_dim exceeds feature_dim");
  if (speaker_shift_scale < 0 || noise_scale < 0)
    throw Error("speaker_shift_scale and noise_scale must be non-negative");
  CheckRange(phones_per_word, "phones_per_word");
  CheckRange(frames_per_phone, "frames_per_phone");
  CheckRange(words_per_utterance, "words_per_utterance");
  if (pause_frames.lo < 0 || pause_frames.hi < pause_frames.lo)
    throw Error("invalid range for pause_frames");
  if (phones_per_language < 2 && phones_per_word.hi > 1)
    throw Error("need at least two phones to build multi-phone words");
}

std::string SyntheticFamilySpec::ToConfigText() const {
  std::ostringstream os;
  os.precision(17);
  auto range = [](const IntRange &r) {
    return "[" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "]";
  };
  os << "n_families = " << n_families << "\n"
     << "languages_per_family = " << languages_per_family << "\n"
     << "phones_per_language = " << phones_per_language << "\n"
     << "shared_fraction_within_family = " << shared_fraction_within_family << "\n"
     << "shared_fraction_across_family = " << shared_fraction_across_family << "\n"
     << "n_word_types = " << n_word_types << "\n"
     << "phones_per_word = " << range(phones_per_word) << "\n"
     << "n_speakers = " << n_speakers << "\n"
     << "instances_per_type = " << instances_per_type << "\n"
     << "speaker_shift_scale = " << speaker_shift_scale << "\n"
     << "noise_scale = " << noise_scale << "\n"
     << "frames_per_phone = " << range(frames_per_phone) << "\n"
     << "seed = " << seed << "\n"
     << "feature_dim = " << feature_dim << "\n"
     << "words_per_utterance = " << range(words_per_utterance) << "\n"
     << "pause_frames = " << range(pause_frames) << "\n"
     << "speaker_subspace_dim = " << speaker_subspace_dim << "\n";
  return os.str();
}

SyntheticFamilySpec SyntheticFamilySpec::FromConfig(const ConfigFile &cfg,
                                                    const std::string &prefix) {
  SyntheticFamilySpec s;
  auto u32 = [&](const char *key, std::uint32_t def) {
    long long v = cfg.GetInt(prefix + key, def);
    if (v < 0 || v > 0xffffffffLL) throw Error(std::string("out of range: ") + key);
    return static_cast<std::uint32_t>(v);
  };
  s.n_families = u32("n_families", s.n_families);
  s.languages_per_family = u32("languages_per_family", s.languages_per_family);
  s.phones_per_language = u32("phones_per_language", s.phones_per_language);
  s.shared_fraction_within_family =
      cfg.GetDouble(prefix + "shared_fraction_within_family", s.shared_fraction_within_family);
  s.shared_fraction_across_family =
      cfg.GetDouble(prefix + "shared_fraction_across_family", s.shared_fraction_across_family);
  s.n_word_types = u32("n_word_types", s.n_word_types);
  s.phones_per_word = ReadRange(cfg, prefix + "phones_per_word", s.phones_per_word);
  s.n_speakers = u32("n_speakers", s.n_speakers);
  s.instances_per_type = u32("instances_per_type", s.instances_per_type);
  s.speaker_shift_scale = cfg.GetDouble(prefix + "speaker_shift_scale", s.speaker_shift_scale);
  s.noise_scale = cfg.GetDouble(prefix + "noise_scale", s.noise_scale);
  s.frames_per_phone = ReadRange(cfg, prefix + "frames_per_phone", s.frames_per_phone);
  s.seed = static_cast<std::uint64_t>(cfg.GetInt(prefix + "seed", static_cast<long long>(s.seed)));
  s.feature_dim = u32("feature_dim", s.feature_dim);
  s.words_per_utterance = ReadRange(cfg, prefix + "words_per_utterance", s.words_per_utterance);
  s.pause_frames = ReadRange(cfg, prefix + "pause_frames", s.pause_frames);
  s.speaker_subspace_dim = u32("speaker_subspace_dim", s.speaker_subspace_dim);
  s.Validate();
  return s;
}

std::string SyntheticFamilyName(std::uint32_t family) {
  if (family < 26) return std::string(1, static_cast<char>('A' + family));
  return "F" + std::to_string(family) + "_";
}

std::string SyntheticLanguageName(std::uint32_t family, std::uint32_t index) {
  return SyntheticFamilyName(family) + std::to_string(index);
}

FeatureMatrix RenderPhones(const Eigen::MatrixXd &inventory,
                           const std::vector<int> &phones,
                           const std::vector<int> &durations,
                           const Eigen::VectorXd &speaker_shift, double noise_scale,
                           Rng *rng) {
  int total = 0;
  for (int d : durations) total += d;
  const int dim = static_cast<int>(inventory.cols());
  FeatureMatrix out(total, dim);
  int row = 0;
  for (std::size_t p = 0; p < phones.size(); ++p) {
    for (int k = 0; k < durations[p]; ++k, ++row) {
      for (int j = 0; j < dim; ++j)
        out(row, j) = static_cast<float>(inventory(phones[p], j) + speaker_shift(j) +
                                         noise_scale * rng->Normal());
    }
  }
  return out;
}

SyntheticCorpus GenerateSyntheticCorpus(const SyntheticFamilySpec &spec) {
  spec.Validate();
  const int P = static_cast<int>(spec.phones_per_language);
  const int D = static_cast<int>(spec.feature_dim);
  const int n_across = static_cast<int>(std::floor(spec.shared_fraction_across_family * P));
  const int n_within = static_cast<int>(std::floor(spec.shared_fraction_within_family * P));

  SyntheticCorpus corpus;
  Rng base(DeriveSeed(spec.seed, 0));
  // Inventory rows: [global shared | family shared | language specific].
  Eigen::MatrixXd global = GaussianRows(n_across, D, &base);
  std::vector<Eigen::MatrixXd> family_shared;
  for (std::uint32_t f = 0; f < spec.n_families; ++f)
    family_shared.push_back(GaussianRows(n_within - n_across, D, &base));
  // Orthonormal basis of the speaker subspace shared by every language.
  const int R = static_cast<int>(spec.speaker_subspace_dim);
  Eigen::MatrixXd speaker_basis;
  if (R > 0) {
    Eigen::MatrixXd g = GaussianRows(D, R, &base);
    speaker_basis = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
                    Eigen::MatrixXd::Identity(D, R);
  }

  std::uint64_t utterance_counter = 0;
  for (std::uint32_t f = 0; f < spec.n_families; ++f) {
    for (std::uint32_t l = 0; l < spec.languages_per_family; ++l) {
      const std::string lang = SyntheticLanguageName(f, l);
      const std::uint64_t lang_index = f * spec.languages_per_family + l;
      Rng rng(DeriveSeed(spec.seed, 1000 + lang_index));

      Eigen::MatrixXd inventory(P, D);
      inventory.topRows(n_across) = global;
      inventory.middleRows(n_across, n_within - n_across) = family_shared[f];
      inventory.bottomRows(P - n_within) = GaussianRows(P - n_within, D, &rng);
      corpus.languages.push_back(lang);
      corpus.family_of[lang] = SyntheticFamilyName(f);

      // Vocabulary: distinct phone strings without immediate repeats.
      std::vector<std::vector<int>> vocab;
      std::set<std::vector<int>> seen;
      int attempts = 0;
      while (vocab.size() < spec.n_word_types) {
        if (++attempts > 1000 * static_cast<int>(spec.n_word_types))
          throw Error("cannot draw enough distinct words; enlarge the inventory");
        int len = static_cast<int>(rng.Between(spec.phones_per_word.lo, spec.phones_per_word.hi));
        std::vector<int> word;
        while (static_cast<int>(word.size()) < len) {
          int ph = static_cast<int>(rng.Below(P));
          if (!word.empty() && ph == word.back() && P > 1) continue;
          word.push_back(ph);
        }
        if (seen.insert(word).second) vocab.push_back(std::move(word));
      }

      std::vector<Eigen::VectorXd> shifts;
      auto &speaker_ids = corpus.speakers[lang];
      for (std::uint32_t s = 0; s < spec.n_speakers; ++s) {
        Eigen::VectorXd shift(D);
        if (R > 0) {
          Eigen::VectorXd c(R);
          for (int j = 0; j < R; ++j) c(j) = spec.speaker_shift_scale * rng.Normal();
          shift = speaker_basis * c;
        } else {
          for (int j = 0; j < D; ++j) shift(j) = spec.speaker_shift_scale * rng.Normal();
        }
        shifts.push_back(shift);
        speaker_ids.push_back(lang + "_s" + Pad(s, 2));
      }

      // Instance i of type w goes to speaker (w + i) mod n_speakers.
      std::vector<std::vector<int>> tokens(spec.n_speakers);
      for (std::uint32_t w = 0; w < spec.n_word_types; ++w)
        for (std::uint32_t i = 0; i < spec.instances_per_type; ++i)
          tokens[(w + i) % spec.n_speakers].push_back(static_cast<int>(w));

      for (std::uint32_t s = 0; s < spec.n_speakers; ++s) {
        auto &toks = tokens[s];
        rng.Shuffle(toks.begin(), toks.end());
        std::size_t pos = 0;
        int utt_in_speaker = 0;
        while (pos < toks.size()) {
          auto n_words = static_cast<std::size_t>(
              rng.Between(spec.words_per_utterance.lo, spec.words_per_utterance.hi));
          n_words = std::min(n_words, toks.size() - pos);
          const std::string utt = speaker_ids[s] + "_u" + Pad(utt_in_speaker++, 4);
          Rng urng(DeriveSeed(spec.seed, 1'000'000 + utterance_counter++));

          std::vector<FeatureMatrix> pieces;
          int t = 0;
          auto add_pause = [&] {
            int len = static_cast<int>(urng.Between(spec.pause_frames.lo, spec.pause_frames.hi));
            if (len == 0) return;
            FeatureMatrix pause(len, D);
            for (int r = 0; r < len; ++r)
              for (int j = 0; j < D; ++j)
                pause(r, j) = static_cast<float>(shifts[s](j) + spec.noise_scale * urng.Normal());
            pieces.push_back(std::move(pause));
            t += len;
          };
          for (std::size_t k = 0; k < n_words; ++k) {
            add_pause();
            int w = toks[pos + k];
            std::vector<int> durations;
            for (std::size_t p = 0; p < vocab[w].size(); ++p)
              durations.push_back(static_cast<int>(
                  urng.Between(spec.frames_per_phone.lo, spec.frames_per_phone.hi)));
            FeatureMatrix word =
                RenderPhones(inventory, vocab[w], durations, shifts[s], spec.noise_scale, &urng);
            corpus.segments.push_back({utt, lang + "_w" + Pad(w, 3), speaker_ids[s], lang,
                                       static_cast<std::uint32_t>(t),
                                       static_cast<std::uint32_t>(t + word.rows())});
            t += static_cast<int>(word.rows());
            pieces.push_back(std::move(word));
          }
          add_pause();
          pos += n_words;

          FeatureSequence fs;
          fs.utterance_id = utt;
          fs.frames.resize(t, D);
          int row = 0;
          for (const auto &piece : pieces) {
            fs.frames.middleRows(row, piece.rows()) = piece;
            row += static_cast<int>(piece.rows());
          }
          corpus.features.push_back(std::move(fs));
        }
      }
      corpus.inventories[lang] = std::move(inventory);
    }
  }
  return corpus;
}

void WriteFamilyMap(const std::string &path,
                    const std::map<std::string, std::string> &family_of) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (const auto &[lang, fam] : family_of) out << lang << '\t' << fam << '\n';
}

std::map<std::string, std::string> ReadFamilyMap(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open family map " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw Error(path + ": line " + std::to_string(line_no) + ": expected language<TAB>family");
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

}  // namespace awe
