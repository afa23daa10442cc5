// tests/corpus-test.cc

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

#include <fstream>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "awe/corpus/pairs.h"
#include "awe/corpus/synthetic.h"
#include "awe/corpus/word-segment.h"
#include "test-util.h"

namespace awe {
namespace {

using awe::testing::TempDir;

WordSegment Seg(const std::string &utt, const std::string &word, const std::string &lang,
                std::uint32_t start, std::uint32_t end, const std::string &spk = "s") {
  return {utt, word, spk, lang, start, end};
}

TEST(AlignmentTest, ParsesOneRecord) {
  const WordSegment s = ParseAlignmentLine("utt1\thello\tspk3\teng\t10\t45");
  EXPECT_EQ(s, (WordSegment{"utt1", "hello", "spk3", "eng", 10, 45}));
  EXPECT_EQ(s.NumFrames(), 35u);
  EXPECT_EQ(ParseAlignmentLine(FormatAlignmentLine(s)), s);
}

TEST(AlignmentTest, RejectsBadRecords) {
  EXPECT_THROW(ParseAlignmentLine("utt1\thello\tspk3\teng\t10\t10"), Error);
  EXPECT_THROW(ParseAlignmentLine("utt1\thello\tspk3\teng\t10\t5"), Error);
  EXPECT_THROW(ParseAlignmentLine("utt1\thello\tspk3\teng\t10"), Error);
  EXPECT_THROW(ParseAlignmentLine("utt1\thello\tspk3\teng\tx\t12"), Error);
  EXPECT_THROW(ParseAlignmentLine("utt1\thello\tspk3\teng\t-1\t12"), Error);
}

TEST(AlignmentTest, FileErrorNamesTheLine) {
  TempDir dir;
  std::ofstream(dir.File("a.tsv")) << "# header\nu1\tw\ts\tl\t0\t5\nu1\tw\ts\tl\t9\n";
  try {
    LoadAlignments(dir.File("a.tsv"));
    FAIL() << "malformed file accepted";
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(AlignmentTest, RoundTripAndBoundsCheck) {
  TempDir dir;
  std::vector<WordSegment> segs = {Seg("u1", "a", "L", 0, 5), Seg("u1", "b", "L", 5, 9)};
  WriteAlignments(dir.File("a.tsv"), segs);
  EXPECT_EQ(LoadAlignments(dir.File("a.tsv")), segs);

  std::vector<FeatureSequence> feats(1);
  feats[0].utterance_id = "u1";
  feats[0].frames = FeatureMatrix::Zero(8, 13);
  FeatureArchive archive(feats);
  EXPECT_THROW(LoadAlignments(dir.File("a.tsv"), &archive), Error);  // end 9 > T 8
  EXPECT_THROW(CheckSegmentsAgainstArchive({Seg("u2", "a", "L", 0, 2)}, archive), Error);
  EXPECT_NO_THROW(CheckSegmentsAgainstArchive({Seg("u1", "a", "L", 3, 8)}, archive));
}

TEST(AlignmentTest, SliceAndDropShort) {
  std::vector<FeatureSequence> feats(1);
  feats[0].utterance_id = "u";
  feats[0].frames.resize(10, 13);
  for (int t = 0; t < 10; ++t) feats[0].frames.row(t).setConstant(static_cast<float>(t));
  FeatureArchive archive(feats);
  const FeatureMatrix m = SliceSegment(archive, Seg("u", "w", "L", 3, 7));
  ASSERT_EQ(m.rows(), 4);
  EXPECT_EQ(m(0, 0), 3.0f);
  EXPECT_EQ(m(3, 12), 6.0f);
  auto kept = DropShortSegments({Seg("u", "a", "L", 0, 3), Seg("u", "b", "L", 3, 7)});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].word_type, "b");
}

// Oracle: every unordered pair of distinct same-type occurrences.
std::set<std::pair<WordSegment, WordSegment>> AllPairs(const std::vector<WordSegment> &segs) {
  std::set<std::pair<WordSegment, WordSegment>> out;
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j)
      if (segs[i].word_type == segs[j].word_type && segs[i].language_id == segs[j].language_id)
        out.insert(std::minmax(segs[i], segs[j]));
  return out;
}

std::vector<WordSegment> Occurrences(const std::string &word, int k, const std::string &lang) {
  std::vector<WordSegment> out;
  for (int i = 0; i < k; ++i)
    out.push_back(Seg(lang + "_u" + std::to_string(i), word, lang, 0, 5));
  return out;
}

TEST(MinePairsTest, TwoOccurrencesGiveOnePair) {
  auto pairs = MinePairs(Occurrences("cat", 2, "L"), 10, true, 0);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_FALSE(pairs[0].anchor.SameOccurrence(pairs[0].positive));
}

TEST(MinePairsTest, ExhaustiveBudgetEnumeratesTheUniverse) {
  auto segs = Occurrences("cat", 7, "L");
  auto dogs = Occurrences("dog", 4, "L");
  for (auto &d : dogs) d.start_frame = 10, d.end_frame = 15;
  segs.insert(segs.end(), dogs.begin(), dogs.end());
  const auto expected = AllPairs(segs);
  EXPECT_EQ(expected.size(), 21u + 6u);
  EXPECT_EQ(CountPairUniverse(segs), expected.size());

  auto pairs = MinePairs(segs, 1000, true, 3);
  std::set<std::pair<WordSegment, WordSegment>> got;
  for (const auto &p : pairs) {
    EXPECT_EQ(p.anchor.word_type, p.positive.word_type);
    EXPECT_TRUE(got.insert(std::minmax(p.anchor, p.positive)).second) << "pair repeated";
  }
  EXPECT_EQ(got, expected);
}

TEST(MinePairsTest, BudgetIsPerLanguage) {
  auto a = Occurrences("x", 10, "A");  // 45 pairs available
  auto b = Occurrences("y", 3, "B");   // 3 pairs available
  a.insert(a.end(), b.begin(), b.end());
  auto pairs = MinePairs(a, 20, true, 0);
  std::map<std::string, int> per;
  for (const auto &p : pairs) per[p.anchor.language_id]++;
  EXPECT_EQ(per["A"], 20);
  EXPECT_EQ(per["B"], 3);
  // Grouped by sorted language id.
  EXPECT_EQ(pairs.front().anchor.language_id, "A");
  EXPECT_EQ(pairs.back().anchor.language_id, "B");
  EXPECT_EQ(MinePairs(a, 20, false, 0).size(), 20u);
}

TEST(MinePairsTest, DeterministicPerSeed) {
  auto segs = Occurrences("x", 30, "A");
  auto p1 = MinePairs(segs, 50, true, 9), p2 = MinePairs(segs, 50, true, 9);
  auto p3 = MinePairs(segs, 50, true, 10);
  ASSERT_EQ(p1.size(), p2.size());
  bool differs = false;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    EXPECT_EQ(p1[i].anchor, p2[i].anchor);
    EXPECT_EQ(p1[i].positive, p2[i].positive);
    differs = differs || !(p1[i].anchor == p3[i].anchor && p1[i].positive == p3[i].positive);
  }
  EXPECT_TRUE(differs);
}

TEST(MinePairsTest, DuplicateOccurrencesCollapse) {
  auto segs = Occurrences("x", 2, "A");
  segs.push_back(segs[0]);
  EXPECT_EQ(MinePairs(segs, 10, true, 0).size(), 1u);
}

TEST(MinePairsTest, ErrorListsLanguagesWithoutPairs) {
  auto segs = Occurrences("x", 3, "A");
  segs.push_back(Seg("b1", "y", "B", 0, 5));
  segs.push_back(Seg("c1", "z", "C", 0, 5));
  try {
    MinePairs(segs, 5, true, 0);
    FAIL();
  } catch (const Error &e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("B"), std::string::npos);
    EXPECT_NE(msg.find("C"), std::string::npos);
  }
}

TEST(MinePairsTest, PairFileRoundTrip) {
  TempDir dir;
  auto pairs = MinePairs(Occurrences("x", 5, "A"), 4, true, 1);
  WritePairs(dir.File("p.tsv"), pairs);
  auto back = ReadPairs(dir.File("p.tsv"));
  ASSERT_EQ(back.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(back[i].anchor, pairs[i].anchor);
    EXPECT_EQ(back[i].positive, pairs[i].positive);
  }
}

SyntheticFamilySpec SmallSpec() {
  SyntheticFamilySpec s;
  s.n_word_types = 8;
  s.n_speakers = 3;
  s.instances_per_type = 4;
  return s;
}

double MeanCosine(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  double sum = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j)
      sum += a.row(i).dot(b.row(j)) / (a.row(i).norm() * b.row(j).norm());
  return sum / static_cast<double>(a.rows() * b.rows());
}

TEST(SyntheticTest, SameFamilyInventoriesAreCloser) {
  for (double within : {0.6, SyntheticFamilySpec{}.shared_fraction_within_family}) {
    SyntheticFamilySpec spec = SmallSpec();
    spec.shared_fraction_within_family = within;
    const auto corpus = GenerateSyntheticCorpus(spec);
    double same = 0, cross = 0;
    int n_same = 0, n_cross = 0;
    for (const auto &[a, inv_a] : corpus.inventories)
      for (const auto &[b, inv_b] : corpus.inventories) {
        if (a >= b) continue;
        const double c = MeanCosine(inv_a, inv_b);
        if (corpus.family_of.at(a) == corpus.family_of.at(b)) {
          same += c;
          ++n_same;
        } else {
          cross += c;
          ++n_cross;
        }
      }
    EXPECT_EQ(n_same, 6);
    EXPECT_EQ(n_cross, 9);
    EXPECT_GT(same / n_same, cross / n_cross) << "within=" << within;
  }
}

TEST(SyntheticTest, FullSharingGivesIdenticalInventories) {
  SyntheticFamilySpec spec = SmallSpec();
  spec.shared_fraction_within_family = 1.0;
  spec.noise_scale = 0;
  spec.speaker_shift_scale = 0;
  const auto corpus = GenerateSyntheticCorpus(spec);
  EXPECT_EQ(corpus.inventories.at("A0"), corpus.inventories.at("A1"));
  EXPECT_EQ(corpus.inventories.at("B0"), corpus.inventories.at("B2"));
  EXPECT_NE(corpus.inventories.at("A0"), corpus.inventories.at("B0"));

  // Without noise or speakers, a phone string renders to its prototypes.
  Rng rng(0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(13);
  const auto &inv = corpus.inventories.at("A0");
  FeatureMatrix a = RenderPhones(inv, {1, 4, 2}, {2, 3, 1}, zero, 0.0, &rng);
  FeatureMatrix b = RenderPhones(corpus.inventories.at("A1"), {1, 4, 2}, {2, 3, 1}, zero, 0.0, &rng);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.rows(), 6);
  EXPECT_FLOAT_EQ(a(2, 5), static_cast<float>(inv(4, 5)));
}

TEST(SyntheticTest, NoAcrossSharingGivesDisjointInventories) {
  const auto corpus = GenerateSyntheticCorpus(SmallSpec());
  const auto &a = corpus.inventories.at("A0");
  const auto &b = corpus.inventories.at("B0");
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j) EXPECT_NE(a.row(i), b.row(j));
  // Same family shares exactly floor(within * P) rows.
  const auto &a1 = corpus.inventories.at("A1");
  int shared = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a1.rows(); ++j) shared += a.row(i) == a1.row(j);
  const auto spec = SmallSpec();
  EXPECT_EQ(shared, static_cast<int>(spec.shared_fraction_within_family * spec.phones_per_language));
}

TEST(SyntheticTest, ShapeAndBounds) {
  const SyntheticFamilySpec spec = SmallSpec();
  const auto corpus = GenerateSyntheticCorpus(spec);
  EXPECT_EQ(corpus.family_of.size(), 6u);
  EXPECT_EQ(corpus.segments.size(), 6u * spec.n_word_types * spec.instances_per_type);
  FeatureArchive archive(corpus.features);
  EXPECT_NO_THROW(CheckSegmentsAgainstArchive(corpus.segments, archive));
  std::map<std::string, int> per_type;
  std::set<std::string> speakers;
  for (const auto &s : corpus.segments) {
    per_type[s.word_type]++;
    speakers.insert(s.speaker_id);
    EXPECT_GE(s.NumFrames(), spec.phones_per_word.lo * spec.frames_per_phone.lo);
  }
  for (const auto &[w, n] : per_type) EXPECT_EQ(n, static_cast<int>(spec.instances_per_type));
  EXPECT_EQ(speakers.size(), 6u * spec.n_speakers);
}

TEST(SyntheticTest, RegenerationIsByteIdentical) {
  TempDir dir;
  WriteFeatureArchive(GenerateSyntheticCorpus(SmallSpec()).features, dir.File("a.awef"));
  WriteFeatureArchive(GenerateSyntheticCorpus(SmallSpec()).features, dir.File("b.awef"));
  EXPECT_EQ(awe::testing::ReadBytes(dir.File("a.awef")),
            awe::testing::ReadBytes(dir.File("b.awef")));
  SyntheticFamilySpec other = SmallSpec();
  other.seed = 1;
  WriteFeatureArchive(GenerateSyntheticCorpus(other).features, dir.File("c.awef"));
  EXPECT_NE(awe::testing::ReadBytes(dir.File("a.awef")),
            awe::testing::ReadBytes(dir.File("c.awef")));
}

TEST(SyntheticTest, SpeakerShiftsLieInTheSharedSubspace) {
  SyntheticFamilySpec spec = SmallSpec();
  spec.noise_scale = 0;
  spec.pause_frames = {1, 1};
  const auto corpus = GenerateSyntheticCorpus(spec);
  FeatureArchive archive(corpus.features);
  // Pause frames carry only the speaker shift; collect the first one of
  // every utterance and check the rank of their span.
  Eigen::MatrixXd shifts(static_cast<Eigen::Index>(corpus.features.size()), 13);
  for (std::size_t u = 0; u < corpus.features.size(); ++u)
    shifts.row(static_cast<Eigen::Index>(u)) = corpus.features[u].frames.row(0).cast<double>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifts);
  const auto sv = svd.singularValues();
  EXPECT_GT(sv(1), 1e-3 * sv(0));
  EXPECT_LT(sv(spec.speaker_subspace_dim), 1e-5 * sv(0));
}

TEST(SyntheticTest, ValidationAndConfigRoundTrip) {
  SyntheticFamilySpec bad = SmallSpec();
  bad.shared_fraction_across_family = 0.9;
  bad.shared_fraction_within_family = 0.5;
  EXPECT_THROW(GenerateSyntheticCorpus(bad), Error);
  bad = SmallSpec();
  bad.n_speakers = 0;
  EXPECT_THROW(bad.Validate(), Error);

  SyntheticFamilySpec spec = SmallSpec();
  spec.noise_scale = 0.25;
  spec.seed = 77;
  ConfigFile cfg = ConfigFile::Parse(spec.ToConfigText(), "spec");
  const SyntheticFamilySpec back = SyntheticFamilySpec::FromConfig(cfg);
  EXPECT_NO_THROW(cfg.CheckAllConsumed());
  EXPECT_EQ(back.ToConfigText(), spec.ToConfigText());
}

TEST(SyntheticTest, FamilyMapRoundTrip) {
  TempDir dir;
  std::map<std::string, std::string> fam{{"A0", "A"}, {"B1", "B"}};
  WriteFamilyMap(dir.File("f.tsv"), fam);
  EXPECT_EQ(ReadFamilyMap(dir.File("f.tsv")), fam);
}

}  // namespace
}  // namespace awe
