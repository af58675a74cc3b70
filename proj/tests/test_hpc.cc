// hpctk/test_hpc.cc

// Copyright 2026  The hpctk authors

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "hpctk/error.h"
#include "hpctk/hpc.h"
#include "test_support.h"

using namespace hpctk;

namespace {

ContinuousLogF0Track MakeTrack(double duration,
                               const std::function<double(double)> &f) {
  ContinuousLogF0Track t;
  const int n = static_cast<int>(std::floor(duration / kPitchHopSeconds)) + 1;
  t.log_f0.resize(n);
  t.voiced.assign(n, true);
  for (int i = 0; i < n; ++i) t.log_f0[i] = f(i * kPitchHopSeconds);
  return t;
}

// One word containing all the phones, no silence padding.
UtteranceAlignment AlignFromPhones(
    const std::vector<std::pair<std::string, double>> &phones, double lead = 0.0) {
  TextGridTier phones_tier, words_tier;
  double t = lead;
  if (lead > 0.0) phones_tier.push_back({0.0, lead, ""});
  const double word_start = t;
  for (const auto &[label, dur] : phones) {
    phones_tier.push_back({t, t + dur, label});
    t += dur;
  }
  words_tier.push_back({word_start, t, "w"});
  if (lead > 0.0) words_tier.insert(words_tier.begin(), {0.0, lead, ""});
  return BuildAlignment(words_tier, phones_tier);
}

// Independent percentile oracle with the same convention, coded separately
// from the library path.
double OraclePercentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double rank = p / 100.0 * (v.size() - 1);
  const size_t lo = static_cast<size_t>(rank);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - (rank - lo)) + v[lo + 1] * (rank - lo);
}

Matrix RandomMatrix(std::mt19937 &rng, int rows, int cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (auto &v : m.data) v = dist(rng);
  return m;
}

CorpusStats StatsFor(const HierarchySpec &h, std::vector<double> mu,
                     std::vector<double> sigma) {
  CorpusStats s;
  s.hierarchy = h;
  s.mu = std::move(mu);
  s.sigma = std::move(sigma);
  return s;
}

}  // namespace

TEST_CASE("measurement collapse: flat contour, uniform durations") {
  const double median = std::log(170.0);
  const auto track = MakeTrack(0.5, [&](double) { return median; });
  std::vector<PhoneInterval> phones;
  for (int i = 0; i < 5; ++i) {
    PhoneInterval p;
    p.label = "AH0";
    p.start = 0.1 * i;
    p.end = 0.1 * (i + 1);
    phones.push_back(p);
  }
  const auto m = MeasureInterval(track, 0.0, 0.5, phones, median);
  CHECK(m.dur == doctest::Approx(std::log(0.1)).epsilon(1e-12));
  CHECK(m.delta_f0 == 0.0);
  CHECK(m.f0 == 0.0);
  CHECK(std::fabs(m.slope_f0) <= 1e-12);
}

TEST_CASE("slope: exact on a linear contour rising 0.5 over 1 s") {
  const auto track =
      MakeTrack(1.0, [](double t) { return std::log(150.0) + 0.5 * t; });
  PhoneInterval p;
  p.label = "AA1";
  p.start = 0.0;
  p.end = 1.0;
  const auto m = MeasureInterval(track, 0.0, 1.0, {p}, std::log(150.0));
  CHECK(m.slope_f0 == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("delta-f0 matches an exhaustive percentile oracle on a sawtooth") {
  const auto saw = [](double t) {
    const double phase = std::fmod(t * 7.3, 1.0);
    return 5.0 + 0.3 * (phase - 0.5);
  };
  const auto track = MakeTrack(0.8, saw);
  PhoneInterval p;
  p.label = "IY1";
  p.start = 0.0;
  p.end = 0.8;
  const auto m = MeasureInterval(track, 0.0, 0.8, {p}, 5.0);
  std::vector<double> values;
  for (int i = 0; i < track.NumFrames(); ++i) {
    const double t = i * kPitchHopSeconds;
    if (t < 0.8) values.push_back(track.log_f0[i]);
  }
  const double expected =
      OraclePercentile(values, 95.0) - OraclePercentile(values, 5.0);
  CHECK(m.delta_f0 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("intervals without frames or without phones are errors") {
  const auto track = MakeTrack(0.5, [](double) { return 5.0; });
  PhoneInterval p;
  p.label = "AH0";
  p.start = 0.001;
  p.end = 0.004;  // shorter than one hop, contains no frame center
  CHECK_THROWS_AS(MeasureInterval(track, 0.001, 0.004, {p}, 5.0), Error);
  PhoneInterval sil;
  sil.label = "sil";
  sil.is_silence = true;
  sil.start = 0.0;
  sil.end = 0.2;
  CHECK_THROWS_AS(MeasureInterval(track, 0.0, 0.2, {sil}, 5.0), Error);
}

TEST_CASE("propagate: sentence level replicates one row everywhere") {
  const auto track = MakeTrack(0.5, [](double t) { return 5.0 + 0.1 * t; });
  const auto a = AlignFromPhones(
      {{"M", 0.1}, {"EH1", 0.1}, {"L", 0.1}, {"OW1", 0.1}, {"N", 0.1}});
  const Matrix block = PropagateLevel(track, a, Level::kSentence, 5.0);
  REQUIRE(block.rows == 5);
  for (int r = 1; r < block.rows; ++r)
    for (int c = 0; c < 4; ++c) CHECK(block.At(r, c) == block.At(0, c));
}

TEST_CASE("propagate: word level is piecewise constant over words") {
  const auto track = MakeTrack(
      0.6, [](double t) { return 5.0 + 0.3 * std::sin(2 * M_PI * t / 0.37); });
  TextGridTier words = {{0.0, 0.2, "ma"}, {0.2, 0.6, "moon"}};
  TextGridTier phones = {{0.0, 0.1, "M"},
                         {0.1, 0.2, "AA1"},
                         {0.2, 0.3, "M"},
                         {0.3, 0.45, "UW1"},
                         {0.45, 0.6, "N"}};
  const auto a = BuildAlignment(words, phones);
  const Matrix block = PropagateLevel(track, a, Level::kWord, 5.0);
  REQUIRE(block.rows == 5);
  for (int c = 0; c < 4; ++c) {
    CHECK(block.At(0, c) == block.At(1, c));
    CHECK(block.At(2, c) == block.At(3, c));
    CHECK(block.At(3, c) == block.At(4, c));
    CHECK(block.At(1, c) != doctest::Approx(block.At(2, c)).epsilon(1e-15));
  }
}

TEST_CASE("propagate: phone level is the per-phone identity") {
  const auto track = MakeTrack(0.4, [](double t) { return 5.0 + 0.3 * t; });
  const auto a = AlignFromPhones({{"M", 0.1}, {"AY1", 0.15}, {"L", 0.15}});
  const Matrix block = PropagateLevel(track, a, Level::kPhone, 5.0);
  const auto content = a.NonSilencePhones();
  for (int r = 0; r < block.rows; ++r) {
    const auto &p = a.phones[content[r]];
    const auto m = MeasureInterval(track, p.start, p.end, {p}, 5.0);
    CHECK(block.At(r, 0) == m.dur);
    CHECK(block.At(r, 1) == m.delta_f0);
    CHECK(block.At(r, 2) == m.f0);
    CHECK(block.At(r, 3) == m.slope_f0);
  }
}

TEST_CASE("residual: single level passes through unchanged") {
  std::mt19937 rng(1);
  const Matrix b = RandomMatrix(rng, 6, 4);
  const Matrix p = BuildResidual({b});
  for (size_t i = 0; i < b.data.size(); ++i) CHECK(p.data[i] == b.data[i]);
}

TEST_CASE("residual: identical blocks give a zero residual group") {
  std::mt19937 rng(2);
  const Matrix b = RandomMatrix(rng, 5, 4);
  const Matrix p = BuildResidual({b, b});
  for (int r = 0; r < 5; ++r)
    for (int c = 4; c < 8; ++c) CHECK(p.At(r, c) == 0.0);
}

TEST_CASE("residual: prefix-sum reconstruction is exact") {
  // Values on a dyadic grid make IEEE subtraction and re-addition exact, so
  // the round-trip must be bitwise; arbitrary doubles would test rounding,
  // not the code.
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> grid(-(1 << 22), 1 << 22);
  HierarchySpec h = HierarchySpec::Preset("hpc1");
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Matrix> blocks;
    const int rows = 1 + static_cast<int>(rng() % 7);
    for (int li = 0; li < 3; ++li) {
      Matrix b(rows, 4);
      for (auto &v : b.data) v = grid(rng) * 0x1p-20;
      blocks.push_back(std::move(b));
    }
    const Matrix p = BuildResidual(blocks);
    const auto back = ReconstructAbsoluteBlocks(p, h);
    REQUIRE(back.size() == blocks.size());
    for (size_t li = 0; li < blocks.size(); ++li)
      for (size_t i = 0; i < blocks[li].data.size(); ++i)
        CHECK(back[li].data[i] == blocks[li].data[i]);
  }
}

TEST_CASE("residual: mismatched phone counts are rejected") {
  std::mt19937 rng(4);
  CHECK_THROWS_AS(
      BuildResidual({RandomMatrix(rng, 3, 4), RandomMatrix(rng, 4, 4)}),
      Error);
}

TEST_CASE("normalization: the mean maps to zero, mu + 3 sigma to one") {
  const HierarchySpec h{{Level::kSentence}};
  const auto stats = StatsFor(h, {1.0, -2.0, 0.5, 3.0}, {0.1, 0.2, 0.3, 0.4});
  Matrix p(2, 4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c)
      p.At(r, c) = r == 0 ? stats.mu[c] : stats.mu[c] + 3.0 * stats.sigma[c];
  const HpcMatrix n = Normalize(p, h, stats);
  for (int c = 0; c < 4; ++c) {
    CHECK(n.values.At(0, c) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(n.values.At(1, c) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(n.normalized);
}

TEST_CASE("normalization round-trip: denormalize(normalize(P)) = P") {
  std::mt19937 rng(5);
  const HierarchySpec h = HierarchySpec::Preset("hpc0");
  std::uniform_real_distribution<double> sig(0.05, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> mu(8), sigma(8);
    for (int c = 0; c < 8; ++c) {
      mu[c] = sig(rng) - 1.0;
      sigma[c] = sig(rng);
    }
    const auto stats = StatsFor(h, mu, sigma);
    const Matrix p = RandomMatrix(rng, 7, 8);
    const Matrix back = Denormalize(Normalize(p, h, stats), stats);
    for (size_t i = 0; i < p.data.size(); ++i)
      CHECK(back.data[i] == doctest::Approx(p.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("denormalize: zeros map to mu, ones to mu + 3 sigma") {
  const HierarchySpec h{{Level::kSentence}};
  const auto stats = StatsFor(h, {1.0, 2.0, 3.0, 4.0}, {0.5, 0.5, 0.5, 0.5});
  HpcMatrix zeros;
  zeros.hierarchy = h;
  zeros.normalized = true;
  zeros.values = Matrix(1, 4);
  const Matrix m0 = Denormalize(zeros, stats);
  for (int c = 0; c < 4; ++c) CHECK(m0.At(0, c) == stats.mu[c]);
  HpcMatrix ones = zeros;
  for (auto &v : ones.values.data) v = 1.0;
  const Matrix m1 = Denormalize(ones, stats);
  for (int c = 0; c < 4; ++c)
    CHECK(m1.At(0, c) ==
          doctest::Approx(stats.mu[c] + 3.0 * stats.sigma[c]).epsilon(1e-15));
}

TEST_CASE("dimension mismatches are rejected") {
  const HierarchySpec h = HierarchySpec::Preset("hpc0");
  const auto stats = StatsFor(h, std::vector<double>(8, 0.0),
                              std::vector<double>(8, 1.0));
  const Matrix p(3, 4);
  CHECK_THROWS_AS(Normalize(p, h, stats), Error);
  HpcMatrix narrow;
  narrow.hierarchy = h;
  narrow.normalized = true;
  narrow.values = Matrix(3, 4);
  CHECK_THROWS_AS(Denormalize(narrow, stats), Error);
}

TEST_CASE("corpus stats: identical rows are a degenerate corpus") {
  const HierarchySpec h{{Level::kSentence}};
  std::vector<UtteranceStatsInput> corpus(2);
  for (auto &u : corpus) {
    u.speaker_id = "s";
    u.raw = Matrix(2, 4);
    for (auto &v : u.raw.data) v = 1.5;
    u.voiced_log_f0 = {5.0};
  }
  bool threw = false;
  try {
    ComputeCorpusStats(corpus, h);
  } catch (const Error &e) {
    threw = true;
    CHECK(std::string(e.what()).find("sentence_dur") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("corpus stats: two single-row utterances, population convention") {
  const HierarchySpec h{{Level::kSentence}};
  std::vector<UtteranceStatsInput> corpus(2);
  for (int i = 0; i < 2; ++i) {
    corpus[i].speaker_id = "s";
    corpus[i].raw = Matrix(1, 4);
    for (int c = 0; c < 4; ++c) corpus[i].raw.At(0, c) = i == 0 ? 0.0 : 2.0;
    corpus[i].voiced_log_f0 = {4.0 + i};
  }
  const CorpusStats stats = ComputeCorpusStats(corpus, h);
  for (int c = 0; c < 4; ++c) {
    CHECK(stats.mu[c] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(stats.sigma[c] == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(stats.speaker_median_logf0.at("s") == doctest::Approx(4.5));
}

TEST_CASE("corpus stats: fewer than two utterances is an error") {
  const HierarchySpec h{{Level::kSentence}};
  std::vector<UtteranceStatsInput> corpus(1);
  corpus[0].raw = Matrix(1, 4);
  CHECK_THROWS_AS(ComputeCorpusStats(corpus, h), Error);
}

TEST_CASE("corpus stats match a naive two-pass oracle on 10 utterances") {
  std::mt19937 rng(6);
  const HierarchySpec h = HierarchySpec::Preset("hpc2");
  std::vector<UtteranceStatsInput> corpus;
  for (int i = 0; i < 10; ++i) {
    UtteranceStatsInput u;
    u.speaker_id = i % 3 == 0 ? "a" : "b";
    u.raw = RandomMatrix(rng, 3 + static_cast<int>(rng() % 5), 12);
    std::normal_distribution<double> f(5.0, 0.2);
    for (int k = 0; k < 40; ++k) u.voiced_log_f0.push_back(f(rng));
    u.phone_durations = {{"AH0", 0.05 + 0.01 * i}, {"M", 0.07}};
    corpus.push_back(std::move(u));
  }
  const CorpusStats stats = ComputeCorpusStats(corpus, h);

  // Oracle: pool all rows, two-pass mean/std, population convention.
  std::vector<std::vector<double>> columns(12);
  for (const auto &u : corpus)
    for (int r = 0; r < u.raw.rows; ++r)
      for (int c = 0; c < 12; ++c) columns[c].push_back(u.raw.At(r, c));
  for (int c = 0; c < 12; ++c) {
    double mean = 0.0;
    for (double v : columns[c]) mean += v;
    mean /= columns[c].size();
    double var = 0.0;
    for (double v : columns[c]) var += (v - mean) * (v - mean);
    var /= columns[c].size();
    CHECK(stats.mu[c] == doctest::Approx(mean).epsilon(1e-10));
    CHECK(stats.sigma[c] == doctest::Approx(std::sqrt(var)).epsilon(1e-10));
  }
  // Duration table: brute-force group-by average.
  double ah_sum = 0.0;
  int ah_n = 0;
  for (const auto &u : corpus)
    for (const auto &[label, d] : u.phone_durations)
      if (label == "AH0") {
        ah_sum += d;
        ++ah_n;
      }
  CHECK(stats.phone_mean_duration.at("AH0") ==
        doctest::Approx(ah_sum / ah_n).epsilon(1e-12));
}

TEST_CASE("corpus accumulation merges independently of the split point") {
  std::mt19937 rng(8);
  ColumnMoments all(4);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> row(4);
    std::normal_distribution<double> d(0.0, 1.0);
    for (auto &v : row) v = d(rng);
    rows.push_back(row);
    all.AddRow(row.data());
  }
  for (int split : {1, 10, 25, 49}) {
    ColumnMoments a(4), b(4);
    for (int i = 0; i < split; ++i) a.AddRow(rows[i].data());
    for (int i = split; i < 50; ++i) b.AddRow(rows[i].data());
    a.Merge(b);
    for (int c = 0; c < 4; ++c) {
      CHECK(a.mean[c] == doctest::Approx(all.mean[c]).epsilon(1e-10));
      CHECK(a.m2[c] == doctest::Approx(all.m2[c]).epsilon(1e-10));
    }
  }
}

TEST_CASE("extract (track level): monotone utterance collapses f0 measures") {
  const double median = std::log(190.0);
  const auto track = MakeTrack(0.7, [&](double) { return median; });
  const auto a = AlignFromPhones(
      {{"M", 0.1}, {"AA1", 0.1}, {"L", 0.1}, {"OW1", 0.1}}, 0.15);
  for (const char *preset : {"hpc0", "hpc1", "hpc2"}) {
    const HierarchySpec h = HierarchySpec::Preset(preset);
    const Matrix raw = ExtractRawHpcFromTrack(track, a, h, median);
    for (int r = 0; r < raw.rows; ++r) {
      for (int li = 0; li < h.NumLevels(); ++li) {
        CHECK(std::fabs(raw.At(r, 4 * li + 1)) <= 1e-12);  // delta
        CHECK(std::fabs(raw.At(r, 4 * li + 2)) <= 1e-12);  // f0
        CHECK(std::fabs(raw.At(r, 4 * li + 3)) <= 1e-12);  // slope
      }
    }
  }
}

TEST_CASE("extract: seen mode shifts h_f0 by the stored median difference") {
  const double utt_median = std::log(190.0);
  const double stored = std::log(120.0);
  const auto track = MakeTrack(0.6, [&](double) { return utt_median; });
  const auto a = AlignFromPhones({{"M", 0.15}, {"IY1", 0.15}, {"L", 0.15}});
  const HierarchySpec h = HierarchySpec::Preset("hpc0");
  const Matrix unseen = ExtractRawHpcFromTrack(track, a, h, utt_median);
  const Matrix seen = ExtractRawHpcFromTrack(track, a, h, stored);
  for (int r = 0; r < seen.rows; ++r) {
    CHECK(seen.At(r, 2) ==
          doctest::Approx(utt_median - stored).epsilon(1e-12));
    CHECK(unseen.At(r, 2) == doctest::Approx(0.0).epsilon(1e-12));
    // Residual word block f0 is a difference of equally-shifted values.
    CHECK(seen.At(r, 6) == doctest::Approx(unseen.At(r, 6)).epsilon(1e-12));
  }
}

TEST_CASE("shift invariance: +c on log-f0 leaves raw rows unchanged") {
  const auto contour = [](double t) {
    return std::log(160.0) + 0.2 * std::sin(2 * M_PI * t / 0.4);
  };
  const auto a = AlignFromPhones(
      {{"M", 0.11}, {"EH1", 0.13}, {"L", 0.09}, {"OW1", 0.17}}, 0.1);
  const HierarchySpec h = HierarchySpec::Preset("hpc1");
  const auto base_track = MakeTrack(0.75, contour);
  const double base_median = MedianVoicedLogF0(base_track);
  const Matrix base = ExtractRawHpcFromTrack(base_track, a, h, base_median);
  for (double c : {0.2, -0.2, 0.5, -0.5}) {
    const auto shifted_track =
        MakeTrack(0.75, [&](double t) { return contour(t) + c; });
    const double shifted_median = MedianVoicedLogF0(shifted_track);
    const Matrix shifted =
        ExtractRawHpcFromTrack(shifted_track, a, h, shifted_median);
    for (size_t i = 0; i < base.data.size(); ++i)
      CHECK(std::fabs(shifted.data[i] - base.data[i]) <= 1e-10);
  }
}

TEST_CASE("uniform time-scaling moves h_dur and h_slope_f0 only") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> b_dist(-0.4, 0.4);
  const HierarchySpec h = HierarchySpec::Preset("hpc1");
  for (int trial = 0; trial < 5; ++trial) {
    const double b = b_dist(rng);
    const double s = 2.0;
    const auto contour = [b](double t) { return std::log(150.0) + b * t; };
    const auto scaled_contour = [&](double t) { return contour(t / s); };

    std::vector<std::pair<std::string, double>> phones = {
        {"M", 0.10}, {"EH1", 0.14}, {"L", 0.08}, {"OW1", 0.12}};
    std::vector<std::pair<std::string, double>> scaled_phones;
    for (auto [label, d] : phones) scaled_phones.emplace_back(label, d * s);

    const auto a1 = AlignFromPhones(phones, 0.1);
    const auto a2 = AlignFromPhones(scaled_phones, 0.1 * s);
    const auto t1 = MakeTrack(0.60, contour);
    const auto t2 = MakeTrack(0.60 * s, scaled_contour);
    const Matrix m1 =
        ExtractRawHpcFromTrack(t1, a1, h, MedianVoicedLogF0(t1));
    const Matrix m2 =
        ExtractRawHpcFromTrack(t2, a2, h, MedianVoicedLogF0(t2));

    const auto abs1 = ReconstructAbsoluteBlocks(m1, h);
    const auto abs2 = ReconstructAbsoluteBlocks(m2, h);
    for (int li = 0; li < 3; ++li) {
      for (int r = 0; r < m1.rows; ++r) {
        // dur: + log s at every absolute level.
        CHECK(abs2[li].At(r, 0) ==
              doctest::Approx(abs1[li].At(r, 0) + std::log(s)).epsilon(1e-9));
        // delta and f0 unchanged (up to frame quantization).
        CHECK(abs2[li].At(r, 1) ==
              doctest::Approx(abs1[li].At(r, 1)).epsilon(0.02).scale(1.0));
        CHECK(std::fabs(abs2[li].At(r, 2) - abs1[li].At(r, 2)) < 5e-3);
        // slope scales by 1 / s.
        CHECK(abs2[li].At(r, 3) ==
              doctest::Approx(abs1[li].At(r, 3) / s).epsilon(1e-6).scale(0.01));
      }
    }
    // Residual dur groups are unchanged: the log s offsets cancel.
    for (int li = 1; li < 3; ++li)
      for (int r = 0; r < m1.rows; ++r)
        CHECK(m2.At(r, 4 * li) ==
              doctest::Approx(m1.At(r, 4 * li)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("piecewise constancy within level blocks") {
  std::mt19937 rng(12);
  const auto spec = hpctk::testing::RandomUtteranceSpec(rng, false);
  const auto fx = hpctk::testing::Synthesize(spec);
  const auto track = MakeTrack(fx.total_duration, fx.contour);
  const HierarchySpec h = HierarchySpec::Preset("hpc1");
  const Matrix raw =
      ExtractRawHpcFromTrack(track, fx.align, h, MedianVoicedLogF0(track));
  const auto content = fx.align.NonSilencePhones();
  for (int r = 1; r < raw.rows; ++r) {
    const auto &prev = fx.align.phones[content[r - 1]];
    const auto &cur = fx.align.phones[content[r]];
    for (int c = 0; c < 4; ++c)
      CHECK(raw.At(r, c) == raw.At(0, c));  // sentence block constant
    if (prev.word_index == cur.word_index) {
      for (int c = 4; c < 8; ++c) CHECK(raw.At(r, c) == raw.At(r - 1, c));
    }
    if (prev.syllable_index == cur.syllable_index) {
      for (int c = 8; c < 12; ++c) CHECK(raw.At(r, c) == raw.At(r - 1, c));
    }
  }
}

TEST_CASE("normalized training corpus has column mean 0 and std 1/3") {
  std::mt19937 rng(13);
  const HierarchySpec h = HierarchySpec::Preset("hpc0");
  std::vector<UtteranceStatsInput> corpus;
  for (int i = 0; i < 8; ++i) {
    UtteranceStatsInput u;
    u.speaker_id = "s" + std::to_string(i % 2);
    u.raw = RandomMatrix(rng, 4 + static_cast<int>(rng() % 4), 8);
    u.voiced_log_f0 = {5.0, 5.1 + 0.01 * i};
    corpus.push_back(std::move(u));
  }
  const CorpusStats stats = ComputeCorpusStats(corpus, h);

  ColumnMoments normalized(8);
  for (const auto &u : corpus) {
    const HpcMatrix n = Normalize(u.raw, h, stats);
    for (int r = 0; r < n.values.rows; ++r)
      normalized.AddRow(&n.values.data[static_cast<size_t>(r) * 8]);
  }
  for (int c = 0; c < 8; ++c) {
    CHECK(std::fabs(normalized.mean[c]) < 1e-10);
    const double sd =
        std::sqrt(normalized.m2[c] / static_cast<double>(normalized.count));
    CHECK(std::fabs(sd - 1.0 / 3.0) < 1e-10);
  }
}

TEST_CASE("stats JSON round-trip is exact") {
  std::mt19937 rng(14);
  const HierarchySpec h = HierarchySpec::Preset("hpc1");
  std::vector<UtteranceStatsInput> corpus;
  for (int i = 0; i < 4; ++i) {
    UtteranceStatsInput u;
    u.speaker_id = i % 2 ? "alice" : "bob";
    u.raw = RandomMatrix(rng, 5, 12);
    u.voiced_log_f0 = {4.7, 4.9, 5.3 + i * 0.01};
    u.phone_durations = {{"M", 0.08}, {"AH0", 0.1}};
    corpus.push_back(std::move(u));
  }
  const CorpusStats stats = ComputeCorpusStats(corpus, h);
  const CorpusStats back = CorpusStatsFromJson(CorpusStatsToJson(stats));
  CHECK(back.hierarchy == stats.hierarchy);
  for (int c = 0; c < 12; ++c) {
    CHECK(back.mu[c] == stats.mu[c]);        // bit-exact round-trip
    CHECK(back.sigma[c] == stats.sigma[c]);
  }
  CHECK(back.speaker_median_logf0 == stats.speaker_median_logf0);
  CHECK(back.phone_mean_duration == stats.phone_mean_duration);
  CHECK(back.global_mean_duration == stats.global_mean_duration);
}

TEST_CASE("matrix CSV: header names follow <level>_<measure> with res suffix") {
  HpcMatrix m;
  m.hierarchy = HierarchySpec::Preset("hpc2");
  m.normalized = false;
  m.values = Matrix(1, 12);
  const std::string csv = HpcMatrixToCsv(m);
  CHECK(csv.find("# unnormalized") == 0);
  CHECK(csv.find("sentence_dur,sentence_df0,sentence_f0,sentence_slopef0,"
                 "word_durres,word_df0res,word_f0res,word_slopef0res,"
                 "phone_durres,phone_df0res,phone_f0res,phone_slopef0res") !=
        std::string::npos);
  HpcMatrix n = m;
  n.normalized = true;
  CHECK(HpcMatrixToJson(n).find("\"normalized\": true") != std::string::npos);
  CHECK(HpcMatrixToCsv(n).find("# unnormalized") == std::string::npos);
}

TEST_CASE("hierarchy presets and validation") {
  CHECK(HierarchySpec::Preset("hpc0").levels ==
        std::vector<Level>{Level::kSentence, Level::kWord});
  CHECK(HierarchySpec::Preset("hpc1").levels ==
        std::vector<Level>{Level::kSentence, Level::kWord, Level::kSyllable});
  CHECK(HierarchySpec::Preset("hpc2").levels ==
        std::vector<Level>{Level::kSentence, Level::kWord, Level::kPhone});
  CHECK_THROWS_AS(HierarchySpec::Preset("hpc9"), Error);
  CHECK_THROWS_AS(ValidateHierarchy({{Level::kWord}}), Error);
  CHECK_THROWS_AS(ValidateHierarchy({{Level::kSentence, Level::kPhone,
                                      Level::kWord}}),
                  Error);
  CHECK_NOTHROW(ValidateHierarchy({{Level::kSentence}}));
}
