// hpctk/test_waveform.cc

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

#include <cstring>

#include "hpctk/error.h"
#include "hpctk/waveform.h"

using namespace hpctk;

namespace {

// Hand-built 16-bit PCM WAV bytes, independent of EncodeWav.
std::string PcmWavBytes(int sample_rate, int channels,
                        const std::vector<int16_t> &samples) {
  auto u32 = [](uint32_t v) {
    std::string s(4, '\0');
    for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return s;
  };
  auto u16 = [](uint16_t v) {
    std::string s(2, '\0');
    s[0] = static_cast<char>(v & 0xff);
    s[1] = static_cast<char>((v >> 8) & 0xff);
    return s;
  };
  std::string data;
  for (int16_t s : samples) data += u16(static_cast<uint16_t>(s));
  std::string b = "RIFF" + u32(36 + data.size()) + "WAVE";
  b += "fmt " + u32(16) + u16(1) + u16(channels) + u32(sample_rate) +
       u32(sample_rate * channels * 2) + u16(channels * 2) + u16(16);
  b += "data" + u32(data.size()) + data;
  return b;
}

}  // namespace

TEST_CASE("one second of silence decodes to zero samples at the rate") {
  std::vector<int16_t> silence(22050, 0);
  const Waveform w = ParseWav(PcmWavBytes(22050, 1, silence));
  CHECK(w.sample_rate == 22050);
  CHECK(w.samples.size() == 22050);
  for (float s : w.samples) CHECK(s == 0.0f);
}

TEST_CASE("16-bit full scale maps to 32767/32768") {
  const Waveform w = ParseWav(PcmWavBytes(16000, 1, {32767, -32768, 0}));
  CHECK(w.samples[0] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-9));
  CHECK(w.samples[1] == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(w.samples[2] == 0.0f);
}

TEST_CASE("stereo input is rejected, not downmixed") {
  bool threw = false;
  try {
    ParseWav(PcmWavBytes(16000, 2, {0, 0, 0, 0}));
  } catch (const Error &e) {
    threw = true;
    CHECK(std::string(e.what()).find("channel count") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("malformed and truncated headers are rejected") {
  CHECK_THROWS_AS(ParseWav("not a wav"), Error);
  std::string bytes = PcmWavBytes(16000, 1, {1, 2, 3, 4});
  bytes.resize(bytes.size() - 3);  // truncate inside the data chunk
  CHECK_THROWS_AS(ParseWav(bytes), Error);
  // 8-bit PCM is an unsupported codec.
  std::string eight = PcmWavBytes(16000, 1, {0});
  eight[34] = 8;
  CHECK_THROWS_AS(ParseWav(eight), Error);
}

TEST_CASE("sample rates below 8 kHz violate the waveform contract") {
  CHECK_THROWS_AS(ParseWav(PcmWavBytes(4000, 1, {0, 0})), Error);
}

TEST_CASE("float WAV decodes and clamps to [-1, 1]") {
  auto u32 = [](uint32_t v) {
    std::string s(4, '\0');
    for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    return s;
  };
  auto u16 = [](uint16_t v) {
    std::string s(2, '\0');
    s[0] = static_cast<char>(v & 0xff);
    s[1] = static_cast<char>((v >> 8) & 0xff);
    return s;
  };
  const float values[3] = {0.5f, -0.25f, 1.5f};
  std::string data(12, '\0');
  std::memcpy(data.data(), values, 12);
  std::string b = "RIFF" + u32(36 + 12) + "WAVE";
  b += "fmt " + u32(16) + u16(3) + u16(1) + u32(16000) + u32(16000 * 4) +
       u16(4) + u16(32);
  b += "data" + u32(12) + data;
  const Waveform w = ParseWav(b);
  CHECK(w.samples[0] == 0.5f);
  CHECK(w.samples[1] == -0.25f);
  CHECK(w.samples[2] == 1.0f);
}

TEST_CASE("encode/parse round-trip preserves 16-bit content exactly") {
  Waveform w;
  w.sample_rate = 16000;
  for (int i = 0; i < 256; ++i)
    w.samples.push_back(static_cast<float>(std::sin(i * 0.1) * 0.8));
  const Waveform back = ParseWav(EncodeWav(w));
  REQUIRE(back.samples.size() == w.samples.size());
  const Waveform again = ParseWav(EncodeWav(back));
  // After one quantization pass the samples are on the 16-bit grid and
  // survive further round-trips bit-exactly.
  for (size_t i = 0; i < back.samples.size(); ++i) {
    CHECK(back.samples[i] == again.samples[i]);
    CHECK(back.samples[i] == doctest::Approx(w.samples[i]).epsilon(1e-3));
  }
}
