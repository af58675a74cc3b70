// hpctk/waveform.cc

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

#include "hpctk/waveform.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hpctk/error.h"

namespace hpctk {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;

uint32_t ReadU32(const std::string &b, size_t pos) {
  return static_cast<uint32_t>(static_cast<uint8_t>(b[pos])) |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 1])) << 8 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 2])) << 16 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 3])) << 24;
}

uint16_t ReadU16(const std::string &b, size_t pos) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[pos]) |
                               static_cast<uint8_t>(b[pos + 1]) << 8);
}

void PutU32(std::string *b, uint32_t v) {
  b->push_back(static_cast<char>(v & 0xff));
  b->push_back(static_cast<char>((v >> 8) & 0xff));
  b->push_back(static_cast<char>((v >> 16) & 0xff));
  b->push_back(static_cast<char>((v >> 24) & 0xff));
}

void PutU16(std::string *b, uint16_t v) {
  b->push_back(static_cast<char>(v & 0xff));
  b->push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

void ValidateWaveform(const Waveform &w) {
  if (w.sample_rate < 8000)
    throw Error("waveform sample rate must be >= 8000 Hz, got " +
                std::to_string(w.sample_rate));
  for (float s : w.samples) {
    if (!std::isfinite(s)) throw Error("waveform contains non-finite samples");
  }
}

Waveform ParseWav(const std::string &bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0)
    throw Error("malformed WAV header: not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t data_pos = 0, data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const uint32_t chunk_size = ReadU32(bytes, pos + 4);
    pos += 8;
    if (pos + chunk_size > bytes.size())
      throw Error("malformed WAV header: chunk '" + id +
                  "' extends past end of file");
    if (id == "fmt ") {
      if (chunk_size < 16) throw Error("malformed WAV header: short fmt chunk");
      format = ReadU16(bytes, pos);
      channels = ReadU16(bytes, pos + 2);
      sample_rate = ReadU32(bytes, pos + 4);
      bits = ReadU16(bytes, pos + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_pos = pos;
      data_size = chunk_size;
    }
    pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }
  if (!have_fmt) throw Error("malformed WAV header: missing fmt chunk");
  if (data_pos == 0 && data_size == 0)
    throw Error("malformed WAV header: missing data chunk");
  if (channels != 1)
    throw Error("unsupported channel count: " + std::to_string(channels));
  if (format == kFormatPcm && bits != 16)
    throw Error("unsupported codec: PCM with " + std::to_string(bits) +
                " bits (only 16-bit PCM and 32-bit float are supported)");
  if (format == kFormatIeeeFloat && bits != 32)
    throw Error("unsupported codec: IEEE float with " + std::to_string(bits) +
                " bits");
  if (format != kFormatPcm && format != kFormatIeeeFloat)
    throw Error("unsupported codec: wFormatTag=" + std::to_string(format));

  Waveform w;
  w.sample_rate = static_cast<int>(sample_rate);
  if (format == kFormatPcm) {
    const size_t n = data_size / 2;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const int16_t v = static_cast<int16_t>(ReadU16(bytes, data_pos + 2 * i));
      w.samples[i] = static_cast<float>(v) / 32768.0f;
    }
  } else {
    const size_t n = data_size / 4;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = ReadU32(bytes, data_pos + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      if (!std::isfinite(f))
        throw Error("waveform contains non-finite samples");
      w.samples[i] = std::clamp(f, -1.0f, 1.0f);
    }
  }
  ValidateWaveform(w);
  return w;
}

Waveform LoadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open WAV file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ParseWav(buf.str());
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

std::string EncodeWav(const Waveform &w) {
  const uint32_t n = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_size = n * 2;
  std::string b;
  b.reserve(44 + data_size);
  b += "RIFF";
  PutU32(&b, 36 + data_size);
  b += "WAVEfmt ";
  PutU32(&b, 16);
  PutU16(&b, kFormatPcm);
  PutU16(&b, 1);
  PutU32(&b, static_cast<uint32_t>(w.sample_rate));
  PutU32(&b, static_cast<uint32_t>(w.sample_rate) * 2);  // byte rate
  PutU16(&b, 2);                                         // block align
  PutU16(&b, 16);
  b += "data";
  PutU32(&b, data_size);
  for (uint32_t i = 0; i < n; ++i) {
    const double x = std::clamp<double>(w.samples[i], -1.0, 1.0);
    // Inverse of the 1/32768 decode scaling; keeps re-encoding idempotent.
    const int v = std::clamp<int>(static_cast<int>(std::lround(x * 32768.0)),
                                  -32768, 32767);
    PutU16(&b, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  return b;
}

void SaveWav(const Waveform &w, const std::string &path) {
  const std::string bytes = EncodeWav(w);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed to write WAV file: " + path);
}

}  // namespace hpctk
