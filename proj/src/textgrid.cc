// hpctk/textgrid.cc

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

#include "hpctk/textgrid.h"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hpctk/error.h"

namespace hpctk {

namespace {

// Praat text files come in a long format ("intervals [1]: / xmin = 0 ...")
// and a short format holding the same values without decoration.  Both carry
// the identical sequence of numbers, quoted strings and <flags>, so the
// parser tokenizes the stream and skips bare decoration words when looking
// for the next value.

enum class TokenKind { kNumber, kString, kFlag, kWord };

struct Token {
  TokenKind kind;
  std::string text;
  double number = 0.0;
};

void AppendUtf8(std::string *out, uint32_t cp) {
  if (cp < 0x80) {
    out->push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out->push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out->push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out->push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

// Normalizes the raw bytes to UTF-8 using the BOM, decoding UTF-16 when
// present.
std::string DecodeToUtf8(std::string_view bytes) {
  const auto u8 = [&](size_t i) { return static_cast<uint8_t>(bytes[i]); };
  if (bytes.size() >= 3 && u8(0) == 0xef && u8(1) == 0xbb && u8(2) == 0xbf)
    return std::string(bytes.substr(3));
  bool le = false, be = false;
  if (bytes.size() >= 2 && u8(0) == 0xff && u8(1) == 0xfe) le = true;
  if (bytes.size() >= 2 && u8(0) == 0xfe && u8(1) == 0xff) be = true;
  if (!le && !be) return std::string(bytes);

  if (bytes.size() % 2 != 0)
    throw Error("malformed TextGrid: odd byte count in UTF-16 data");
  std::string out;
  out.reserve(bytes.size() / 2);
  size_t i = 2;
  while (i + 1 < bytes.size()) {
    uint32_t unit = le ? (u8(i) | (u8(i + 1) << 8)) : ((u8(i) << 8) | u8(i + 1));
    i += 2;
    if (unit >= 0xd800 && unit <= 0xdbff) {
      if (i + 1 >= bytes.size())
        throw Error("malformed TextGrid: truncated UTF-16 surrogate pair");
      uint32_t lo =
          le ? (u8(i) | (u8(i + 1) << 8)) : ((u8(i) << 8) | u8(i + 1));
      if (lo < 0xdc00 || lo > 0xdfff)
        throw Error("malformed TextGrid: invalid UTF-16 surrogate pair");
      i += 2;
      unit = 0x10000 + ((unit - 0xd800) << 10) + (lo - 0xdc00);
    }
    AppendUtf8(&out, unit);
  }
  return out;
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string text) : text_(std::move(text)) {}

  // Returns false at end of input.
  bool Next(Token *tok) {
    while (pos_ < text_.size() && IsSpace(text_[pos_])) ++pos_;
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    if (c == '"') {
      ++pos_;
      tok->kind = TokenKind::kString;
      tok->text.clear();
      while (true) {
        if (pos_ >= text_.size())
          throw Error("malformed TextGrid: unterminated string");
        if (text_[pos_] == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            tok->text.push_back('"');  // doubled quote escape
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        tok->text.push_back(text_[pos_++]);
      }
      return true;
    }
    if (c == '<') {
      size_t end = text_.find('>', pos_);
      if (end == std::string::npos)
        throw Error("malformed TextGrid: unterminated <flag>");
      tok->kind = TokenKind::kFlag;
      tok->text = text_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return true;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
        c == '.') {
      size_t start = pos_;
      while (pos_ < text_.size() && !IsSpace(text_[pos_])) ++pos_;
      const std::string word = text_.substr(start, pos_ - start);
      char *endp = nullptr;
      const double v = std::strtod(word.c_str(), &endp);
      if (endp == word.c_str() || *endp != '\0') {
        tok->kind = TokenKind::kWord;
        tok->text = word;
        return true;
      }
      tok->kind = TokenKind::kNumber;
      tok->text = word;
      tok->number = v;
      return true;
    }
    size_t start = pos_;
    while (pos_ < text_.size() && !IsSpace(text_[pos_])) ++pos_;
    tok->kind = TokenKind::kWord;
    tok->text = text_.substr(start, pos_ - start);
    return true;
  }

 private:
  static bool IsSpace(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
  }

  std::string text_;
  size_t pos_ = 0;
};

class ValueReader {
 public:
  explicit ValueReader(std::string text) : tok_(std::move(text)) {}

  double NextNumber(const char *what) {
    Token t;
    while (tok_.Next(&t)) {
      if (t.kind == TokenKind::kNumber) return t.number;
      if (t.kind == TokenKind::kWord) continue;  // long-format decoration
      throw Error(std::string("malformed TextGrid: expected ") + what +
                  ", found '" + t.text + "'");
    }
    throw Error(std::string("truncated TextGrid: missing ") + what);
  }

  int NextCount(const char *what) {
    const double v = NextNumber(what);
    if (v < 0 || v != std::floor(v))
      throw Error(std::string("malformed TextGrid: bad ") + what);
    return static_cast<int>(v);
  }

  std::string NextString(const char *what) {
    Token t;
    while (tok_.Next(&t)) {
      if (t.kind == TokenKind::kString) return t.text;
      if (t.kind == TokenKind::kWord) continue;
      throw Error(std::string("malformed TextGrid: expected ") + what +
                  ", found '" + t.text + "'");
    }
    throw Error(std::string("truncated TextGrid: missing ") + what);
  }

  std::string NextFlag(const char *what) {
    Token t;
    while (tok_.Next(&t)) {
      if (t.kind == TokenKind::kFlag) return t.text;
      if (t.kind == TokenKind::kWord) continue;
      throw Error(std::string("malformed TextGrid: expected ") + what +
                  ", found '" + t.text + "'");
    }
    throw Error(std::string("truncated TextGrid: missing ") + what);
  }

  // True if any number/string/flag token remains (declared counts smaller
  // than the content actually present leave values behind).
  bool HasTrailingValues() {
    Token t;
    while (tok_.Next(&t)) {
      if (t.kind != TokenKind::kWord) return true;
    }
    return false;
  }

 private:
  Tokenizer tok_;
};

}  // namespace

const TextGridTier *TextGrid::FindTier(std::string_view name) const {
  for (const auto &[tier_name, tier] : tiers)
    if (tier_name == name) return &tier;
  return nullptr;
}

TextGrid ParseTextGrid(std::string_view bytes) {
  ValueReader r(DecodeToUtf8(bytes));

  const std::string file_type = r.NextString("file type");
  if (file_type != "ooTextFile")
    throw Error("malformed TextGrid: file type is '" + file_type +
                "', expected 'ooTextFile'");
  const std::string object_class = r.NextString("object class");
  if (object_class != "TextGrid")
    throw Error("malformed TextGrid: object class is '" + object_class +
                "', expected 'TextGrid'");

  TextGrid tg;
  tg.xmin = r.NextNumber("xmin");
  tg.xmax = r.NextNumber("xmax");

  const std::string flag = r.NextFlag("tiers? flag");
  if (flag == "<absent>") return tg;
  if (flag != "<exists>")
    throw Error("malformed TextGrid: unexpected flag '" + flag + "'");

  const int num_tiers = r.NextCount("tier count");
  for (int i = 0; i < num_tiers; ++i) {
    const std::string tier_class = r.NextString("tier class");
    const std::string name = r.NextString("tier name");
    r.NextNumber("tier xmin");
    r.NextNumber("tier xmax");
    const int n = r.NextCount("interval count");
    if (tier_class == "IntervalTier") {
      TextGridTier tier;
      tier.reserve(n);
      for (int k = 0; k < n; ++k) {
        TextGridInterval iv;
        iv.xmin = r.NextNumber("interval xmin");
        iv.xmax = r.NextNumber("interval xmax");
        iv.text = r.NextString("interval text");
        if (iv.xmax <= iv.xmin)
          throw Error("malformed TextGrid: tier '" + name + "' interval " +
                      std::to_string(k + 1) + " has xmax <= xmin");
        tier.push_back(std::move(iv));
      }
      tg.tiers.emplace_back(name, std::move(tier));
    } else if (tier_class == "TextTier") {
      // Point tier: skip its points.
      for (int k = 0; k < n; ++k) {
        r.NextNumber("point time");
        r.NextString("point mark");
      }
    } else {
      throw Error("malformed TextGrid: unsupported tier class '" + tier_class +
                  "'");
    }
  }
  if (r.HasTrailingValues())
    throw Error("malformed TextGrid: content after the declared tiers "
                "(declared counts do not match the intervals present)");
  return tg;
}

TextGrid LoadTextGrid(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open TextGrid file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ParseTextGrid(buf.str());
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace hpctk
