// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace reclink {
namespace {

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* instance = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || instance == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *instance;
}

// Length of the UTF-8 sequence starting at text[i], or 1 for an invalid lead
// or truncated continuation.
std::size_t sequence_length(std::string_view text, std::size_t i) {
  const auto lead = static_cast<unsigned char>(text[i]);
  std::size_t len = 1;
  if (lead >= 0xF0 && lead <= 0xF4) {
    len = 4;
  } else if (lead >= 0xE0) {
    len = lead <= 0xEF ? 3 : 1;
  } else if (lead >= 0xC2) {
    len = 2;
  }
  if (len == 1 || i + len > text.size()) return 1;
  for (std::size_t j = 1; j < len; ++j) {
    if ((static_cast<unsigned char>(text[i + j]) & 0xC0) != 0x80) return 1;
  }
  return len;
}

}  // namespace

std::string normalize_text(std::string_view raw) {
  const icu::Normalizer2& normalizer = nfc();
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  text = normalizer.normalize(text, status);

  // Folding a composed form can leave a sequence that composes differently;
  // iterate to a fixpoint so that the whole function is idempotent.
  for (int round = 0; round < 4; ++round) {
    icu::UnicodeString folded(text);
    folded.foldCase(U_FOLD_CASE_DEFAULT);
    folded = normalizer.normalize(folded, status);
    if (folded == text) break;
    text = std::move(folded);
  }
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU normalization failed");
  }

  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (int32_t i = 0; i < text.length(); i = text.moveIndex32(i, 1)) {
    const UChar32 c = text.char32At(i);
    if (u_isUWhiteSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !collapsed.isEmpty()) collapsed.append(static_cast<UChar>(0x20));
    pending_space = false;
    collapsed.append(c);
  }

  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

std::vector<std::string_view> utf8_scalars(std::string_view text) {
  std::vector<std::string_view> out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t len = sequence_length(text, i);
    out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<char32_t> utf8_decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  for (std::string_view unit : utf8_scalars(text)) {
    const auto b0 = static_cast<unsigned char>(unit[0]);
    char32_t cp = b0;
    switch (unit.size()) {
      case 2: cp = (b0 & 0x1F); break;
      case 3: cp = (b0 & 0x0F); break;
      case 4: cp = (b0 & 0x07); break;
      default: break;
    }
    for (std::size_t j = 1; j < unit.size(); ++j) {
      cp = (cp << 6) | (static_cast<unsigned char>(unit[j]) & 0x3F);
    }
    out.push_back(cp);
  }
  return out;
}

std::vector<std::string> extract_ngrams(std::string_view text, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) {
    throw std::invalid_argument("extract_ngrams requires 1 <= n_min <= n_max");
  }
  const std::vector<std::string_view> scalars = utf8_scalars(text);
  const auto len = static_cast<int>(scalars.size());
  std::vector<std::string> grams;
  if (len == 0) return grams;
  if (len < n_min) {
    grams.emplace_back(text);
    return grams;
  }
  for (int n = n_min; n <= n_max && n <= len; ++n) {
    for (int start = 0; start + n <= len; ++start) {
      const char* begin = scalars[start].data();
      const char* end = scalars[start + n - 1].data() + scalars[start + n - 1].size();
      grams.emplace_back(begin, static_cast<std::size_t>(end - begin));
    }
  }
  return grams;
}

}  // namespace reclink
