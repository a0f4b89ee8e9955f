#pragma once

// Token-overlap similarities: the built-in tokenizer plus Jaccard, Rouge-1
// and Rouge-L F-measures. The metric templates accept any forward range of
// totally ordered tokens, so callers may pass strings or interned ids.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

namespace conhyp {

using Token = std::string;
using TokenSequence = std::vector<Token>;

namespace detail {

// Decodes one UTF-8 code point starting at text[pos] and advances pos.
// Malformed sequences decode to U+FFFD and consume a single byte.
inline char32_t decode_utf8(std::string_view text, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  const unsigned char lead = byte(pos);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  std::size_t extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + extra >= text.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (std::size_t i = 1; i <= extra; ++i) {
    if ((byte(pos + i) & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (byte(pos + i) & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

inline void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_space(char32_t c) {
  return c == U' ' || (c >= U'\t' && c <= U'\r') || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

// Sentence punctuation, brackets and quotes. Symbols such as * + - = / < >
// are deliberately not listed: they carry meaning in code and SQL.
inline bool is_strippable_punct(char32_t c) {
  switch (c) {
    case U'!': case U'"': case U'\'': case U'(': case U')': case U',': case U'.':
    case U':': case U';': case U'?': case U'[': case U']': case U'{': case U'}':
    case U'`': case 0xA1: case 0xAB: case 0xBB: case 0xBF:
      return true;
    default:
      break;
  }
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         c == 0xFF01 || c == 0xFF0C || c == 0xFF0E || c == 0xFF1A || c == 0xFF1B ||
         c == 0xFF1F;
}

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
inline char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 0x20;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130) return U'i';
    if (c == 0x178) return 0xFF;
    if ((c >= 0x100 && c <= 0x12F) || (c >= 0x132 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) {
      return (c % 2 == 0) ? c + 1 : c;
    }
    if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) {
      return (c % 2 == 1) ? c + 1 : c;
    }
    return c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

inline double f_measure(std::size_t overlap, std::size_t len_a, std::size_t len_b) {
  if (len_a == 0 && len_b == 0) return 1.0;
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(len_a);
  const double recall = static_cast<double>(overlap) / static_cast<double>(len_b);
  return 2.0 * precision * recall / (precision + recall);
}

template <std::ranges::forward_range R>
auto sorted_copy(const R& r) {
  std::vector<std::ranges::range_value_t<R>> out(std::ranges::begin(r), std::ranges::end(r));
  std::ranges::sort(out);
  return out;
}

}  // namespace detail

/// Splits on Unicode whitespace, lowercases, and strips leading/trailing
/// sentence punctuation from each piece. Pieces that become empty are dropped.
inline TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  std::vector<char32_t> piece;
  const auto flush = [&] {
    std::size_t begin = 0;
    std::size_t end = piece.size();
    while (begin < end && detail::is_strippable_punct(piece[begin])) ++begin;
    while (end > begin && detail::is_strippable_punct(piece[end - 1])) --end;
    if (begin < end) {
      std::string token;
      for (std::size_t i = begin; i < end; ++i) detail::encode_utf8(detail::to_lower(piece[i]), token);
      tokens.push_back(std::move(token));
    }
    piece.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = detail::decode_utf8(text, pos);
    if (detail::is_space(cp)) {
      flush();
    } else {
      piece.push_back(cp);
    }
  }
  flush();
  return tokens;
}

/// |set(a) & set(b)| / |set(a) | set(b)|; 1 when both are empty.
template <std::ranges::forward_range A, std::ranges::forward_range B>
double jaccard(const A& a, const B& b) {
  auto sa = detail::sorted_copy(a);
  auto sb = detail::sorted_copy(b);
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (auto ia = sa.begin(), ib = sb.begin(); ia != sa.end() && ib != sb.end();) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

/// Rouge-1 F1 over clipped unigram counts.
template <std::ranges::forward_range A, std::ranges::forward_range B>
double rouge1_f(const A& a, const B& b) {
  const auto sa = detail::sorted_copy(a);
  const auto sb = detail::sorted_copy(b);
  std::size_t overlap = 0;
  for (auto ia = sa.begin(), ib = sb.begin(); ia != sa.end() && ib != sb.end();) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++overlap;
      ++ia;
      ++ib;
    }
  }
  return detail::f_measure(overlap, sa.size(), sb.size());
}

/// Length of the longest common subsequence, O(|a|·|b|) time, O(|b|) space.
template <std::ranges::forward_range A, std::ranges::forward_range B>
std::size_t lcs_length(const A& a, const B& b) {
  const std::vector<std::ranges::range_value_t<B>> vb(std::ranges::begin(b), std::ranges::end(b));
  std::vector<std::size_t> prev(vb.size() + 1, 0);
  std::vector<std::size_t> cur(vb.size() + 1, 0);
  for (const auto& x : a) {
    for (std::size_t k = 0; k < vb.size(); ++k) {
      cur[k + 1] = (x == vb[k]) ? prev[k] + 1 : std::max(prev[k + 1], cur[k]);
    }
    std::swap(prev, cur);
  }
  return prev.back();
}

/// Rouge-L F1 from the LCS of the two token sequences.
template <std::ranges::forward_range A, std::ranges::forward_range B>
double rouge_l_f(const A& a, const B& b) {
  const auto len_a = static_cast<std::size_t>(std::ranges::distance(a));
  const auto len_b = static_cast<std::size_t>(std::ranges::distance(b));
  return detail::f_measure(lcs_length(a, b), len_a, len_b);
}

}  // namespace conhyp
