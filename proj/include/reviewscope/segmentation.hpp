/*
 * Copyright 2026 The reviewscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "reviewscope/error.hpp"
#include "reviewscope/io.hpp"
#include "reviewscope/review_ingest.hpp"

namespace reviewscope {

/// A single-concern fragment of a review.
struct AtomicSentence {
  std::string review_id;
  std::size_t seq = 0;
  std::string text;
  Category category = Category::Unlabeled;
  std::optional<Timestamp> timestamp;
};

/// Auxiliaries, contractions and verbs common in app reviews. Inflected
/// forms are recognized morphologically from these bases.
inline const std::vector<std::string>& default_verb_lexicon() {
  static const std::vector<std::string> verbs{
      "be", "am", "is", "are", "was", "were", "been", "being", "have", "has", "had", "having",
      "do", "does", "did", "done", "can", "could", "will", "would", "shall", "should", "may",
      "might", "must", "i'd", "i'm", "i've", "i'll", "it's", "that's", "there's", "don't",
      "doesn't", "didn't", "can't", "cannot", "won't", "wouldn't", "isn't", "aren't", "wasn't",
      "weren't", "haven't", "hasn't", "couldn't", "shouldn't", "let's", "you're", "we're",
      "they're", "he's", "she's", "add", "allow", "ask", "become", "begin", "break", "broke",
      "bring", "buy", "call", "change", "check", "close", "come", "came", "connect", "crash",
      "delete", "disable", "download", "drain", "enable", "fail", "feel", "felt", "find",
      "found", "fix", "force", "freeze", "froze", "frozen", "get", "got", "give", "gave", "go",
      "went", "gone", "hang", "hate", "help", "hope", "improve", "install", "keep", "kept",
      "know", "knew", "lack", "launch", "leave", "left", "let", "like", "load", "lock", "look",
      "lose", "lost", "love", "make", "made", "miss", "need", "open", "pay", "paid", "play",
      "prefer", "put", "receive", "reload", "remove", "restart", "run", "ran", "save", "say",
      "said", "see", "saw", "seem", "send", "sent", "set", "show", "start", "stop", "stick",
      "stuck", "suggest", "support", "sync", "take", "took", "tell", "told", "think", "thought",
      "try", "turn", "uninstall", "unlock", "update", "use", "wake", "want", "wish", "work",
      "write", "wrote"};
  return verbs;
}

struct SegmenterConfig {
  std::vector<std::string> copulative{"and", "as well as", "moreover", "plus"};
  std::vector<std::string> adversative{"but", "yet", "however"};
  std::unordered_set<std::string> verbs{default_verb_lexicon().begin(),
                                        default_verb_lexicon().end()};
};

/// One verb per line; '#' starts a comment line.
inline std::unordered_set<std::string> load_verb_lexicon(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("verb lexicon not found: " + path.string());
  std::unordered_set<std::string> verbs;
  for (const auto& line : io::read_lines(path)) {
    auto word = io::trim(line);
    if (word.empty() || word.front() == '#') continue;
    verbs.insert(detail::ascii_lower(word));
  }
  return verbs;
}

/// Splits raw review text on sentence terminators (. ! ? ;). Runs of two or
/// more dots are ellipses and never end a sentence, nor does a dot between
/// digits ("v2.5").
inline std::vector<std::string> split_sentences(std::string_view text) {
  auto is_terminator = [](char c) { return c == '.' || c == '!' || c == '?' || c == ';'; };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };

  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto t = io::trim(current);
    if (!t.empty()) out.emplace_back(t);
    current.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '.') {
      std::size_t run = i;
      while (run < text.size() && text[run] == '.') ++run;
      if (run - i >= 2) {
        current.append(text.substr(i, run - i));
        i = run;
        continue;
      }
      if (i > 0 && i + 1 < text.size() && is_digit(text[i - 1]) && is_digit(text[i + 1])) {
        current.push_back(c);
        ++i;
        continue;
      }
    }
    if (is_terminator(c)) {
      // Swallow clusters like "?!" or "!!!" as one boundary, unless the next
      // dots form an ellipsis that belongs to the following fragment.
      while (i < text.size() && is_terminator(text[i]) &&
             !(text[i] == '.' && i + 1 < text.size() && text[i + 1] == '.')) {
        ++i;
      }
      flush();
      continue;
    }
    current.push_back(c);
    ++i;
  }
  flush();
  return out;
}

inline std::vector<std::string> split_sentences(const Review& review) {
  return split_sentences(review.text);
}

namespace detail {

struct Tok {
  std::string raw;
  std::string key;  // lowercase, edge punctuation stripped
};

inline std::string token_key(std::string_view raw) {
  auto s = fold_apostrophes(ascii_lower(raw));
  auto alnum = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) != 0; };
  std::size_t b = 0, e = s.size();
  while (b < e && !alnum(s[b])) ++b;
  while (e > b && !alnum(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline std::vector<Tok> tokenize_ws(std::string_view text) {
  std::vector<Tok> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      auto raw = std::string(text.substr(i, j - i));
      toks.push_back({raw, token_key(raw)});
    }
    i = j;
  }
  return toks;
}

inline std::string join(const std::vector<Tok>& toks) {
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out.push_back(' ');
    out += t.raw;
  }
  return out;
}

inline std::vector<std::vector<std::string>> phrase_words(const std::vector<std::string>& list) {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : list) {
    std::vector<std::string> words;
    for (const auto& t : tokenize_ws(p)) {
      if (!t.key.empty()) words.push_back(t.key);
    }
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

// Length in tokens of the longest listed phrase starting at `at`, or 0.
inline std::size_t match_phrase(const std::vector<Tok>& toks, std::size_t at,
                                const std::vector<std::vector<std::string>>& phrases) {
  std::size_t best = 0;
  for (const auto& words : phrases) {
    if (at + words.size() > toks.size() || words.size() <= best) continue;
    bool ok = true;
    for (std::size_t k = 0; k < words.size() && ok; ++k) ok = toks[at + k].key == words[k];
    if (ok) best = words.size();
  }
  return best;
}

inline bool is_punct_only(const Tok& t) { return t.key.empty(); }

inline const std::unordered_set<std::string>& determiners() {
  static const std::unordered_set<std::string> d{"a",     "an",   "the",   "my",    "your",
                                                 "his",   "her",  "its",   "our",   "their",
                                                 "some",  "any",  "no",    "every", "each",
                                                 "another", "these", "those"};
  return d;
}

inline const std::unordered_set<std::string>& prepositions() {
  static const std::unordered_set<std::string> p{
      "for",   "from",   "in",      "on",   "to",    "with",  "at",     "by",    "about", "into",
      "onto",  "during", "without", "when", "while", "via",   "under",  "over",  "after", "before"};
  return p;
}

inline bool is_verb(const std::string& key, const std::unordered_set<std::string>& verbs) {
  if (key.empty()) return false;
  if (verbs.count(key)) return true;
  auto has = [&](const std::string& stem) { return stem.size() >= 2 && verbs.count(stem) > 0; };
  auto ends = [&](std::string_view suf) {
    return key.size() > suf.size() && key.compare(key.size() - suf.size(), suf.size(), suf) == 0;
  };
  auto undouble = [](const std::string& s) {
    if (s.size() >= 3 && s[s.size() - 1] == s[s.size() - 2]) return s.substr(0, s.size() - 1);
    return s;
  };
  if (ends("ing")) {
    auto stem = key.substr(0, key.size() - 3);
    if (has(stem) || has(stem + "e") || has(undouble(stem))) return true;
  }
  if (ends("ied") || ends("ies")) {
    if (has(key.substr(0, key.size() - 3) + "y")) return true;
  }
  if (ends("ed")) {
    auto stem = key.substr(0, key.size() - 2);
    if (has(stem) || has(key.substr(0, key.size() - 1)) || has(undouble(stem))) return true;
  }
  if (ends("es") && has(key.substr(0, key.size() - 2))) return true;
  if (ends("s") && has(key.substr(0, key.size() - 1))) return true;
  return false;
}

// A lexicon verb directly after a determiner reads as a noun ("a crash report").
inline bool is_verb_at(const std::vector<Tok>& toks, std::size_t i,
                       const std::unordered_set<std::string>& verbs) {
  if (!is_verb(toks[i].key, verbs)) return false;
  return i == 0 || determiners().count(toks[i - 1].key) == 0;
}

inline bool has_clause(const std::vector<Tok>& toks, const std::unordered_set<std::string>& verbs) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (is_verb_at(toks, i, verbs)) return true;
  }
  return false;
}

inline void strip_edges(std::vector<Tok>& toks) {
  while (!toks.empty() && is_punct_only(toks.back())) toks.pop_back();
  while (!toks.empty() && is_punct_only(toks.front())) toks.erase(toks.begin());
}

// Drops trailing punctuation glued to the last token ("controls," -> "controls").
inline void strip_trailing_punct(std::vector<Tok>& toks) {
  strip_edges(toks);
  if (toks.empty()) return;
  auto& raw = toks.back().raw;
  while (!raw.empty() && std::ispunct(static_cast<unsigned char>(raw.back())) && raw.back() != ')' &&
         raw.back() != '"' && raw.back() != '\'') {
    raw.pop_back();
  }
}

inline void strip_leading_punct(std::vector<Tok>& toks) {
  strip_edges(toks);
  if (toks.empty()) return;
  auto& raw = toks.front().raw;
  std::size_t b = 0;
  while (b < raw.size() && std::ispunct(static_cast<unsigned char>(raw[b])) && raw[b] != '(' &&
         raw[b] != '"' && raw[b] != '\'') {
    ++b;
  }
  raw.erase(0, b);
}

inline std::vector<Tok> slice(const std::vector<Tok>& toks, std::size_t b, std::size_t e) {
  return {toks.begin() + static_cast<std::ptrdiff_t>(b), toks.begin() + static_cast<std::ptrdiff_t>(e)};
}

// Keeps the material after the last adversative conjunction that is followed
// by any words. Returns the input when there is none.
inline std::vector<Tok> apply_adversative(const std::vector<Tok>& toks,
                                          const std::vector<std::vector<std::string>>& phrases) {
  std::optional<std::size_t> cut;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto len = match_phrase(toks, i, phrases);
    if (len == 0) continue;
    const auto after = i + len;
    bool has_words = false;
    for (std::size_t j = after; j < toks.size() && !has_words; ++j) {
      has_words = !is_punct_only(toks[j]) && match_phrase(toks, j, phrases) == 0;
    }
    if (has_words) cut = after;
    i = after - 1;
  }
  if (!cut) {
    // Only trailing adversatives ("good but"): drop them with their punctuation.
    std::vector<Tok> kept;
    for (std::size_t i = 0; i < toks.size();) {
      const auto len = match_phrase(toks, i, phrases);
      if (len > 0) {
        i += len;
        continue;
      }
      kept.push_back(toks[i]);
      ++i;
    }
    if (kept.size() == toks.size()) return toks;
    strip_trailing_punct(kept);
    return kept.empty() ? toks : kept;
  }
  auto rest = slice(toks, *cut, toks.size());
  strip_leading_punct(rest);
  return rest;
}

inline std::size_t conjunct_start(const std::vector<Tok>& left, const Tok& right_head,
                                  const std::unordered_set<std::string>& verbs) {
  auto last_where = [&](auto pred) -> std::optional<std::size_t> {
    for (std::size_t i = left.size(); i-- > 0;) {
      if (pred(i)) return i;
    }
    return std::nullopt;
  };
  auto is_det = [&](std::size_t i) { return determiners().count(left[i].key) > 0; };
  auto is_prep = [&](std::size_t i) { return prepositions().count(left[i].key) > 0; };
  auto is_vb = [&](std::size_t i) { return is_verb_at(left, i, verbs); };

  std::optional<std::size_t> found;
  if (determiners().count(right_head.key)) {
    found = last_where(is_det);
  } else if (prepositions().count(right_head.key)) {
    found = last_where(is_prep);
  } else if (is_verb(right_head.key, verbs)) {
    found = last_where(is_vb);
  }
  if (found) return *found;
  // Bare phrase: the conjunct starts after the last function word or verb.
  auto boundary = last_where([&](std::size_t i) { return is_det(i) || is_prep(i) || is_vb(i); });
  return boundary ? *boundary + 1 : 0;
}

inline void split_copulative(const std::vector<Tok>& toks,
                             const std::vector<std::vector<std::string>>& phrases,
                             const std::unordered_set<std::string>& verbs,
                             std::vector<std::vector<Tok>>& out) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto len = match_phrase(toks, i, phrases);
    if (len == 0) continue;
    auto left = slice(toks, 0, i);
    auto right = slice(toks, i + len, toks.size());
    strip_trailing_punct(left);
    strip_leading_punct(right);
    if (left.empty() || right.empty()) continue;

    if (has_clause(left, verbs) && has_clause(right, verbs)) {
      split_copulative(left, phrases, verbs, out);
      split_copulative(right, phrases, verbs, out);
      return;
    }

    // Phrase join: both conjuncts share the stem before the first conjunct
    // and any prepositional tail after the second.
    std::size_t tail_at = right.size();
    for (std::size_t p = 1; p < right.size(); ++p) {
      if (prepositions().count(right[p].key)) {
        tail_at = p;
        break;
      }
    }
    auto second = slice(right, 0, tail_at);
    auto tail = slice(right, tail_at, right.size());
    strip_trailing_punct(second);
    const auto start = conjunct_start(left, right.front(), verbs);
    auto stem = slice(left, 0, start);
    auto first = slice(left, start, left.size());
    if (first.empty() || second.empty()) continue;

    for (const auto* conjunct : {&first, &second}) {
      std::vector<Tok> part = stem;
      part.insert(part.end(), conjunct->begin(), conjunct->end());
      part.insert(part.end(), tail.begin(), tail.end());
      split_copulative(part, phrases, verbs, out);
    }
    return;
  }
  out.push_back(toks);
}

}  // namespace detail

/// Splits one raw sentence into atomic sentences. Adversative truncation runs
/// first, then copulative splitting recurses until no conjunction splits.
/// Never returns an empty list.
inline std::vector<std::string> segment_atomic(std::string_view sentence,
                                               const SegmenterConfig& config = {}) {
  const auto toks = detail::tokenize_ws(sentence);
  if (toks.empty()) return {std::string(io::trim(sentence))};

  const auto adversative = detail::phrase_words(config.adversative);
  const auto copulative = detail::phrase_words(config.copulative);

  const auto kept = detail::apply_adversative(toks, adversative);
  std::vector<std::vector<detail::Tok>> parts;
  detail::split_copulative(kept, copulative, config.verbs, parts);

  std::vector<std::string> out;
  for (const auto& p : parts) {
    auto text = detail::join(p);
    if (!text.empty()) out.push_back(std::move(text));
  }
  if (out.empty()) out.push_back(detail::join(toks));
  return out;
}

/// Sentence split followed by atomic segmentation; category and timestamp are
/// inherited from the review, seq counts atomic sentences within the review.
inline std::vector<AtomicSentence> segment_review(const Review& review,
                                                  const SegmenterConfig& config = {}) {
  std::vector<AtomicSentence> out;
  for (const auto& sentence : split_sentences(review)) {
    for (auto& text : segment_atomic(sentence, config)) {
      out.push_back({review.id, out.size(), std::move(text), review.category, review.timestamp});
    }
  }
  return out;
}

}  // namespace reviewscope
