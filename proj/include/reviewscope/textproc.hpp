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
#include <filesystem>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <unicode/regex.h>
#include <unicode/unistr.h>

#include "reviewscope/error.hpp"
#include "reviewscope/io.hpp"
#include "reviewscope/review_ingest.hpp"
#include "reviewscope/segmentation.hpp"

namespace reviewscope {

/// Normalized word list of one atomic sentence (or, for localization, one
/// whole review).
struct TokenDoc {
  std::string doc_id;
  std::string review_id;
  std::vector<std::string> tokens;
  Category category = Category::Unlabeled;
  std::string text;
  std::optional<Timestamp> timestamp;
};

inline std::string make_doc_id(std::string_view review_id, std::size_t seq) {
  return std::string(review_id) + "#" + std::to_string(seq);
}

namespace detail {

class IcuReplacer {
 public:
  IcuReplacer(const char16_t* pattern, const char16_t* replacement) : replacement_(replacement) {
    UErrorCode status = U_ZERO_ERROR;
    pattern_.reset(icu::RegexPattern::compile(icu::UnicodeString(pattern), 0, status));
    if (U_FAILURE(status)) throw Error("cannot compile text-cleaning pattern");
  }

  icu::UnicodeString apply(const icu::UnicodeString& input) const {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::RegexMatcher> m(pattern_->matcher(input, status));
    if (U_FAILURE(status)) throw Error("cannot create text-cleaning matcher");
    auto out = m->replaceAll(replacement_, status);
    if (U_FAILURE(status)) throw Error("text-cleaning replacement failed");
    return out;
  }

 private:
  std::unique_ptr<icu::RegexPattern> pattern_;
  icu::UnicodeString replacement_;
};

}  // namespace detail

/// Removes emoji and punctuation: every punctuation mark (with the spaces
/// after it) becomes one space, then anything outside [a-zA-Z0-9\s] is
/// deleted. The result is lowercased with whitespace runs collapsed.
inline std::string strip_noise(std::string_view text) {
  static const detail::IcuReplacer punctuation(u"\\p{P}\\s*", u" ");
  static const detail::IcuReplacer non_alnum(u"[^a-zA-Z0-9\\s]*", u"");
  static const detail::IcuReplacer spaces(u"\\s+", u" ");

  auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u = spaces.apply(non_alnum.apply(punctuation.apply(u)));
  std::string out;
  u.toUTF8String(out);
  return detail::ascii_lower(io::trim(out));
}

using LemmaDict = std::unordered_map<std::string, std::string>;
using StopwordList = std::unordered_set<std::string>;
using AcronymTable = std::unordered_map<std::string, std::vector<std::string>>;

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\n' && s[j] != '\r') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool is_token(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  });
}

// Two tab-separated columns per line, '#' comments, blank lines ignored.
inline std::vector<std::pair<std::string, std::string>> read_two_column(const std::filesystem::path& path,
                                                                        std::string_view what) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError(std::string(what) + " not found: " + path.string());
  }
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t lineno = 0;
  for (const auto& line : io::read_lines(path)) {
    ++lineno;
    auto t = io::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string_view::npos) {
      throw ConfigError(std::string(what) + " line " + std::to_string(lineno) + " has no tab: " +
                        path.string());
    }
    rows.emplace_back(ascii_lower(io::trim(t.substr(0, tab))), std::string(io::trim(t.substr(tab + 1))));
  }
  return rows;
}

}  // namespace detail

/// inflected<TAB>lemma per line. Words absent from the dictionary map to
/// themselves; there is no rule-based stemming fallback.
inline LemmaDict load_lemma_dict(const std::filesystem::path& path) {
  LemmaDict dict;
  for (auto& [form, lemma] : detail::read_two_column(path, "lemma dictionary")) {
    dict[form] = detail::ascii_lower(lemma);
  }
  return dict;
}

/// acronym<TAB>expansion per line, e.g. "asap\tas soon as possible".
inline AcronymTable load_acronyms(const std::filesystem::path& path) {
  AcronymTable table;
  for (auto& [acronym, expansion] : detail::read_two_column(path, "acronym table")) {
    table[acronym] = detail::split_ws(strip_noise(expansion));
  }
  return table;
}

inline const AcronymTable& default_acronyms() {
  static const AcronymTable table{
      {"asap", {"as", "soon", "as", "possible"}}, {"cuz", {"cause"}}, {"coz", {"cause"}},
      {"bc", {"because"}}, {"pls", {"please"}}, {"plz", {"please"}}, {"thx", {"thanks"}},
      {"u", {"you"}}, {"ur", {"your"}}, {"btw", {"by", "the", "way"}},
      {"imo", {"in", "my", "opinion"}}, {"idk", {"i", "do", "not", "know"}}};
  return table;
}

/// Standard English stopword list.
inline const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words{
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
      "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
      "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
      "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
      "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
      "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by", "for",
      "with", "about", "against", "between", "into", "through", "during", "before", "after",
      "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
      "again", "further", "then", "once", "here", "there", "when", "where", "why", "how", "all",
      "any", "both", "each", "few", "more", "most", "other", "some", "such", "no", "nor", "not",
      "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don",
      "should", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn",
      "doesn", "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan",
      "shouldn", "wasn", "weren", "won", "wouldn", "would", "could", "also", "im", "ive", "dont",
      "cant", "wont"};
  return words;
}

inline StopwordList load_stopwords(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("stopword list not found: " + path.string());
  StopwordList list;
  for (const auto& line : io::read_lines(path)) {
    auto w = io::trim(line);
    if (w.empty() || w.front() == '#') continue;
    list.insert(detail::ascii_lower(w));
  }
  return list;
}

/// Literal text of every <string ...>...</string> element in an Android-style
/// string resource file. Extracted by pattern, not by an XML parser.
inline std::vector<std::string> extract_string_literals(std::string_view xml) {
  static const std::regex element(R"(<string(?:\s[^>]*)?>([\s\S]*?)</string>)");
  std::vector<std::string> out;
  const std::string text(xml);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), element); it != std::sregex_iterator();
       ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

/// Removes from `stopwords` every word that appears in a GUI string literal,
/// since such words name app features ("home", "back").
inline std::size_t whitelist_gui_words(StopwordList& stopwords, const std::vector<std::string>& literals) {
  std::size_t removed = 0;
  for (const auto& literal : literals) {
    for (const auto& w : detail::split_ws(strip_noise(literal))) removed += stopwords.erase(w);
  }
  return removed;
}

/// Lemma, acronym and stopword configuration shared by every normalization
/// site (reviews, commit messages, code identifiers).
class TextNormalizer {
 public:
  TextNormalizer()
      : stopwords_(default_stopwords().begin(), default_stopwords().end()),
        acronyms_(default_acronyms()) {}

  TextNormalizer(LemmaDict lemmas, StopwordList stopwords, AcronymTable acronyms = {})
      : lemmas_(std::move(lemmas)), stopwords_(std::move(stopwords)), acronyms_(std::move(acronyms)) {}

  const LemmaDict& lemmas() const { return lemmas_; }
  const StopwordList& stopwords() const { return stopwords_; }
  const AcronymTable& acronyms() const { return acronyms_; }

  std::string lemma(const std::string& word) const {
    auto it = lemmas_.find(word);
    return it == lemmas_.end() ? word : it->second;
  }

  /// Normalized words in order, repeats kept. Input must be noise-stripped.
  std::vector<std::string> word_stream(std::string_view stripped) const {
    std::vector<std::string> out;
    for (const auto& raw : detail::split_ws(stripped)) {
      auto expansion = acronyms_.find(raw);
      if (expansion != acronyms_.end()) {
        for (const auto& w : expansion->second) push(out, w);
      } else {
        push(out, raw);
      }
    }
    return out;
  }

  /// Distinct normalized words, first occurrence order.
  std::vector<std::string> tokens(std::string_view stripped) const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto& w : word_stream(stripped)) {
      if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
  }

 private:
  void push(std::vector<std::string>& out, const std::string& word) const {
    auto l = lemma(word);
    if (!detail::is_token(l) || stopwords_.count(l)) return;
    out.push_back(std::move(l));
  }

  LemmaDict lemmas_;
  StopwordList stopwords_;
  AcronymTable acronyms_;
};

/// Tokenizes noise-stripped text, lemmatizes by dictionary, removes
/// stopwords and deduplicates. No acronym expansion.
inline std::vector<std::string> normalize_tokens(std::string_view stripped, const LemmaDict& lemmas,
                                                 const StopwordList& stopwords) {
  return TextNormalizer(lemmas, stopwords).tokens(stripped);
}

inline TokenDoc make_token_doc(const AtomicSentence& sentence, const TextNormalizer& normalizer) {
  TokenDoc doc;
  doc.doc_id = make_doc_id(sentence.review_id, sentence.seq);
  doc.review_id = sentence.review_id;
  doc.tokens = normalizer.tokens(strip_noise(sentence.text));
  doc.category = sentence.category;
  doc.text = sentence.text;
  doc.timestamp = sentence.timestamp;
  return doc;
}

/// Removes documents with fewer than two tokens, preserving order.
inline std::vector<TokenDoc> drop_short(std::vector<TokenDoc> docs) {
  std::erase_if(docs, [](const TokenDoc& d) { return d.tokens.size() < 2; });
  return docs;
}

}  // namespace reviewscope
