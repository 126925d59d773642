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
#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "reviewscope/textproc.hpp"

namespace reviewscope {

/// Lexical patterns for pulling words out of source files. Every pattern is
/// an ECMAScript regex; the identifier is the last capture group that
/// matched. When a method pattern has two or more groups, group 1 is the
/// word before the name and is checked against `non_type_words`.
struct CodeExtractionConfig {
  std::vector<std::string> type_keywords{"class", "interface", "enum", "object", "struct",
                                         "record", "trait", "namespace"};
  std::vector<std::string> method_patterns{
      R"(\b(?:fun|def|func|fn)\s+(?:<[^>]*>\s*)?(?:[A-Za-z_]\w*\.)?([A-Za-z_]\w*)\s*\()",
      R"(([A-Za-z_][\w<>\[\]?,.:]*[>\]\w])\s+[*&]?([A-Za-z_]\w*)\s*\()"};
  std::vector<std::string> field_patterns{
      R"(\b(?:val|var|let|const)\s+([A-Za-z_]\w*))",
      R"(([A-Za-z_][\w<>\[\]?,.]*[>\]\w])\s+([A-Za-z_]\w*)\s*(?:\[\s*\]\s*)*$)"};
  std::vector<std::string> non_type_words{"return", "new", "throw", "else", "case", "await", "yield",
                                          "package", "import", "goto", "delete", "typeof", "in", "is",
                                          "as", "not", "and", "or"};
  std::vector<std::string> control_words{"if", "for", "while", "switch", "catch", "synchronized",
                                         "return", "new", "super", "this", "sizeof", "assert", "when",
                                         "foreach", "using", "lock", "with"};
};

/// What a source file contributes to the code side of a file pair.
struct CodeDoc {
  std::map<std::string, int> bag;  // normalized word -> occurrences

  std::vector<std::string> words() const {
    std::vector<std::string> out;
    out.reserve(bag.size());
    for (const auto& [w, n] : bag) out.push_back(w);
    return out;
  }
};

/// Splits an identifier on underscores, digits-to-letter changes and
/// camel-case humps: "HTTPServerConfig_v2" -> {HTTP, Server, Config, v2}.
inline std::vector<std::string> split_identifier(std::string_view ident) {
  std::vector<std::string> parts;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) parts.push_back(std::move(cur));
    cur.clear();
  };
  auto upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  auto lower = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t i = 0; i < ident.size(); ++i) {
    const char c = ident[i];
    if (!alnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      const char prev = cur.back();
      const bool next_lower = i + 1 < ident.size() && lower(ident[i + 1]);
      if ((lower(prev) && upper(c)) || (upper(prev) && upper(c) && next_lower)) flush();
    }
    cur.push_back(c);
  }
  flush();
  return parts;
}

namespace detail {

struct Blanked {
  std::string code;  // comments and string literals replaced by spaces
  std::vector<std::pair<std::size_t, std::string>> doc_comments;  // (start offset, body)
};

// Blanks comments, string and char literals while keeping offsets stable.
inline Blanked blank_comments_and_strings(std::string_view src) {
  Blanked out;
  out.code.assign(src);
  std::size_t i = 0;
  auto blank = [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e && k < out.code.size(); ++k) {
      if (out.code[k] != '\n') out.code[k] = ' ';
    }
  };
  while (i < src.size()) {
    if (src.compare(i, 2, "//") == 0) {
      auto e = src.find('\n', i);
      if (e == std::string_view::npos) e = src.size();
      blank(i, e);
      i = e;
    } else if (src.compare(i, 2, "/*") == 0) {
      auto e = src.find("*/", i + 2);
      e = (e == std::string_view::npos) ? src.size() : e + 2;
      if (src.compare(i, 3, "/**") == 0 && src.compare(i, 4, "/**/") != 0) {
        const auto body_end = std::max(i + 3, e >= 2 ? e - 2 : e);
        out.doc_comments.emplace_back(i, std::string(src.substr(i + 3, body_end - (i + 3))));
      }
      blank(i, e);
      i = e;
    } else if (src[i] == '"' || src[i] == '\'' || src[i] == '`') {
      const char q = src[i];
      const bool triple = q == '"' && src.compare(i, 3, "\"\"\"") == 0;
      std::size_t e = i + (triple ? 3 : 1);
      while (e < src.size()) {
        if (triple) {
          if (src.compare(e, 3, "\"\"\"") == 0) {
            e += 3;
            break;
          }
        } else if (src[e] == '\\') {
          ++e;
        } else if (src[e] == q || (src[e] == '\n' && q != '`')) {
          ++e;
          break;
        }
        ++e;
      }
      blank(i, std::min(e, src.size()));
      i = e;
    } else {
      ++i;
    }
  }
  return out;
}

inline std::string clean_doc_comment(std::string body) {
  static const std::regex tag(R"(@\w+)");
  static const std::regex html(R"(<[^>]*>)");
  static const std::regex star_prefix(R"((^|\n)[ \t]*\*+)");
  body = std::regex_replace(body, star_prefix, "$1 ");
  body = std::regex_replace(body, tag, " ");
  body = std::regex_replace(body, html, " ");
  std::string out;
  for (const auto& w : split_ws(body)) {
    for (const auto& part : split_identifier(w)) {
      out += part;
      out += ' ';
    }
  }
  return out;
}

inline bool contains_word(const std::string& text, const std::string& word) {
  for (auto pos = text.find(word); pos != std::string::npos; pos = text.find(word, pos + 1)) {
    const bool left = pos == 0 || !(std::isalnum(static_cast<unsigned char>(text[pos - 1])) || text[pos - 1] == '_');
    const auto end = pos + word.size();
    const bool right = end >= text.size() || !(std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_');
    if (left && right) return true;
  }
  return false;
}

struct CompiledPatterns {
  std::vector<std::regex> methods;
  std::vector<std::regex> fields;
};

inline CompiledPatterns compile(const CodeExtractionConfig& config) {
  CompiledPatterns p;
  try {
    for (const auto& s : config.method_patterns) p.methods.emplace_back(s);
    for (const auto& s : config.field_patterns) p.fields.emplace_back(s, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ConfigError(std::string("invalid code extraction pattern: ") + e.what());
  }
  return p;
}

inline std::string last_group(const std::smatch& m) {
  for (std::size_t g = m.size(); g-- > 1;) {
    if (m[g].matched) return m[g].str();
  }
  return {};
}

}  // namespace detail

/// Raw identifiers and comment text found in one source file, before
/// normalization. Exposed for diagnostics and tests.
struct CodeFragments {
  std::vector<std::string> method_names;
  std::vector<std::string> field_names;
  std::vector<std::string> doc_comments;
};

/// Scans a source file chunk by chunk (text between '{', '}' and ';').
/// Methods are recognized at top level and directly inside type bodies,
/// fields only directly inside type bodies, and a /** */ comment is kept
/// when the chunk it precedes declares a type or method.
inline CodeFragments scan_source(std::string_view contents, const CodeExtractionConfig& config = {}) {
  const auto blanked = detail::blank_comments_and_strings(contents);
  const auto patterns = detail::compile(config);
  const std::string& code = blanked.code;

  CodeFragments out;
  enum class Scope { Type, Other };
  std::vector<Scope> stack;
  std::size_t chunk_start = 0;
  std::size_t next_comment = 0;

  auto in_type_body = [&] { return !stack.empty() && stack.back() == Scope::Type; };
  auto declaration_level = [&] { return stack.empty() || stack.back() == Scope::Type; };

  auto process = [&](std::size_t end, char terminator) -> bool {
    const std::string chunk = code.substr(chunk_start, end - chunk_start);
    bool is_type = false;
    for (const auto& kw : config.type_keywords) {
      if (terminator == '{' && detail::contains_word(chunk, kw)) is_type = true;
    }
    bool is_decl = is_type;
    if (declaration_level() && !is_type) {
      for (const auto& re : patterns.methods) {
        for (auto it = std::sregex_iterator(chunk.begin(), chunk.end(), re); it != std::sregex_iterator(); ++it) {
          const auto& m = *it;
          const auto name = detail::last_group(m);
          if (name.empty() || std::count(config.control_words.begin(), config.control_words.end(), name)) continue;
          if (m.size() > 2 && m[1].matched &&
              std::count(config.non_type_words.begin(), config.non_type_words.end(), m[1].str())) {
            continue;
          }
          out.method_names.push_back(name);
          is_decl = true;
        }
      }
    }
    if (in_type_body() && !is_type) {
      for (std::size_t p = 0; p < patterns.fields.size(); ++p) {
        const auto& re = patterns.fields[p];
        // Patterns anchored at '$' see only the declarator before any
        // initializer, and only for ';'-terminated, call-free statements.
        const bool anchored = config.field_patterns[p].find('$') != std::string::npos;
        std::string subject = chunk;
        if (anchored) {
          if (terminator != ';' || is_decl) continue;
          subject = subject.substr(0, subject.find('='));
          if (subject.find('(') != std::string::npos) continue;
          auto t = io::trim(subject);
          subject = std::string(t);
        }
        for (auto it = std::sregex_iterator(subject.begin(), subject.end(), re); it != std::sregex_iterator(); ++it) {
          const auto& m = *it;
          const auto name = detail::last_group(m);
          if (name.empty()) continue;
          if (m.size() > 2 && m[1].matched &&
              std::count(config.non_type_words.begin(), config.non_type_words.end(), m[1].str())) {
            continue;
          }
          out.field_names.push_back(name);
        }
      }
    }
    return is_decl;
  };

  auto attach_comments = [&](std::size_t end, bool keep) {
    while (next_comment < blanked.doc_comments.size() && blanked.doc_comments[next_comment].first < end) {
      if (keep && blanked.doc_comments[next_comment].first >= chunk_start) {
        out.doc_comments.push_back(blanked.doc_comments[next_comment].second);
      }
      ++next_comment;
    }
  };

  for (std::size_t i = 0; i <= code.size(); ++i) {
    const char c = i < code.size() ? code[i] : '\0';
    if (c != '{' && c != '}' && c != ';' && c != '\0') continue;
    const bool decl = process(i, c);
    attach_comments(i, decl);
    if (c == '{') {
      bool is_type = false;
      const std::string chunk = code.substr(chunk_start, i - chunk_start);
      for (const auto& kw : config.type_keywords) is_type = is_type || detail::contains_word(chunk, kw);
      stack.push_back(is_type ? Scope::Type : Scope::Other);
    } else if (c == '}') {
      if (!stack.empty()) stack.pop_back();
    }
    chunk_start = i + 1;
  }
  return out;
}

/// Word bag for one source file: path segments (minus the extension),
/// declaration doc comments, method names and field names, each split on
/// camel case, lemmatized and stopword-filtered.
inline CodeDoc extract_code_doc(std::string_view path, std::string_view contents,
                                const TextNormalizer& normalizer, const CodeExtractionConfig& config = {}) {
  CodeDoc doc;
  auto add_text = [&](std::string_view text) {
    for (auto& w : normalizer.word_stream(strip_noise(text))) ++doc.bag[w];
  };
  auto add_identifier = [&](std::string_view ident) {
    std::string joined;
    for (const auto& part : split_identifier(ident)) joined += part + " ";
    add_text(joined);
  };

  std::string p(path);
  std::replace(p.begin(), p.end(), '\\', '/');
  const auto slash = p.rfind('/');
  const auto dot = p.rfind('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) p.erase(dot);
  std::size_t start = 0;
  while (start <= p.size()) {
    auto e = p.find_first_of("/.", start);
    if (e == std::string::npos) e = p.size();
    if (e > start) add_identifier(std::string_view(p).substr(start, e - start));
    start = e + 1;
  }

  const auto fragments = scan_source(contents, config);
  for (const auto& c : fragments.doc_comments) add_text(detail::clean_doc_comment(c));
  for (const auto& m : fragments.method_names) add_identifier(m);
  for (const auto& f : fragments.field_names) add_identifier(f);
  return doc;
}

}  // namespace reviewscope
