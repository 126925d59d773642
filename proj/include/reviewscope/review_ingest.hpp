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

#include <nlohmann/json.hpp>

#include "reviewscope/error.hpp"
#include "reviewscope/io.hpp"
#include "reviewscope/time.hpp"

namespace reviewscope {

enum class Category {
  InformationGiving,
  InformationSeeking,
  FeatureRequest,
  ProblemDiscovery,
  Unlabeled,
};

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::InformationGiving: return "information_giving";
    case Category::InformationSeeking: return "information_seeking";
    case Category::FeatureRequest: return "feature_request";
    case Category::ProblemDiscovery: return "problem_discovery";
    case Category::Unlabeled: break;
  }
  return "unlabeled";
}

inline std::optional<Category> category_from_string(std::string_view s) {
  if (s == "information_giving") return Category::InformationGiving;
  if (s == "information_seeking") return Category::InformationSeeking;
  if (s == "feature_request") return Category::FeatureRequest;
  if (s == "problem_discovery") return Category::ProblemDiscovery;
  if (s == "unlabeled") return Category::Unlabeled;
  return std::nullopt;
}

struct Review {
  std::string id;
  std::string app_id;
  std::string text;
  std::optional<Timestamp> timestamp;
  Category category = Category::Unlabeled;
};

struct ReviewLoadResult {
  std::vector<Review> reviews;
  std::size_t skipped = 0;
};

/// Parses one JSON-Lines review object. Returns nullopt when the line does
/// not satisfy the review schema.
inline std::optional<Review> parse_review_line(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object()) return std::nullopt;
  if (!j.contains("id") || !j["id"].is_string() || !j.contains("text") || !j["text"].is_string()) {
    return std::nullopt;
  }
  Review r;
  r.id = j["id"].get<std::string>();
  if (r.id.empty()) return std::nullopt;
  r.text = std::string(io::trim(j["text"].get<std::string>()));
  if (r.text.empty()) return std::nullopt;
  if (auto it = j.find("app_id"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return std::nullopt;
    r.app_id = it->get<std::string>();
  }
  if (auto it = j.find("timestamp"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return std::nullopt;
    r.timestamp = parse_rfc3339(it->get<std::string>());
    if (!r.timestamp) return std::nullopt;
  }
  if (auto it = j.find("category"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return std::nullopt;
    auto c = category_from_string(it->get<std::string>());
    if (!c) return std::nullopt;
    r.category = *c;
  }
  return r;
}

/// Loads a JSON-Lines review dump. Blank lines are ignored; malformed lines
/// and duplicate ids are skipped and counted.
inline ReviewLoadResult load_reviews(const std::filesystem::path& path) {
  ReviewLoadResult result;
  std::unordered_set<std::string> seen;
  for (const auto& line : io::read_lines(path)) {
    if (io::trim(line).empty()) continue;
    auto review = parse_review_line(line);
    if (!review || !seen.insert(review->id).second) {
      ++result.skipped;
      continue;
    }
    result.reviews.push_back(std::move(*review));
  }
  if (result.reviews.empty()) {
    throw FormatError("no parseable reviews in " + path.string());
  }
  return result;
}

/// Keyword cue lists used when a dump carries no category labels.
struct ClassifierCues {
  std::vector<std::string> request{"wish", "add", "would be nice", "please", "should", "want"};
  std::vector<std::string> problem{"crash", "bug", "error", "doesn't work", "fails", "freez"};
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Replaces the UTF-8 right single quotation mark with an ASCII apostrophe.
inline std::string fold_apostrophes(std::string s) {
  const std::string curly = "\xE2\x80\x99";
  for (auto pos = s.find(curly); pos != std::string::npos; pos = s.find(curly, pos)) {
    s.replace(pos, curly.size(), "'");
  }
  return s;
}

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'';
}

// A cue matches at a word start; the rest of that word may only be a common
// inflectional ending, so "crash" hits "crashes" but "add" misses "addictive".
inline bool cue_matches(const std::string& text, const std::string& cue) {
  static const std::vector<std::string_view> endings{"", "s", "es", "e", "ed", "d", "ing", "er", "ers"};
  for (auto pos = text.find(cue); pos != std::string::npos; pos = text.find(cue, pos + 1)) {
    if (pos > 0 && is_word_char(text[pos - 1])) continue;
    auto end = pos + cue.size();
    auto word_end = end;
    while (word_end < text.size() && is_word_char(text[word_end])) ++word_end;
    const std::string_view rest(text.data() + end, word_end - end);
    if (std::find(endings.begin(), endings.end(), rest) != endings.end()) return true;
  }
  return false;
}

}  // namespace detail

/// Keyword fallback for unlabeled reviews. Request cues win over problem cues.
inline Review heuristic_classify(Review review, const ClassifierCues& cues = {}) {
  const auto text = detail::fold_apostrophes(detail::ascii_lower(review.text));
  auto any = [&](const std::vector<std::string>& list) {
    return std::any_of(list.begin(), list.end(), [&](const std::string& cue) {
      return !cue.empty() && detail::cue_matches(text, detail::ascii_lower(cue));
    });
  };
  if (any(cues.request)) {
    review.category = Category::FeatureRequest;
  } else if (any(cues.problem)) {
    review.category = Category::ProblemDiscovery;
  } else {
    review.category = Category::InformationGiving;
  }
  return review;
}

struct FilterOptions {
  bool fallback_classifier = false;
  ClassifierCues cues;
};

struct FilterResult {
  std::vector<Review> reviews;
  std::size_t dropped_unlabeled = 0;
};

inline bool is_informative(Category c) {
  return c == Category::FeatureRequest || c == Category::ProblemDiscovery;
}

/// Keeps feature requests and problem reports, in input order.
inline FilterResult filter_informative(const std::vector<Review>& reviews,
                                       const FilterOptions& options = {}) {
  FilterResult result;
  for (const auto& r : reviews) {
    if (r.category == Category::Unlabeled) {
      if (!options.fallback_classifier) {
        ++result.dropped_unlabeled;
        continue;
      }
      auto labeled = heuristic_classify(r, options.cues);
      if (is_informative(labeled.category)) result.reviews.push_back(std::move(labeled));
      continue;
    }
    if (is_informative(r.category)) result.reviews.push_back(r);
  }
  return result;
}

}  // namespace reviewscope
