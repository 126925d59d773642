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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "reviewscope/clustering.hpp"
#include "reviewscope/code_extract.hpp"
#include "reviewscope/error.hpp"
#include "reviewscope/localization.hpp"
#include "reviewscope/review_ingest.hpp"
#include "reviewscope/segmentation.hpp"
#include "reviewscope/vsm.hpp"

namespace reviewscope {

enum class LocalizeUnit { AtomicSentence, Review };

struct PipelineConfig {
  struct Paths {
    std::filesystem::path reviews;
    std::filesystem::path commits;
    std::filesystem::path source_tree;
    std::filesystem::path constraints;
    std::filesystem::path ground_truth;
    std::filesystem::path lemmas;
    std::filesystem::path stopwords;
    std::filesystem::path acronyms;
    std::filesystem::path strings_resource;
    std::filesystem::path verb_lexicon;
    std::filesystem::path output_dir = "out";
  } paths;

  // preprocess
  bool fallback_classifier = false;
  ClassifierCues cues;
  std::vector<std::string> copulative = SegmenterConfig{}.copulative;
  std::vector<std::string> adversative = SegmenterConfig{}.adversative;

  // cluster
  PcaTarget pca = VarianceFraction{0.95};
  std::optional<std::size_t> k;
  std::uint64_t seed = 42;
  std::size_t max_iter = 100;
  std::size_t restarts = 10;
  std::size_t n_init = 10;
  SharedWordRule shared_word_rule = SharedWordRule::AnyWord;
  bool dump_matrix = false;

  // localize / evaluate
  std::vector<std::size_t> top_k{1, 3, 5};
  LocalizeUnit unit = LocalizeUnit::AtomicSentence;
  std::vector<std::string> non_source_suffixes = default_non_source_suffixes();
  std::vector<std::string> source_suffixes = default_source_suffixes();
  CodeExtractionConfig extraction;

  std::size_t ranking_depth() const {
    std::size_t d = 1;
    for (auto k : top_k) d = std::max(d, k);
    return d;
  }

  /// Throws ConfigError when a numeric parameter is out of range.
  void validate() const {
    if (const auto* v = std::get_if<VarianceFraction>(&pca); v && !(v->v > 0.0 && v->v <= 1.0)) {
      throw ConfigError("pca_variance must be in (0, 1]");
    }
    if (const auto* r = std::get_if<FixedComponents>(&pca); r && r->r < 1) {
      throw ConfigError("pca_components must be at least 1");
    }
    if (k && *k < 1) throw ConfigError("k must be at least 1");
    if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
    if (n_init < 1) throw ConfigError("n_init must be at least 1");
    if (top_k.empty()) throw ConfigError("top_k must list at least one cutoff");
    for (auto t : top_k) {
      if (t < 1) throw ConfigError("top_k cutoffs must be at least 1");
    }
  }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s, const std::string& sep = ",") {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto e = s.find(sep, start);
    auto item = io::trim(std::string_view(s).substr(start, e == std::string::npos ? std::string::npos : e - start));
    if (!item.empty()) out.emplace_back(item);
    if (e == std::string::npos) break;
    start = e + sep.size();
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<T>(std::stod(text, &used));
    } else {
      if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
      value = static_cast<T>(std::stoull(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("invalid value for " + key + ": '" + text + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const auto t = ascii_lower(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

}  // namespace detail

inline std::vector<std::size_t> parse_top_k_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : detail::split_list(text)) out.push_back(detail::parse_number<std::size_t>("top_k", item));
  return out;
}

/// Reads an INI config. Relative paths resolve against the config file's
/// directory. Unknown sections and keys are ignored.
inline PipelineConfig load_config(const std::filesystem::path& file) {
  namespace pt = boost::property_tree;
  if (!std::filesystem::exists(file)) throw ConfigError("config file not found: " + file.string());
  pt::ptree tree;
  try {
    pt::read_ini(file.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  const auto base = file.parent_path();
  PipelineConfig c;
  auto get = [&](const char* key) { return tree.get_optional<std::string>(key); };
  auto path = [&](const char* key, std::filesystem::path& out) {
    if (auto v = get(key)) {
      std::filesystem::path p(*v);
      out = p.is_absolute() || v->empty() ? p : base / p;
    }
  };
  path("paths.reviews", c.paths.reviews);
  path("paths.commits", c.paths.commits);
  path("paths.source_tree", c.paths.source_tree);
  path("paths.constraints", c.paths.constraints);
  path("paths.ground_truth", c.paths.ground_truth);
  path("paths.lemmas", c.paths.lemmas);
  path("paths.stopwords", c.paths.stopwords);
  path("paths.acronyms", c.paths.acronyms);
  path("paths.strings_resource", c.paths.strings_resource);
  path("paths.verb_lexicon", c.paths.verb_lexicon);
  path("segmenter.verb_lexicon", c.paths.verb_lexicon);
  path("paths.output_dir", c.paths.output_dir);

  if (auto v = get("preprocess.fallback_classifier")) c.fallback_classifier = detail::parse_bool("fallback_classifier", *v);
  if (auto v = get("preprocess.request_cues")) c.cues.request = detail::split_list(*v);
  if (auto v = get("preprocess.problem_cues")) c.cues.problem = detail::split_list(*v);
  if (auto v = get("segmenter.copulative")) c.copulative = detail::split_list(*v);
  if (auto v = get("segmenter.adversative")) c.adversative = detail::split_list(*v);

  if (auto v = get("cluster.pca_variance")) c.pca = VarianceFraction{detail::parse_number<double>("pca_variance", *v)};
  if (auto v = get("cluster.pca_components")) c.pca = FixedComponents{detail::parse_number<std::size_t>("pca_components", *v)};
  if (auto v = get("cluster.k"); v && !v->empty() && detail::ascii_lower(*v) != "auto") {
    c.k = detail::parse_number<std::size_t>("k", *v);
  }
  if (auto v = get("cluster.seed")) c.seed = detail::parse_number<std::uint64_t>("seed", *v);
  if (auto v = get("cluster.max_iter")) c.max_iter = detail::parse_number<std::size_t>("max_iter", *v);
  if (auto v = get("cluster.restarts")) c.restarts = detail::parse_number<std::size_t>("restarts", *v);
  if (auto v = get("cluster.n_init")) c.n_init = detail::parse_number<std::size_t>("n_init", *v);
  if (auto v = get("cluster.dump_matrix")) c.dump_matrix = detail::parse_bool("dump_matrix", *v);
  if (auto v = get("cluster.shared_word_rule")) {
    if (*v == "any_word") {
      c.shared_word_rule = SharedWordRule::AnyWord;
    } else if (*v == "same_word_set") {
      c.shared_word_rule = SharedWordRule::SameWordSet;
    } else {
      throw ConfigError("shared_word_rule must be any_word or same_word_set");
    }
  }

  if (auto v = get("localize.top_k")) c.top_k = parse_top_k_list(*v);
  if (auto v = get("localize.unit")) {
    if (*v == "atomic") {
      c.unit = LocalizeUnit::AtomicSentence;
    } else if (*v == "review") {
      c.unit = LocalizeUnit::Review;
    } else {
      throw ConfigError("localize.unit must be atomic or review");
    }
  }
  if (auto v = get("localize.non_source_suffixes")) c.non_source_suffixes = detail::split_list(*v);
  if (auto v = get("localize.source_suffixes")) c.source_suffixes = detail::split_list(*v);
  if (auto v = get("extract.type_keywords")) c.extraction.type_keywords = detail::split_list(*v);
  if (auto v = get("extract.method_patterns")) c.extraction.method_patterns = detail::split_list(*v, "|||");
  if (auto v = get("extract.field_patterns")) c.extraction.field_patterns = detail::split_list(*v, "|||");

  c.validate();
  return c;
}

}  // namespace reviewscope
