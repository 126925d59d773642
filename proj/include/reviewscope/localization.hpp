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
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "reviewscope/code_extract.hpp"
#include "reviewscope/error.hpp"
#include "reviewscope/io.hpp"
#include "reviewscope/textproc.hpp"
#include "reviewscope/time.hpp"
#include "reviewscope/vsm.hpp"

namespace reviewscope {

struct CommitRecord {
  std::string sha;
  std::string title;
  std::string description;
  Timestamp timestamp;
  std::vector<std::string> files;
};

inline const std::vector<std::string>& default_non_source_suffixes() {
  static const std::vector<std::string> s{".html", ".properties", ".md", ".txt", ".png"};
  return s;
}

inline const std::vector<std::string>& default_source_suffixes() {
  static const std::vector<std::string> s{".java", ".kt",  ".kts", ".scala", ".groovy", ".c",
                                          ".cc",   ".cpp", ".cxx", ".h",     ".hh",     ".hpp",
                                          ".m",    ".mm",  ".swift", ".py",  ".js",     ".jsx",
                                          ".ts",   ".tsx", ".go",  ".rs",    ".cs",     ".dart"};
  return s;
}

inline bool has_suffix(std::string_view path, const std::vector<std::string>& suffixes) {
  const auto lower = detail::ascii_lower(path);
  return std::any_of(suffixes.begin(), suffixes.end(), [&](const std::string& s) {
    const auto ls = detail::ascii_lower(s);
    return lower.size() >= ls.size() && lower.compare(lower.size() - ls.size(), ls.size(), ls) == 0;
  });
}

struct CommitLoadResult {
  std::vector<CommitRecord> commits;
  std::size_t skipped_malformed = 0;
  std::size_t dropped_non_source = 0;
};

inline std::optional<CommitRecord> parse_commit_line(std::string_view line) {
  auto j = nlohmann::json::parse(line, nullptr, false);
  if (!j.is_object()) return std::nullopt;
  auto str = [&](const char* key, bool required) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return required ? std::nullopt : std::optional<std::string>("");
    if (!it->is_string()) return std::nullopt;
    return it->get<std::string>();
  };
  auto sha = str("sha", true);
  auto title = str("title", false);
  auto description = str("description", false);
  auto ts = str("timestamp", true);
  if (!sha || sha->empty() || !title || !description || !ts) return std::nullopt;
  auto when = parse_rfc3339(*ts);
  if (!when) return std::nullopt;
  auto files = j.find("files");
  if (files == j.end() || !files->is_array()) return std::nullopt;
  CommitRecord c{*sha, *title, *description, *when, {}};
  for (const auto& f : *files) {
    if (!f.is_string()) return std::nullopt;
    c.files.push_back(f.get<std::string>());
  }
  return c;
}

/// Loads a JSON-Lines commit dump, dropping paths with a non-source suffix
/// and then every commit left without files.
inline CommitLoadResult load_commits(const std::filesystem::path& path,
                                     const std::vector<std::string>& non_source = default_non_source_suffixes()) {
  CommitLoadResult result;
  for (const auto& line : io::read_lines(path)) {
    if (io::trim(line).empty()) continue;
    auto commit = parse_commit_line(line);
    if (!commit) {
      ++result.skipped_malformed;
      continue;
    }
    std::erase_if(commit->files, [&](const std::string& f) { return has_suffix(f, non_source); });
    if (commit->files.empty()) {
      ++result.dropped_non_source;
      continue;
    }
    result.commits.push_back(std::move(*commit));
  }
  return result;
}

/// Sorted, duplicate-free word list.
using WordSet = std::vector<std::string>;

template <typename Range>
WordSet make_word_set(const Range& words) {
  WordSet s(std::begin(words), std::end(words));
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

struct CommitEntry {
  std::string sha;
  Timestamp timestamp;
  WordSet words;
};

/// A source file as (code words, commit tags).
struct FilePair {
  std::string path;
  std::map<std::string, int> code_bag;
  WordSet code_words;
  std::vector<CommitEntry> commit_entries;  // ascending timestamp
};

inline WordSet commit_words(const CommitRecord& c, const TextNormalizer& normalizer) {
  return make_word_set(normalizer.word_stream(strip_noise(c.title + " " + c.description)));
}

struct TagResult {
  std::vector<FilePair> files;     // sorted by path
  std::size_t missing_paths = 0;   // commit paths absent from the code index
};

/// Attaches one commit entry per touching commit to every file. Paths that
/// commits mention but the code index lacks still become (code-less) files.
inline TagResult tag_files(const std::map<std::string, CodeDoc>& code_docs,
                           const std::vector<CommitRecord>& commits, const TextNormalizer& normalizer) {
  std::map<std::string, FilePair> by_path;
  for (const auto& [path, doc] : code_docs) {
    auto& f = by_path[path];
    f.path = path;
    f.code_bag = doc.bag;
    f.code_words = doc.words();
  }
  TagResult result;
  std::set<std::string> missing;
  for (const auto& c : commits) {
    const auto words = commit_words(c, normalizer);
    for (const auto& path : std::set<std::string>(c.files.begin(), c.files.end())) {
      auto [it, inserted] = by_path.try_emplace(path);
      if (inserted) {
        it->second.path = path;
        missing.insert(path);
      }
      it->second.commit_entries.push_back({c.sha, c.timestamp, words});
    }
  }
  result.missing_paths = missing.size();
  for (auto& [path, f] : by_path) {
    std::stable_sort(f.commit_entries.begin(), f.commit_entries.end(),
                     [](const CommitEntry& a, const CommitEntry& b) { return a.timestamp < b.timestamp; });
    result.files.push_back(std::move(f));
  }
  return result;
}

/// Reads every source file under `root` (by suffix) into a code index keyed
/// by '/'-separated relative path. Unreadable files are skipped with a warning.
inline std::map<std::string, CodeDoc> index_source_tree(const std::filesystem::path& root,
                                                        const TextNormalizer& normalizer,
                                                        const std::vector<std::string>& source_suffixes = default_source_suffixes(),
                                                        const CodeExtractionConfig& config = {},
                                                        Diagnostics* diag = nullptr) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw IoError("source tree not found: " + root.string());
  std::map<std::string, CodeDoc> out;
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file() && has_suffix(it->path().string(), source_suffixes)) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const auto rel = fs::relative(file, root).generic_string();
    try {
      out.emplace(rel, extract_code_doc(rel, io::read_file(file), normalizer, config));
    } catch (const IoError& e) {
      warn(diag, std::string("skipping unreadable source file: ") + e.what());
    }
  }
  return out;
}

inline TagResult tag_files(const std::vector<CommitRecord>& commits, const std::filesystem::path& tree,
                           const TextNormalizer& normalizer,
                           const std::vector<std::string>& source_suffixes = default_source_suffixes(),
                           const CodeExtractionConfig& config = {}, Diagnostics* diag = nullptr) {
  auto result = tag_files(index_source_tree(tree, normalizer, source_suffixes, config, diag), commits, normalizer);
  if (result.missing_paths > 0) {
    warn(diag, std::to_string(result.missing_paths) + " commit paths are absent from the source tree");
  }
  return result;
}

/// df over the union corpus: every review document, every file's code words
/// and every distinct commit's tag words count as one document each.
inline DfTable build_localization_df(const std::vector<TokenDoc>& reviews, const std::vector<FilePair>& files) {
  std::vector<const WordSet*> docs;
  std::vector<WordSet> review_sets;
  review_sets.reserve(reviews.size());
  for (const auto& r : reviews) review_sets.push_back(make_word_set(r.tokens));
  for (const auto& s : review_sets) docs.push_back(&s);
  std::unordered_set<std::string> seen_commits;
  for (const auto& f : files) {
    docs.push_back(&f.code_words);
    for (const auto& e : f.commit_entries) {
      if (seen_commits.insert(e.sha).second) docs.push_back(&e.words);
    }
  }
  return DfTable::from_documents(docs, [](const WordSet* s) -> const WordSet& { return *s; });
}

/// Number of words absent from the df table (they weigh 0).
inline std::size_t count_missing(const WordSet& words, const DfTable& df) {
  return static_cast<std::size_t>(
      std::count_if(words.begin(), words.end(), [&](const std::string& w) { return !df.contains(w); }));
}

/// Weighted asymmetric Dice: df mass of the shared words over the smaller of
/// the two sides' df mass. 0 when either side weighs nothing.
inline double dice_sim(const WordSet& review_words, const WordSet& doc_words, const DfTable& df) {
  auto mass = [&](const WordSet& s) {
    double total = 0.0;
    for (const auto& w : s) total += df.weight(w);
    return total;
  };
  const double denom = std::min(mass(review_words), mass(doc_words));
  if (!(denom > 0.0)) return 0.0;
  double shared = 0.0;
  auto a = review_words.begin();
  auto b = doc_words.begin();
  while (a != review_words.end() && b != doc_words.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      shared += df.weight(*a);
      ++a;
      ++b;
    }
  }
  return std::min(1.0, shared / denom);
}

/// Union of the tag words of commits strictly earlier than `review_time`
/// (all commits when the review has no timestamp).
inline WordSet commit_bag(const FilePair& file, std::optional<Timestamp> review_time) {
  std::vector<std::string> words;
  for (const auto& e : file.commit_entries) {
    if (review_time && !(e.timestamp < *review_time)) continue;
    words.insert(words.end(), e.words.begin(), e.words.end());
  }
  return make_word_set(words);
}

struct InterpolatedScore {
  double score = 0.0;
  std::size_t gamma = 0;  // review words also found in the commit tags
  std::size_t length = 0; // distinct review words
  double code_sim = 0.0;
  double commit_sim = 0.0;
};

/// Blends code and commit similarity with weights (L - gamma)/L and gamma/L,
/// so files without (earlier) commit history are scored on code alone.
inline InterpolatedScore interpolated_sim(const WordSet& review_words, const FilePair& file,
                                          std::optional<Timestamp> review_time, const DfTable& df) {
  InterpolatedScore s;
  const auto commits = commit_bag(file, review_time);
  s.length = review_words.size();
  if (s.length == 0) return s;
  WordSet shared;
  std::set_intersection(review_words.begin(), review_words.end(), commits.begin(), commits.end(),
                        std::back_inserter(shared));
  s.gamma = shared.size();
  s.code_sim = dice_sim(review_words, file.code_words, df);
  s.commit_sim = s.gamma == 0 ? 0.0 : dice_sim(review_words, commits, df);
  const double L = static_cast<double>(s.length);
  const double g = static_cast<double>(s.gamma);
  s.score = ((L - g) / L) * s.code_sim + (g / L) * s.commit_sim;
  return s;
}

inline InterpolatedScore interpolated_sim(const TokenDoc& review, const FilePair& file,
                                          std::optional<Timestamp> review_time, const DfTable& df) {
  return interpolated_sim(make_word_set(review.tokens), file, review_time, df);
}

struct RankedFile {
  std::string path;
  double score = 0.0;
  std::size_t gamma = 0;
};

struct LocalizationRanking {
  std::string review_id;
  std::vector<RankedFile> entries;  // score desc, then path asc
  std::size_t gamma = 0;            // gamma of the top-ranked file
  std::size_t review_len = 0;
};

/// Scores every file and keeps the best `top_k`.
inline LocalizationRanking rank_files(const TokenDoc& review, const std::vector<FilePair>& files, std::size_t top_k,
                                      std::optional<Timestamp> review_time, const DfTable& df) {
  if (files.empty()) throw ParameterError("cannot rank against an empty file index");
  const auto words = make_word_set(review.tokens);
  LocalizationRanking ranking;
  ranking.review_id = review.doc_id;
  ranking.review_len = words.size();
  ranking.entries.reserve(files.size());
  for (const auto& f : files) {
    const auto s = interpolated_sim(words, f, review_time, df);
    ranking.entries.push_back({f.path, s.score, s.gamma});
  }
  // Scores are compared on a 1e-12 grid so that rounding noise (e.g. from a
  // rescaled df table) cannot reorder files with mathematically equal scores.
  auto key = [](double score) { return std::llround(score * 1e12); };
  std::sort(ranking.entries.begin(), ranking.entries.end(), [&](const RankedFile& a, const RankedFile& b) {
    const auto ka = key(a.score), kb = key(b.score);
    if (ka != kb) return ka > kb;
    return a.path < b.path;
  });
  if (ranking.entries.size() > top_k) ranking.entries.resize(top_k);
  if (!ranking.entries.empty()) ranking.gamma = ranking.entries.front().gamma;
  return ranking;
}

inline nlohmann::json to_json(const LocalizationRanking& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) entries.push_back({{"path", e.path}, {"score", e.score}});
  return {{"review_id", r.review_id}, {"gamma", r.gamma}, {"L", r.review_len}, {"entries", entries}};
}

inline LocalizationRanking ranking_from_json(const nlohmann::json& j) {
  try {
    LocalizationRanking r;
    r.review_id = j.at("review_id").get<std::string>();
    r.gamma = j.at("gamma").get<std::size_t>();
    r.review_len = j.at("L").get<std::size_t>();
    for (const auto& e : j.at("entries")) {
      r.entries.push_back({e.at("path").get<std::string>(), e.at("score").get<double>(), 0});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed ranking: ") + e.what());
  }
}

}  // namespace reviewscope
