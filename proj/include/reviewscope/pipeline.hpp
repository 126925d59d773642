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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "reviewscope/clustering.hpp"
#include "reviewscope/config.hpp"
#include "reviewscope/evaluation.hpp"
#include "reviewscope/localization.hpp"
#include "reviewscope/review_ingest.hpp"
#include "reviewscope/segmentation.hpp"
#include "reviewscope/textproc.hpp"
#include "reviewscope/vsm.hpp"

namespace reviewscope {

inline constexpr Category kClusteredCategories[] = {Category::FeatureRequest, Category::ProblemDiscovery};

/// Artifact file names inside the output directory.
struct ArtifactPaths {
  std::filesystem::path dir;

  std::filesystem::path docs(Category c) const { return dir / ("docs_" + std::string(to_string(c)) + ".jsonl"); }
  std::filesystem::path clusters(Category c) const { return dir / ("clusters_" + std::string(to_string(c)) + ".json"); }
  std::filesystem::path matrix(Category c) const { return dir / ("matrix_" + std::string(to_string(c)) + ".csv"); }
  std::filesystem::path cluster_summary() const { return dir / "cluster_summary.json"; }
  std::filesystem::path rankings() const { return dir / "rankings.json"; }
  std::filesystem::path report() const { return dir / "report.json"; }
  std::filesystem::path manifest(std::string_view command) const {
    return dir / ("manifest_" + std::string(command) + ".json");
  }
};

inline TextNormalizer build_normalizer(const PipelineConfig& config) {
  LemmaDict lemmas;
  if (!config.paths.lemmas.empty()) lemmas = load_lemma_dict(config.paths.lemmas);
  StopwordList stopwords = config.paths.stopwords.empty()
                               ? StopwordList(default_stopwords().begin(), default_stopwords().end())
                               : load_stopwords(config.paths.stopwords);
  AcronymTable acronyms = config.paths.acronyms.empty() ? default_acronyms() : load_acronyms(config.paths.acronyms);
  if (!config.paths.strings_resource.empty()) {
    whitelist_gui_words(stopwords, extract_string_literals(io::read_file(config.paths.strings_resource)));
  }
  return TextNormalizer(std::move(lemmas), std::move(stopwords), std::move(acronyms));
}

inline SegmenterConfig build_segmenter(const PipelineConfig& config) {
  SegmenterConfig s;
  s.copulative = config.copulative;
  s.adversative = config.adversative;
  if (!config.paths.verb_lexicon.empty()) s.verbs = load_verb_lexicon(config.paths.verb_lexicon);
  return s;
}

inline nlohmann::json to_json(const TokenDoc& d) {
  return {{"doc_id", d.doc_id},
          {"review_id", d.review_id},
          {"category", to_string(d.category)},
          {"text", d.text},
          {"tokens", d.tokens},
          {"timestamp", d.timestamp ? nlohmann::json(format_rfc3339(*d.timestamp)) : nlohmann::json(nullptr)}};
}

inline TokenDoc token_doc_from_json(const nlohmann::json& j) {
  try {
    TokenDoc d;
    d.doc_id = j.at("doc_id").get<std::string>();
    d.review_id = j.at("review_id").get<std::string>();
    auto c = category_from_string(j.at("category").get<std::string>());
    if (!c) throw FormatError("unknown category in token document " + d.doc_id);
    d.category = *c;
    d.text = j.value("text", "");
    d.tokens = j.at("tokens").get<std::vector<std::string>>();
    if (auto it = j.find("timestamp"); it != j.end() && !it->is_null()) {
      d.timestamp = parse_rfc3339(it->get<std::string>());
      if (!d.timestamp) throw FormatError("bad timestamp in token document " + d.doc_id);
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed token document: ") + e.what());
  }
}

inline std::vector<TokenDoc> read_token_docs(const std::filesystem::path& path) {
  std::vector<TokenDoc> docs;
  for (const auto& line : io::read_lines(path)) {
    if (io::trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw FormatError("malformed line in " + path.string());
    docs.push_back(token_doc_from_json(j));
  }
  return docs;
}

inline void write_manifest(const PipelineConfig& config, std::string_view command,
                           const std::vector<std::filesystem::path>& artifacts) {
  const ArtifactPaths out{config.paths.output_dir};
  nlohmann::json files = nlohmann::json::array();
  for (const auto& a : artifacts) files.push_back(a.filename().string());
  nlohmann::json j{{"command", command}, {"seed", config.seed}, {"artifacts", files}};
  io::write_atomic(out.manifest(command), j.dump(2) + "\n");
}

struct PreprocessResult {
  std::map<Category, std::vector<TokenDoc>> docs;
  std::size_t reviews_loaded = 0;
  std::size_t reviews_skipped = 0;
  std::size_t reviews_kept = 0;
  std::size_t atomic_sentences = 0;
};

/// ingest -> filter -> segment -> normalize -> drop short, split by category.
inline PreprocessResult preprocess(const std::vector<Review>& reviews, const PipelineConfig& config,
                                   Diagnostics* diag = nullptr) {
  PreprocessResult result;
  result.reviews_loaded = reviews.size();
  const auto filtered = filter_informative(reviews, {config.fallback_classifier, config.cues});
  if (filtered.dropped_unlabeled > 0) {
    warn(diag, std::to_string(filtered.dropped_unlabeled) + " unlabeled reviews dropped (fallback classifier off)");
  }
  result.reviews_kept = filtered.reviews.size();
  const auto segmenter = build_segmenter(config);
  const auto normalizer = build_normalizer(config);
  std::vector<TokenDoc> docs;
  for (const auto& review : filtered.reviews) {
    for (const auto& sentence : segment_review(review, segmenter)) {
      ++result.atomic_sentences;
      docs.push_back(make_token_doc(sentence, normalizer));
    }
  }
  for (auto& d : drop_short(std::move(docs))) result.docs[d.category].push_back(std::move(d));
  return result;
}

inline PreprocessResult cmd_preprocess(const PipelineConfig& config, Diagnostics* diag = nullptr) {
  if (config.paths.reviews.empty()) throw ConfigError("preprocess needs paths.reviews");
  auto loaded = load_reviews(config.paths.reviews);
  if (loaded.skipped > 0) warn(diag, std::to_string(loaded.skipped) + " malformed review lines skipped");
  auto result = preprocess(loaded.reviews, config, diag);
  result.reviews_skipped = loaded.skipped;

  std::size_t total = 0;
  for (const auto& [c, docs] : result.docs) total += docs.size();
  if (total == 0) throw FormatError("preprocessing produced no documents");

  const ArtifactPaths out{config.paths.output_dir};
  std::vector<std::filesystem::path> written;
  for (auto category : kClusteredCategories) {
    std::string body;
    if (auto it = result.docs.find(category); it != result.docs.end()) {
      for (const auto& d : it->second) body += to_json(d).dump() + "\n";
    }
    io::write_atomic(out.docs(category), body);
    written.push_back(out.docs(category));
  }
  write_manifest(config, "preprocess", written);
  return result;
}

inline ConstraintSet load_constraints(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
  if (!j.is_object()) throw FormatError("constraints file must be a JSON object: " + path.string());
  ConstraintSet set;
  auto read = [&](const char* key, bool must) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array()) throw FormatError(std::string("constraints '") + key + "' must be a list of pairs");
    for (const auto& pair : *it) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        throw FormatError(std::string("constraints '") + key + "' entries must be [id, id]");
      }
      if (must) {
        set.add_must(pair[0].get<std::string>(), pair[1].get<std::string>());
      } else {
        set.add_cannot(pair[0].get<std::string>(), pair[1].get<std::string>());
      }
    }
  };
  read("must", true);
  read("cannot", false);
  return set;
}

/// Keeps the constraints whose both ends are among `ids`. Cross-category
/// must-links cannot be honoured and are reported.
inline ConstraintSet restrict_constraints(const ConstraintSet& all, const std::set<std::string>& ids,
                                          Diagnostics* diag = nullptr) {
  ConstraintSet out;
  std::size_t dropped_must = 0;
  for (const auto& p : all.must) {
    const bool a = ids.count(p.first) > 0, b = ids.count(p.second) > 0;
    if (a && b) {
      out.must.insert(p);
    } else if (a != b) {
      ++dropped_must;
    }
  }
  for (const auto& p : all.cannot) {
    if (ids.count(p.first) && ids.count(p.second)) out.cannot.insert(p);
  }
  if (dropped_must > 0) warn(diag, std::to_string(dropped_must) + " must-links cross a category boundary and were ignored");
  return out;
}

struct CategoryClusters {
  Category category = Category::Unlabeled;
  ReducedDataSet data;
  ClusterAssignment assignment;
  bool k_inferred = false;
  std::optional<double> dbi;
};

/// Seed of the i-th independent initialization (i = 0 is the master seed).
inline std::uint64_t init_seed(std::uint64_t seed, std::size_t i) {
  return i == 0 ? seed : derive_seed(seed ^ 0xD1B54A32D192ED03ULL, i);
}

/// Runs COP-Kmeans from `n_init` seeds and keeps the lowest within-cluster
/// sum of squares. Infeasible seeds are skipped; if all fail the last error
/// propagates.
inline ClusterAssignment best_of_cop_kmeans(const ReducedDataSet& data, const ConstraintSet& constraints,
                                            CopKmeansOptions options, std::size_t n_init) {
  std::optional<ClusterAssignment> best;
  std::optional<InfeasibleAssignment> last_error;
  const auto master = options.seed;
  for (std::size_t i = 0; i < std::max<std::size_t>(1, n_init); ++i) {
    options.seed = init_seed(master, i);
    try {
      auto a = cop_kmeans(data, constraints, options);
      if (!best || a.objective_trace.back() < best->objective_trace.back()) best = std::move(a);
    } catch (const InfeasibleAssignment& e) {
      last_error = e;
    }
  }
  if (!best) throw *last_error;
  return *best;
}

inline CategoryClusters cluster_documents(const std::vector<TokenDoc>& docs, const ConstraintSet& raw_constraints,
                                          const PipelineConfig& config, Diagnostics* diag = nullptr) {
  if (docs.size() < 2) throw ParameterError("clustering needs at least two documents");
  CategoryClusters out;
  out.category = docs.front().category;
  auto [matrix, df] = build_matrix(docs);
  out.data = pca_reduce(matrix, config.pca, PcaRoute::Svd, diag);

  const auto constraints = close_constraints(raw_constraints);
  std::size_t k = 0;
  if (config.k) {
    k = *config.k;
    if (k > docs.size()) {
      warn(diag, "k=" + std::to_string(k) + " clamped to " + std::to_string(docs.size()) + " documents");
      k = docs.size();
    }
  } else {
    k = infer_k(docs, config.shared_word_rule, diag);
    out.k_inferred = true;
  }
  out.assignment = best_of_cop_kmeans(out.data, constraints, {k, config.seed, config.max_iter, config.restarts},
                                      config.n_init);
  if (k >= 2) {
    try {
      out.dbi = dbi(out.data, out.assignment);
    } catch (const ParameterError& e) {
      warn(diag, std::string("DBI unavailable: ") + e.what());
    }
  }
  return out;
}

inline std::vector<CategoryClusters> cmd_cluster(const PipelineConfig& config, Diagnostics* diag = nullptr) {
  const ArtifactPaths out{config.paths.output_dir};
  ConstraintSet all;
  if (!config.paths.constraints.empty()) {
    if (std::filesystem::exists(config.paths.constraints)) {
      all = load_constraints(config.paths.constraints);
    } else {
      warn(diag, "constraints file " + config.paths.constraints.string() + " not found; clustering unconstrained");
    }
  }

  std::map<Category, std::vector<TokenDoc>> by_category;
  std::set<std::string> known;
  for (auto category : kClusteredCategories) {
    if (!std::filesystem::exists(out.docs(category))) {
      throw IoError("missing preprocess output " + out.docs(category).string() + "; run preprocess first");
    }
    by_category[category] = read_token_docs(out.docs(category));
    for (const auto& d : by_category[category]) known.insert(d.doc_id);
  }
  std::size_t unknown = 0;
  for (const auto* pairs : {&all.must, &all.cannot}) {
    for (const auto& p : *pairs) unknown += !known.count(p.first) || !known.count(p.second);
  }
  if (unknown > 0) warn(diag, std::to_string(unknown) + " constraints name unknown documents and were ignored");

  std::vector<CategoryClusters> results;
  std::vector<std::filesystem::path> written;
  nlohmann::json summary{{"seed", config.seed}, {"categories", nlohmann::json::object()}};
  for (auto category : kClusteredCategories) {
    const auto& docs = by_category[category];
    if (docs.size() < 2) {
      warn(diag, std::string(to_string(category)) + ": fewer than two documents, not clustered");
      continue;
    }
    std::set<std::string> ids;
    for (const auto& d : docs) ids.insert(d.doc_id);
    auto result = cluster_documents(docs, restrict_constraints(all, ids, diag), config, diag);

    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < docs.size(); ++i) {
      list.push_back({{"doc_id", docs[i].doc_id}, {"cluster", result.assignment.labels[i]}, {"text", docs[i].text}});
    }
    io::write_atomic(out.clusters(category), list.dump(2) + "\n");
    written.push_back(out.clusters(category));
    if (config.dump_matrix) {
      io::write_atomic(out.matrix(category), matrix_to_csv(build_matrix(docs).first));
      written.push_back(out.matrix(category));
    }
    const double total = result.data.total_variance;
    summary["categories"][std::string(to_string(category))] = {
        {"documents", docs.size()},
        {"k", result.assignment.k},
        {"k_inferred", result.k_inferred},
        {"pca_components", result.data.dim()},
        {"explained_variance_ratio", total > 0 ? result.data.explained_variance.sum() / total : 0.0},
        {"iterations", result.assignment.iterations},
        {"seed_used", result.assignment.seed},
        {"dbi", result.dbi ? nlohmann::json(*result.dbi) : nlohmann::json(nullptr)}};
    results.push_back(std::move(result));
  }
  io::write_atomic(out.cluster_summary(), summary.dump(2) + "\n");
  written.push_back(out.cluster_summary());
  write_manifest(config, "cluster", written);
  return results;
}

/// Merges the atomic sentences of each review into one document.
inline std::vector<TokenDoc> merge_by_review(const std::vector<TokenDoc>& docs) {
  std::vector<TokenDoc> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& d : docs) {
    auto [it, inserted] = index.emplace(d.review_id, out.size());
    if (inserted) {
      TokenDoc merged = d;
      merged.doc_id = d.review_id;
      out.push_back(std::move(merged));
      continue;
    }
    auto& m = out[it->second];
    for (const auto& t : d.tokens) {
      if (std::find(m.tokens.begin(), m.tokens.end(), t) == m.tokens.end()) m.tokens.push_back(t);
    }
    m.text += " " + d.text;
  }
  return out;
}

inline std::vector<LocalizationRanking> localize(const std::vector<TokenDoc>& reviews, const std::vector<FilePair>& files,
                                                 std::size_t depth) {
  if (files.empty()) throw FormatError("the file index is empty");
  const auto df = build_localization_df(reviews, files);
  std::vector<LocalizationRanking> out;
  out.reserve(reviews.size());
  for (const auto& r : reviews) out.push_back(rank_files(r, files, depth, r.timestamp, df));
  return out;
}

inline std::vector<LocalizationRanking> cmd_localize(const PipelineConfig& config, Diagnostics* diag = nullptr) {
  if (config.paths.commits.empty() || config.paths.source_tree.empty()) {
    throw ConfigError("localize needs paths.commits and paths.source_tree");
  }
  const ArtifactPaths out{config.paths.output_dir};
  std::vector<TokenDoc> docs;
  for (auto category : kClusteredCategories) {
    if (!std::filesystem::exists(out.docs(category))) {
      throw IoError("missing preprocess output " + out.docs(category).string() + "; run preprocess first");
    }
    auto part = read_token_docs(out.docs(category));
    docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  if (config.unit == LocalizeUnit::Review) docs = merge_by_review(docs);

  const auto normalizer = build_normalizer(config);
  auto commits = load_commits(config.paths.commits, config.non_source_suffixes);
  if (commits.skipped_malformed > 0) warn(diag, std::to_string(commits.skipped_malformed) + " malformed commit lines skipped");
  const auto tagged = tag_files(commits.commits, config.paths.source_tree, normalizer, config.source_suffixes,
                                config.extraction, diag);
  auto rankings = localize(docs, tagged.files, config.ranking_depth());

  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : rankings) list.push_back(to_json(r));
  io::write_atomic(out.rankings(), list.dump(2) + "\n");
  write_manifest(config, "localize", {out.rankings()});
  return rankings;
}

inline std::vector<LocalizationRanking> read_rankings(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
  if (!j.is_array()) throw FormatError("rankings file must hold a JSON list: " + path.string());
  std::vector<LocalizationRanking> out;
  for (const auto& r : j) out.push_back(ranking_from_json(r));
  return out;
}

inline EvalReport cmd_evaluate(const PipelineConfig& config, Diagnostics* diag = nullptr) {
  if (config.paths.ground_truth.empty()) throw ConfigError("evaluate needs paths.ground_truth");
  const ArtifactPaths out{config.paths.output_dir};
  const auto rankings = read_rankings(out.rankings());
  const auto truth = load_ground_truth(config.paths.ground_truth);
  auto report = evaluate_rankings(rankings, truth, config.top_k, diag);
  if (std::filesystem::exists(out.cluster_summary())) {
    auto summary = nlohmann::json::parse(io::read_file(out.cluster_summary()), nullptr, false);
    if (summary.is_object() && summary.contains("categories")) {
      for (const auto& [category, info] : summary["categories"].items()) {
        if (info.contains("dbi") && info["dbi"].is_number()) report.dbi[category] = info["dbi"].get<double>();
      }
    }
  }
  auto j = to_json(report);
  j["seed"] = config.seed;
  io::write_atomic(out.report(), j.dump(2) + "\n");
  write_manifest(config, "evaluate", {out.report()});
  return report;
}

}  // namespace reviewscope
