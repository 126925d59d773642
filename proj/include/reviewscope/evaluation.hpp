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
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "reviewscope/clustering.hpp"
#include "reviewscope/error.hpp"
#include "reviewscope/io.hpp"
#include "reviewscope/localization.hpp"

namespace reviewscope {

/// Relevant file paths per review id.
using GroundTruth = std::map<std::string, std::set<std::string>>;

inline GroundTruth parse_ground_truth(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("ground truth must be a JSON object of review_id -> [path, ...]");
  GroundTruth truth;
  for (const auto& [id, paths] : j.items()) {
    if (!paths.is_array() || paths.empty()) throw FormatError("ground truth for " + id + " must be a non-empty list");
    auto& set = truth[id];
    for (const auto& p : paths) {
      if (!p.is_string() || p.get<std::string>().empty()) {
        throw FormatError("ground truth for " + id + " contains a non-string or empty path");
      }
      set.insert(p.get<std::string>());
    }
  }
  return truth;
}

inline GroundTruth load_ground_truth(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded()) throw FormatError("ground truth is not valid JSON: " + path.string());
  return parse_ground_truth(j);
}

/// Davies-Bouldin index. Scatter S_i is the RMS distance of a cluster's
/// points to its centroid, separation M_ij the distance between centroids;
/// DBI is the mean over clusters of max_{j != i} (S_i + S_j) / M_ij.
inline double dbi(const Eigen::MatrixXd& points, const std::vector<std::size_t>& labels, std::size_t k) {
  if (k < 2) throw ParameterError("DBI needs at least two clusters");
  if (labels.size() != static_cast<std::size_t>(points.rows())) throw ParameterError("label count does not match points");

  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), points.cols());
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) throw ParameterError("label out of range");
    centroids.row(static_cast<Eigen::Index>(labels[i])) += points.row(static_cast<Eigen::Index>(i));
    ++sizes[labels[i]];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (sizes[j] == 0) throw ParameterError("cluster " + std::to_string(j) + " is empty");
    centroids.row(static_cast<Eigen::Index>(j)) /= static_cast<double>(sizes[j]);
  }
  std::vector<double> scatter(k, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    scatter[labels[i]] += (points.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(labels[i]))).squaredNorm();
  }
  for (std::size_t j = 0; j < k; ++j) scatter[j] = std::sqrt(scatter[j] / static_cast<double>(sizes[j]));

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      const double sep = (centroids.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(j))).norm();
      if (sep == 0.0) {
        throw ParameterError("clusters " + std::to_string(std::min(i, j)) + " and " + std::to_string(std::max(i, j)) +
                             " have coincident centroids");
      }
      worst = std::max(worst, (scatter[i] + scatter[j]) / sep);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

inline double dbi(const ReducedDataSet& data, const ClusterAssignment& assignment) {
  return dbi(data.points, assignment.labels, assignment.k);
}

/// 1 if any of the first k entries is relevant.
inline bool hit_at_k(const LocalizationRanking& ranking, const std::set<std::string>& relevant, std::size_t k) {
  const auto n = std::min(k, ranking.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (relevant.count(ranking.entries[i].path)) return true;
  }
  return false;
}

/// Fraction of reviews with a relevant file among their first k entries.
inline double top_k_accuracy(const std::vector<LocalizationRanking>& rankings, const GroundTruth& truth, std::size_t k) {
  if (k < 1) throw ParameterError("top-k needs k >= 1");
  if (rankings.empty()) throw ParameterError("top-k accuracy over zero rankings");
  std::size_t hits = 0;
  for (const auto& r : rankings) {
    auto it = truth.find(r.review_id);
    if (it == truth.end()) throw ParameterError("no ground truth for review " + r.review_id);
    hits += hit_at_k(r, it->second, k) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

/// DCG of a binary relevance vector, positions counted from 1.
inline double dcg(const std::vector<int>& relevance) {
  double total = 0.0;
  for (std::size_t i = 0; i < relevance.size(); ++i) {
    total += relevance[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  return total;
}

/// NDCG@k with the ideal ordering taken as the observed top-k relevance
/// vector with its hits moved to the front. 0 when nothing relevant is found.
inline double ndcg_at_k(const LocalizationRanking& ranking, const std::set<std::string>& relevant, std::size_t k) {
  if (k < 1) throw ParameterError("NDCG needs k >= 1");
  std::vector<int> rel;
  for (std::size_t i = 0; i < std::min(k, ranking.entries.size()); ++i) {
    rel.push_back(relevant.count(ranking.entries[i].path) ? 1 : 0);
  }
  auto ideal = rel;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg(ideal);
  return idcg == 0.0 ? 0.0 : dcg(rel) / idcg;
}

struct EvalRow {
  std::string review_id;
  std::optional<std::size_t> first_hit;  // 1-based rank of the first relevant entry
  std::map<std::size_t, double> ndcg;
};

struct EvalReport {
  std::map<std::string, double> dbi;  // per clustered category
  std::map<std::size_t, double> top_k;
  std::map<std::size_t, double> ndcg;
  std::vector<EvalRow> rows;
  std::vector<std::string> excluded;  // rankings with no ground truth
};

/// Matches a ranking to its ground truth, first by its own id, then by the
/// review id part of an atomic-sentence id ("review#seq").
inline const std::set<std::string>* find_truth(const GroundTruth& truth, const std::string& id) {
  if (auto it = truth.find(id); it != truth.end()) return &it->second;
  if (auto hash = id.rfind('#'); hash != std::string::npos) {
    if (auto it = truth.find(id.substr(0, hash)); it != truth.end()) return &it->second;
  }
  return nullptr;
}

inline EvalReport evaluate_rankings(const std::vector<LocalizationRanking>& rankings, const GroundTruth& truth,
                                    const std::vector<std::size_t>& ks, Diagnostics* diag = nullptr) {
  EvalReport report;
  std::vector<LocalizationRanking> kept;
  GroundTruth matched;
  for (const auto& r : rankings) {
    const auto* relevant = find_truth(truth, r.review_id);
    if (!relevant) {
      report.excluded.push_back(r.review_id);
      warn(diag, "no ground truth for " + r.review_id + "; excluded");
      continue;
    }
    kept.push_back(r);
    matched[r.review_id] = *relevant;
  }
  if (kept.empty()) throw FormatError("no ranking has ground truth");
  for (auto k : ks) {
    report.top_k[k] = top_k_accuracy(kept, matched, k);
    double sum = 0.0;
    for (const auto& r : kept) sum += ndcg_at_k(r, matched.at(r.review_id), k);
    report.ndcg[k] = sum / static_cast<double>(kept.size());
  }
  for (const auto& r : kept) {
    EvalRow row;
    row.review_id = r.review_id;
    const auto& rel = matched.at(r.review_id);
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      if (rel.count(r.entries[i].path)) {
        row.first_hit = i + 1;
        break;
      }
    }
    for (auto k : ks) row.ndcg[k] = ndcg_at_k(r, rel, k);
    report.rows.push_back(std::move(row));
  }
  return report;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["dbi"] = r.dbi.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.dbi);
  nlohmann::json top = nlohmann::json::object(), ndcg = nlohmann::json::object();
  for (auto [k, v] : r.top_k) top[std::to_string(k)] = v;
  for (auto [k, v] : r.ndcg) ndcg[std::to_string(k)] = v;
  j["top_k"] = top;
  j["ndcg"] = ndcg;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json n = nlohmann::json::object();
    for (auto [k, v] : row.ndcg) n[std::to_string(k)] = v;
    rows.push_back({{"review_id", row.review_id},
                    {"first_hit", row.first_hit ? nlohmann::json(*row.first_hit) : nlohmann::json(nullptr)},
                    {"ndcg", n}});
  }
  j["reviews"] = rows;
  j["excluded"] = r.excluded;
  return j;
}

inline std::string format_table(const EvalReport& r) {
  std::string out;
  char buf[128];
  for (const auto& [category, value] : r.dbi) {
    std::snprintf(buf, sizeof buf, "DBI %-20s %.4f\n", category.c_str(), value);
    out += buf;
  }
  out += "k     Top-k     NDCG@k\n";
  for (auto [k, v] : r.top_k) {
    std::snprintf(buf, sizeof buf, "%-5zu %-9.4f %.4f\n", k, v, r.ndcg.at(k));
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "reviews evaluated: %zu, excluded: %zu\n", r.rows.size(), r.excluded.size());
  out += buf;
  return out;
}

}  // namespace reviewscope
