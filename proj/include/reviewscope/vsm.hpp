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
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "reviewscope/error.hpp"
#include "reviewscope/textproc.hpp"

namespace reviewscope {

/// Vocabulary with per-word total occurrence f_w and weight log(1 + f_w).
/// Words are kept in lexicographic order.
class DfTable {
 public:
  DfTable() = default;

  /// Builds the table from any range of token lists.
  template <typename Range, typename Proj>
  static DfTable from_documents(const Range& docs, Proj tokens_of) {
    std::map<std::string, long> counts;
    for (const auto& d : docs) {
      for (const auto& w : tokens_of(d)) ++counts[w];
    }
    DfTable t;
    for (auto& [w, f] : counts) {
      t.index_.emplace(w, t.vocab_.size());
      t.vocab_.push_back(w);
      t.occurrence_.push_back(f);
      t.df_.push_back(std::log1p(static_cast<double>(f)));
    }
    return t;
  }

  static DfTable from_token_lists(const std::vector<std::vector<std::string>>& docs) {
    return from_documents(docs, [](const auto& d) -> const auto& { return d; });
  }

  /// Table with explicitly given weights (occurrence counts are left at 0).
  static DfTable from_weights(const std::map<std::string, double>& weights) {
    DfTable t;
    for (const auto& [w, x] : weights) {
      t.index_.emplace(w, t.vocab_.size());
      t.vocab_.push_back(w);
      t.occurrence_.push_back(0);
      t.df_.push_back(x);
    }
    return t;
  }

  std::size_t size() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<long>& occurrence() const { return occurrence_; }
  const std::vector<double>& df() const { return df_; }

  std::optional<std::size_t> index_of(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& word) const { return index_.count(word) > 0; }

  /// df(w), or 0 = log(1 + 0) for a word outside the vocabulary.
  double weight(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? 0.0 : df_[it->second];
  }

  /// Copy with every weight multiplied by `c`.
  DfTable scaled(double c) const {
    DfTable t = *this;
    for (auto& v : t.df_) v *= c;
    return t;
  }

 private:
  std::vector<std::string> vocab_;
  std::vector<long> occurrence_;
  std::vector<double> df_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Rows are documents, columns are vocabulary words.
struct WordReviewMatrix {
  std::vector<std::string> doc_ids;
  std::vector<std::string> vocab;
  Eigen::SparseMatrix<int, Eigen::RowMajor> counts;  // WR
  Eigen::MatrixXd scaled;                             // R = WR * df, entrywise by column
};

inline std::pair<WordReviewMatrix, DfTable> build_matrix(const std::vector<TokenDoc>& docs) {
  if (docs.empty()) throw FormatError("cannot build a word-review matrix from zero documents");
  auto df = DfTable::from_documents(docs, [](const TokenDoc& d) -> const auto& { return d.tokens; });

  WordReviewMatrix m;
  m.vocab = df.vocab();
  const auto rows = static_cast<Eigen::Index>(docs.size());
  const auto cols = static_cast<Eigen::Index>(df.size());
  std::vector<Eigen::Triplet<int>> triplets;
  m.scaled = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& doc = docs[static_cast<std::size_t>(r)];
    m.doc_ids.push_back(doc.doc_id);
    std::unordered_map<std::size_t, int> row;
    for (const auto& w : doc.tokens) ++row[*df.index_of(w)];
    for (auto [c, n] : row) {
      if (n != 1) {
        throw FormatError("document " + doc.doc_id + " repeats token '" + df.vocab()[c] +
                          "'; tokens must be deduplicated before matrix construction");
      }
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(c), n);
      m.scaled(r, static_cast<Eigen::Index>(c)) = n * df.df()[c];
    }
  }
  m.counts.resize(rows, cols);
  m.counts.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(m), std::move(df)};
}

/// CSV dump: header "doc_id,<vocab...>", then one row of scaled weights per document.
inline std::string matrix_to_csv(const WordReviewMatrix& m) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "doc_id";
  for (const auto& w : m.vocab) out += "," + quote(w);
  out += "\n";
  char buf[32];
  for (Eigen::Index r = 0; r < m.scaled.rows(); ++r) {
    out += quote(m.doc_ids[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < m.scaled.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", m.scaled(r, c));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

struct FixedComponents {
  std::size_t r = 2;
};

struct VarianceFraction {
  double v = 0.95;
};

using PcaTarget = std::variant<FixedComponents, VarianceFraction>;

enum class PcaRoute { Svd, Covariance };

/// Documents projected onto the leading principal components.
struct ReducedDataSet {
  std::vector<std::string> doc_ids;
  Eigen::MatrixXd points;             // m x r
  Eigen::MatrixXd components;         // n x r, orthonormal columns
  Eigen::VectorXd explained_variance; // r, non-increasing
  Eigen::RowVectorXd mean;            // n
  double total_variance = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
};

namespace detail {

// Fixes each component's sign so that its largest-magnitude entry is positive.
inline void canonicalize_signs(Eigen::MatrixXd& components) {
  for (Eigen::Index j = 0; j < components.cols(); ++j) {
    Eigen::Index arg = 0;
    components.col(j).cwiseAbs().maxCoeff(&arg);
    if (components(arg, j) < 0) components.col(j) *= -1.0;
  }
}

}  // namespace detail

/// Principal component analysis of the rows of `data` (mean-centered first).
inline ReducedDataSet pca_reduce(const Eigen::MatrixXd& data, const std::vector<std::string>& doc_ids,
                                 const PcaTarget& target, PcaRoute route = PcaRoute::Svd,
                                 Diagnostics* diag = nullptr) {
  const auto m = data.rows();
  const auto n = data.cols();
  if (m < 2) throw ParameterError("PCA needs at least two rows");
  if (n < 1) throw ParameterError("PCA needs at least one column");

  ReducedDataSet out;
  out.doc_ids = doc_ids;
  out.mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - out.mean;
  const auto max_r = std::min(m, n);

  Eigen::MatrixXd basis;    // n x max_r
  Eigen::VectorXd variance; // max_r
  if (route == PcaRoute::Svd) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    basis = svd.matrixV().leftCols(max_r);
    variance = svd.singularValues().head(max_r).array().square() / static_cast<double>(m - 1);
  } else {
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    // Eigen returns ascending eigenvalues.
    basis = eig.eigenvectors().rowwise().reverse().leftCols(max_r);
    variance = eig.eigenvalues().reverse().head(max_r).cwiseMax(0.0);
  }
  detail::canonicalize_signs(basis);
  out.total_variance = variance.sum();

  if (!(out.total_variance > 1e-12 * std::max(1.0, data.cwiseAbs().maxCoeff()))) {
    warn(diag, "PCA input has zero variance; returning a single zero coordinate");
    out.components = basis.leftCols(1);
    out.explained_variance = Eigen::VectorXd::Zero(1);
    out.points = Eigen::MatrixXd::Zero(m, 1);
    out.total_variance = 0.0;
    return out;
  }

  Eigen::Index r = 0;
  if (const auto* fixed = std::get_if<FixedComponents>(&target)) {
    if (fixed->r < 1) throw ParameterError("PCA component count must be positive");
    r = static_cast<Eigen::Index>(fixed->r);
    if (r > max_r) {
      warn(diag, "PCA component count " + std::to_string(r) + " clamped to " + std::to_string(max_r));
      r = max_r;
    }
  } else {
    const double v = std::get<VarianceFraction>(target).v;
    if (!(v > 0.0 && v <= 1.0)) throw ParameterError("PCA variance fraction must be in (0, 1]");
    const double goal = v * out.total_variance - 1e-12 * out.total_variance;
    double cumulative = 0.0;
    for (r = 0; r < max_r;) {
      cumulative += variance(r++);
      if (cumulative >= goal) break;
    }
  }

  out.components = basis.leftCols(r);
  out.explained_variance = variance.head(r);
  out.points = centered * out.components;
  return out;
}

inline ReducedDataSet pca_reduce(const WordReviewMatrix& matrix, const PcaTarget& target,
                                 PcaRoute route = PcaRoute::Svd, Diagnostics* diag = nullptr) {
  return pca_reduce(matrix.scaled, matrix.doc_ids, target, route, diag);
}

/// Squared Frobenius error of reconstructing `data` from its projection.
inline double reconstruction_error(const Eigen::MatrixXd& data, const ReducedDataSet& reduced) {
  const Eigen::MatrixXd centered = data.rowwise() - reduced.mean;
  const Eigen::MatrixXd approx = reduced.points * reduced.components.transpose();
  return (centered - approx).squaredNorm();
}

}  // namespace reviewscope
