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
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "reviewscope/error.hpp"
#include "reviewscope/textproc.hpp"
#include "reviewscope/vsm.hpp"

namespace reviewscope {

/// Unordered pair of document ids, stored with first < second.
using IdPair = std::pair<std::string, std::string>;

inline IdPair make_pair_key(const std::string& a, const std::string& b) {
  return a < b ? IdPair{a, b} : IdPair{b, a};
}

struct ConstraintSet {
  std::set<IdPair> must;
  std::set<IdPair> cannot;

  void add_must(const std::string& a, const std::string& b) { must.insert(checked(a, b)); }
  void add_cannot(const std::string& a, const std::string& b) { cannot.insert(checked(a, b)); }

  bool empty() const { return must.empty() && cannot.empty(); }

  /// Every id mentioned by either relation.
  std::set<std::string> ids() const {
    std::set<std::string> out;
    for (const auto* rel : {&must, &cannot}) {
      for (const auto& [a, b] : *rel) {
        out.insert(a);
        out.insert(b);
      }
    }
    return out;
  }

 private:
  static IdPair checked(const std::string& a, const std::string& b) {
    if (a == b) throw ConstraintError(a, b, "self-pair constraint on " + a);
    return make_pair_key(a, b);
  }
};

namespace detail {

class UnionFind {
 public:
  std::size_t add(const std::string& id) {
    auto [it, inserted] = index_.emplace(id, parent_.size());
    if (inserted) {
      parent_.push_back(parent_.size());
      ids_.push_back(id);
    }
    return it->second;
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  std::size_t size() const { return parent_.size(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> parent_;
  std::vector<std::string> ids_;
};

}  // namespace detail

/// Transitive closure of must-links, with cannot-links lifted to whole
/// must-link components: a ~ b and b !~ c imply a !~ c.
inline ConstraintSet close_constraints(const ConstraintSet& raw) {
  for (const auto& p : raw.must) {
    if (raw.cannot.count(p)) {
      throw ConstraintError(p.first, p.second,
                            "pair (" + p.first + ", " + p.second + ") is both must-link and cannot-link");
    }
  }

  detail::UnionFind uf;
  for (const auto& id : raw.ids()) uf.add(id);
  for (const auto& [a, b] : raw.must) uf.unite(uf.add(a), uf.add(b));

  std::map<std::size_t, std::vector<std::string>> components;
  for (std::size_t i = 0; i < uf.size(); ++i) components[uf.find(i)].push_back(uf.id(i));
  for (auto& [root, members] : components) std::sort(members.begin(), members.end());

  ConstraintSet closed;
  for (const auto& [root, members] : components) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) closed.must.emplace(members[i], members[j]);
    }
  }
  for (const auto& [a, b] : raw.cannot) {
    const auto ra = uf.find(uf.add(a));
    const auto rb = uf.find(uf.add(b));
    if (ra == rb) {
      throw ConstraintError(a, b,
                            "cannot-link (" + a + ", " + b + ") joins two documents of one must-link group");
    }
    for (const auto& x : components[ra]) {
      for (const auto& y : components[rb]) closed.cannot.insert(make_pair_key(x, y));
    }
  }
  return closed;
}

/// What "two phrases share word information" means when pruning bigrams.
enum class SharedWordRule {
  AnyWord,       // the phrases have at least one word in common
  SameWordSet,   // the phrases consist of the same words
};

struct Bigram {
  std::string first;   // first <= second
  std::string second;
  long count = 0;
};

/// Bigram phrases left after merging, shared-word pruning and dropping
/// phrases seen once. Sorted by count descending, then lexicographically.
inline std::vector<Bigram> surviving_bigrams(const std::vector<TokenDoc>& docs,
                                             SharedWordRule rule = SharedWordRule::AnyWord) {
  std::map<IdPair, long> counts;
  for (const auto& d : docs) {
    for (std::size_t i = 0; i + 1 < d.tokens.size(); ++i) {
      ++counts[make_pair_key(d.tokens[i], d.tokens[i + 1])];
    }
  }
  std::vector<Bigram> ordered;
  for (const auto& [p, c] : counts) ordered.push_back({p.first, p.second, c});
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Bigram& a, const Bigram& b) { return a.count > b.count; });

  // A phrase survives unless a more frequent (or equally frequent and
  // lexicographically earlier) survivor shares words with it.
  auto shares = [rule](const Bigram& a, const Bigram& b) {
    if (rule == SharedWordRule::SameWordSet) return a.first == b.first && a.second == b.second;
    return a.first == b.first || a.first == b.second || a.second == b.first || a.second == b.second;
  };
  std::vector<Bigram> kept;
  for (const auto& g : ordered) {
    if (std::none_of(kept.begin(), kept.end(), [&](const Bigram& k) { return shares(k, g); })) {
      kept.push_back(g);
    }
  }
  std::erase_if(kept, [](const Bigram& g) { return g.count <= 1; });
  return kept;
}

/// Cluster count from the surviving bigram phrases, clamped to [2, m - 1]
/// (and never above m).
inline std::size_t infer_k(const std::vector<TokenDoc>& docs, SharedWordRule rule = SharedWordRule::AnyWord,
                           Diagnostics* diag = nullptr) {
  if (docs.empty()) throw ParameterError("infer_k needs at least one document");
  const std::size_t m = docs.size();
  const std::size_t raw = surviving_bigrams(docs, rule).size();
  const std::size_t lo = std::min<std::size_t>(2, m);
  const std::size_t hi = std::max(lo, m - 1);
  const std::size_t k = std::clamp(raw, lo, hi);
  if (k != raw) {
    warn(diag, "inferred K=" + std::to_string(raw) + " clamped to " + std::to_string(k) + " for " +
                   std::to_string(m) + " documents");
  }
  return k;
}

struct CopKmeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 42;
  std::size_t max_iter = 100;
  std::size_t restarts = 10;
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> labels;
  Eigen::MatrixXd centroids;  // k x r
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::vector<double> objective_trace;  // within-cluster sum of squares per iteration
};

/// k distinct row indices drawn uniformly (partial Fisher-Yates).
inline std::vector<std::size_t> sample_initial_centers(std::size_t m, std::size_t k, std::uint64_t seed) {
  if (k > m) throw ParameterError("cannot sample " + std::to_string(k) + " centers from " + std::to_string(m) + " points");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

/// Seed for restart `attempt` (attempt 0 uses the caller's seed).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t attempt) {
  if (attempt == 0) return seed;
  std::uint64_t z = seed + attempt * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double within_cluster_ss(const Eigen::MatrixXd& points, const std::vector<std::size_t>& labels,
                                const Eigen::MatrixXd& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centroids.row(static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]))).squaredNorm();
  }
  return total;
}

/// Moves the centroid of every empty cluster onto the point farthest from its
/// nearest centroid. Returns true if any cluster was empty.
inline bool repair_empty_clusters(const Eigen::MatrixXd& points, Eigen::MatrixXd& centroids,
                                  const std::vector<std::size_t>& sizes) {
  std::vector<bool> live(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) live[j] = sizes[j] > 0;
  bool repaired = false;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (live[j]) continue;
    repaired = true;
    Eigen::Index farthest = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (!live[c]) continue;
        nearest = std::min(nearest, (points.row(i) - centroids.row(static_cast<Eigen::Index>(c))).squaredNorm());
      }
      if (nearest > best) {
        best = nearest;
        farthest = i;
      }
    }
    centroids.row(static_cast<Eigen::Index>(j)) = points.row(farthest);
    live[j] = true;
  }
  return repaired;
}

namespace detail {

struct IndexedConstraints {
  std::vector<std::vector<std::size_t>> must;
  std::vector<std::vector<std::size_t>> cannot;
};

inline IndexedConstraints index_constraints(const std::vector<std::string>& doc_ids,
                                            const ConstraintSet& constraints) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < doc_ids.size(); ++i) index.emplace(doc_ids[i], i);
  auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw ParameterError("constraint references unknown document " + id);
    return it->second;
  };
  IndexedConstraints ic;
  ic.must.resize(doc_ids.size());
  ic.cannot.resize(doc_ids.size());
  for (const auto& [a, b] : constraints.must) {
    const auto i = lookup(a), j = lookup(b);
    ic.must[i].push_back(j);
    ic.must[j].push_back(i);
  }
  for (const auto& [a, b] : constraints.cannot) {
    const auto i = lookup(a), j = lookup(b);
    ic.cannot[i].push_back(j);
    ic.cannot[j].push_back(i);
  }
  return ic;
}

inline constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

inline ClusterAssignment cop_kmeans_once(const Eigen::MatrixXd& points, const std::vector<std::string>& doc_ids,
                                         const IndexedConstraints& ic, std::size_t k, std::uint64_t seed,
                                         std::size_t max_iter) {
  const auto m = static_cast<std::size_t>(points.rows());
  ClusterAssignment out;
  out.k = k;
  out.seed = seed;
  out.centroids.resize(static_cast<Eigen::Index>(k), points.cols());
  const auto init = sample_initial_centers(m, k, seed);
  for (std::size_t j = 0; j < k; ++j) {
    out.centroids.row(static_cast<Eigen::Index>(j)) = points.row(static_cast<Eigen::Index>(init[j]));
  }

  std::vector<std::size_t> previous;
  std::vector<std::pair<double, std::size_t>> order(k);
  bool has_empty = false;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    std::vector<std::size_t> labels(m, kUnassigned);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        order[j] = {(points.row(static_cast<Eigen::Index>(i)) - out.centroids.row(static_cast<Eigen::Index>(j))).squaredNorm(), j};
      }
      // Nearest first; equidistant clusters go to the lowest index.
      std::sort(order.begin(), order.end());
      bool merged = false;
      for (const auto& [dist, j] : order) {
        const bool violates =
            std::any_of(ic.must[i].begin(), ic.must[i].end(),
                        [&](std::size_t p) { return labels[p] != kUnassigned && labels[p] != j; }) ||
            std::any_of(ic.cannot[i].begin(), ic.cannot[i].end(), [&](std::size_t p) { return labels[p] == j; });
        if (!violates) {
          labels[i] = j;
          merged = true;
          break;
        }
      }
      if (!merged) {
        throw InfeasibleAssignment(doc_ids[i], "no cluster can take document " + doc_ids[i] +
                                                   " without violating a constraint");
      }
    }

    std::vector<std::size_t> sizes(k, 0);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), points.cols());
    for (std::size_t i = 0; i < m; ++i) {
      ++sizes[labels[i]];
      sums.row(static_cast<Eigen::Index>(labels[i])) += points.row(static_cast<Eigen::Index>(i));
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] > 0) out.centroids.row(static_cast<Eigen::Index>(j)) = sums.row(static_cast<Eigen::Index>(j)) / static_cast<double>(sizes[j]);
    }
    has_empty = repair_empty_clusters(points, out.centroids, sizes);
    out.objective_trace.push_back(within_cluster_ss(points, labels, out.centroids));

    const bool converged = !has_empty && labels == previous;
    previous = std::move(labels);
    if (converged) break;
  }
  if (has_empty) {
    throw InfeasibleAssignment("", "could not populate all " + std::to_string(k) + " clusters");
  }
  out.labels = std::move(previous);
  return out;
}

}  // namespace detail

/// Constrained k-means. Each pass visits points in order and puts each one in
/// the nearest cluster that breaks no must-link or cannot-link against points
/// already placed in the same pass; centroids are then recomputed as member
/// means. Stops when labels repeat or after max_iter passes. A pass that
/// strands a point is retried with a fresh seed up to `restarts` times.
inline ClusterAssignment cop_kmeans(const ReducedDataSet& data, const ConstraintSet& constraints,
                                    const CopKmeansOptions& options) {
  const auto m = data.size();
  if (options.k < 1) throw ParameterError("k must be at least 1");
  if (options.k > m) {
    throw ParameterError("k=" + std::to_string(options.k) + " exceeds the " + std::to_string(m) + " documents");
  }
  if (options.max_iter < 1) throw ParameterError("max_iter must be at least 1");
  const auto ic = detail::index_constraints(data.doc_ids, constraints);

  for (std::size_t attempt = 0;; ++attempt) {
    try {
      return detail::cop_kmeans_once(data.points, data.doc_ids, ic, options.k,
                                     derive_seed(options.seed, attempt), options.max_iter);
    } catch (const InfeasibleAssignment& e) {
      if (attempt >= options.restarts) {
        throw InfeasibleAssignment(e.doc_id(), std::string(e.what()) + " (after " +
                                                   std::to_string(options.restarts) + " restarts)");
      }
    }
  }
}

}  // namespace reviewscope
