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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Oracles here are written independently of
// the library code they check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>
#include <sys/wait.h>

#include "reviewscope/reviewscope.hpp"

namespace rs = reviewscope;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure message and keeps going.
struct Check {
  Outcome out;
  void expect(bool ok, const std::string& what) {
    if (!ok && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path scratch_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("reviewscope_acceptance_" + std::to_string(::getpid()) + "_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

rs::ReducedDataSet dataset(const Eigen::MatrixXd& points) {
  rs::ReducedDataSet d;
  d.points = points;
  for (Eigen::Index i = 0; i < points.rows(); ++i) d.doc_ids.push_back("d" + std::to_string(i));
  return d;
}

Eigen::MatrixXd random_points(std::mt19937_64& rng, Eigen::Index m, Eigen::Index r) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> blob(0, 3);
  Eigen::MatrixXd centers(4, r);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < r; ++j) centers(i, j) = 4.0 * g(rng);
  Eigen::MatrixXd x(m, r);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto b = blob(rng);
    for (Eigen::Index j = 0; j < r; ++j) x(i, j) = centers(b, j) + g(rng);
  }
  return x;
}

// ---------------------------------------------------------------- oracles

// Lloyd's k-means from the given initial centers. Points are visited in
// order, ties go to the lower index, and an emptied cluster's center moves to
// the point farthest from its nearest live center.
std::vector<std::size_t> lloyd_oracle(const Eigen::MatrixXd& x, const std::vector<std::size_t>& init,
                                      std::size_t max_iter) {
  const std::size_t m = static_cast<std::size_t>(x.rows()), k = init.size(), r = static_cast<std::size_t>(x.cols());
  std::vector<std::vector<double>> c(k, std::vector<double>(r));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t d = 0; d < r; ++d) c[j][d] = x(static_cast<Eigen::Index>(init[j]), static_cast<Eigen::Index>(d));
  auto dist2 = [&](std::size_t i, const std::vector<double>& ctr) {
    double s = 0;
    for (std::size_t d = 0; d < r; ++d) {
      const double t = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) - ctr[d];
      s += t * t;
    }
    return s;
  };
  std::vector<std::size_t> labels(m), prev;
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t best = 0;
      double bd = dist2(i, c[0]);
      for (std::size_t j = 1; j < k; ++j) {
        const double d = dist2(i, c[j]);
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      labels[i] = best;
    }
    std::vector<std::size_t> count(k, 0);
    std::vector<std::vector<double>> sum(k, std::vector<double>(r, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      ++count[labels[i]];
      for (std::size_t d = 0; d < r; ++d) sum[labels[i]][d] += x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
    }
    bool empty = false;
    std::vector<bool> live(k);
    for (std::size_t j = 0; j < k; ++j) {
      live[j] = count[j] > 0;
      if (live[j])
        for (std::size_t d = 0; d < r; ++d) c[j][d] = sum[j][d] / static_cast<double>(count[j]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (live[j]) continue;
      empty = true;
      std::size_t far = 0;
      double fd = -1;
      for (std::size_t i = 0; i < m; ++i) {
        double nd = INFINITY;
        for (std::size_t q = 0; q < k; ++q)
          if (live[q]) nd = std::min(nd, dist2(i, c[q]));
        if (nd > fd) {
          fd = nd;
          far = i;
        }
      }
      for (std::size_t d = 0; d < r; ++d) c[j][d] = x(static_cast<Eigen::Index>(far), static_cast<Eigen::Index>(d));
      live[j] = true;
    }
    if (!empty && labels == prev) break;
    prev = labels;
  }
  return labels;
}

// Davies-Bouldin index by direct summation.
double dbi_oracle(const Eigen::MatrixXd& x, const std::vector<std::size_t>& labels, std::size_t k) {
  const std::size_t r = static_cast<std::size_t>(x.cols());
  std::vector<std::vector<double>> c(k, std::vector<double>(r, 0.0));
  std::vector<double> n(k, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    n[labels[i]] += 1;
    for (std::size_t d = 0; d < r; ++d) c[labels[i]][d] += x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
  }
  for (std::size_t j = 0; j < k; ++j)
    for (auto& v : c[j]) v /= n[j];
  std::vector<double> s(k, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double t = 0;
    for (std::size_t d = 0; d < r; ++d) {
      const double q = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) - c[labels[i]][d];
      t += q * q;
    }
    s[labels[i]] += t;
  }
  for (std::size_t j = 0; j < k; ++j) s[j] = std::sqrt(s[j] / n[j]);
  double total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      double mm = 0;
      for (std::size_t d = 0; d < r; ++d) mm += (c[i][d] - c[j][d]) * (c[i][d] - c[j][d]);
      worst = std::max(worst, (s[i] + s[j]) / std::sqrt(mm));
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

double dice_oracle(const std::set<std::string>& a, const std::set<std::string>& b, const std::map<std::string, double>& w) {
  auto weight = [&](const std::string& x) {
    auto it = w.find(x);
    return it == w.end() ? 0.0 : it->second;
  };
  double sa = 0, sb = 0, si = 0;
  for (const auto& x : a) sa += weight(x);
  for (const auto& x : b) sb += weight(x);
  for (const auto& x : a)
    if (b.count(x)) si += weight(x);
  const double den = std::min(sa, sb);
  return den > 0 ? si / den : 0.0;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> nij;
  std::map<int, double> ai, bj;
  for (std::size_t i = 0; i < a.size(); ++i) {
    nij[{a[i], b[i]}] += 1;
    ai[a[i]] += 1;
    bj[b[i]] += 1;
  }
  auto c2 = [](double n) { return n * (n - 1) / 2; };
  double sum_ij = 0, sum_a = 0, sum_b = 0;
  for (auto& [_, v] : nij) sum_ij += c2(v);
  for (auto& [_, v] : ai) sum_a += c2(v);
  for (auto& [_, v] : bj) sum_b += c2(v);
  const double expected = sum_a * sum_b / c2(static_cast<double>(a.size()));
  const double max_index = (sum_a + sum_b) / 2;
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

// ---------------------------------------------------------------- criteria

Outcome constraint_satisfaction() {
  Check ck;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20260101);
  int successes = 0, infeasible = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index m = 5 + static_cast<Eigen::Index>(rng() % 46);
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 5);
    const std::size_t k = 2 + rng() % 4;
    auto data = dataset(random_points(rng, m, r));
    // Consistent constraints: hidden labelling with k groups; must inside,
    // cannot across.
    std::vector<std::size_t> hidden(static_cast<std::size_t>(m));
    for (auto& h : hidden) h = rng() % k;
    rs::ConstraintSet raw;
    const int edges = static_cast<int>(rng() % 15);
    for (int e = 0; e < edges; ++e) {
      const auto i = rng() % static_cast<std::size_t>(m), j = rng() % static_cast<std::size_t>(m);
      if (i == j) continue;
      if (hidden[i] == hidden[j]) {
        raw.add_must(data.doc_ids[i], data.doc_ids[j]);
      } else {
        raw.add_cannot(data.doc_ids[i], data.doc_ids[j]);
      }
    }
    const auto closed = rs::close_constraints(raw);
    try {
      auto a = rs::cop_kmeans(data, closed, {k, static_cast<std::uint64_t>(t), 100, 10});
      ++successes;
      std::map<std::string, std::size_t> label;
      for (std::size_t i = 0; i < a.labels.size(); ++i) label[data.doc_ids[i]] = a.labels[i];
      for (const auto& [x, y] : raw.must) ck.expect(label[x] == label[y], "must-link violated in instance " + std::to_string(t));
      for (const auto& [x, y] : raw.cannot) ck.expect(label[x] != label[y], "cannot-link violated in instance " + std::to_string(t));
    } catch (const rs::InfeasibleAssignment&) {
      ++infeasible;
    } catch (const std::exception& e) {
      ck.expect(false, std::string("unexpected error: ") + e.what());
    }
  }
  // Setups that no assignment can satisfy: a cannot-clique of k + 1 points.
  int forced = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t k = 1 + static_cast<std::size_t>(t % 4);
    auto data = dataset(random_points(rng, 12, 3));
    rs::ConstraintSet raw;
    for (std::size_t i = 0; i <= k; ++i)
      for (std::size_t j = i + 1; j <= k; ++j) raw.add_cannot(data.doc_ids[i], data.doc_ids[j]);
    try {
      rs::cop_kmeans(data, rs::close_constraints(raw), {k, static_cast<std::uint64_t>(t), 100, 10});
      ck.expect(false, "infeasible clique did not raise");
    } catch (const rs::InfeasibleAssignment&) {
      ++forced;
    }
  }
  const double secs = seconds_since(t0);
  ck.expect(secs < 30.0, "runtime " + std::to_string(secs) + " s");
  ck.expect(successes > 100, "too few feasible instances: " + std::to_string(successes));
  if (ck.out.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d feasible runs all satisfied, %d infeasible raised, %d/20 forced-infeasible raised, %.2f s",
                  successes, infeasible, forced, secs);
    ck.out.detail = buf;
  }
  return ck.out;
}

Outcome lloyd_equivalence() {
  Check ck;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(777);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 49);
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 5);
    const std::size_t k = 1 + rng() % std::min<std::size_t>(6, static_cast<std::size_t>(m));
    auto data = dataset(random_points(rng, m, r));
    const std::uint64_t seed = rng();
    auto a = rs::cop_kmeans(data, {}, {k, seed, 100, 0});
    const auto init = rs::sample_initial_centers(static_cast<std::size_t>(m), k, seed);
    ck.expect(a.labels == lloyd_oracle(data.points, init, 100), "labels differ on instance " + std::to_string(t));
  }
  const double secs = seconds_since(t0);
  ck.expect(secs < 10.0, "runtime " + std::to_string(secs) + " s");
  if (ck.out.pass) ck.out.detail = "100/100 instances identical, " + std::to_string(secs).substr(0, 5) + " s";
  return ck.out;
}

Outcome dbi_agreement() {
  Check ck;
  std::mt19937_64 rng(31337);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 2 + rng() % 7;
    const std::size_t m = k + rng() % (101 - k);
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 5);
    auto x = random_points(rng, static_cast<Eigen::Index>(m), r);
    std::vector<std::size_t> labels(m);
    for (std::size_t i = 0; i < m; ++i) labels[i] = i < k ? i : rng() % k;
    std::shuffle(labels.begin(), labels.end(), rng);
    const double got = rs::dbi(x, labels, k), want = dbi_oracle(x, labels, k);
    worst = std::max(worst, std::abs(got - want));
  }
  ck.expect(worst <= 1e-9, "max deviation " + std::to_string(worst));
  Eigen::MatrixXd ex(4, 2);
  ex << 0, 0, 0, 2, 10, 0, 10, 2;
  const double v = rs::dbi(ex, {0, 0, 1, 1}, 2);
  ck.expect(std::abs(v - 0.2) <= 1e-12, "constructed example gave " + std::to_string(v));
  if (ck.out.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |dbi - brute force| = %.2e over 100 instances; example = %.15f", worst, v);
    ck.out.detail = buf;
  }
  return ck.out;
}

Outcome ndcg_example() {
  Check ck;
  rs::LocalizationRanking r;
  r.review_id = "r";
  for (const char* p : {"A", "x1", "B", "x2", "C"}) r.entries.push_back({p, 0.5, 0});
  const double got = rs::ndcg_at_k(r, {"A", "B", "C"}, 5);
  // relevance {1,0,1,0,1}, ideal {1,1,1,0,0}, gains discounted by log2(i + 1)
  const double dcg = 1.0 / std::log2(2.0) + 1.0 / std::log2(4.0) + 1.0 / std::log2(6.0);
  const double idcg = 1.0 / std::log2(2.0) + 1.0 / std::log2(3.0) + 1.0 / std::log2(4.0);
  ck.expect(std::abs(got - dcg / idcg) <= 1e-6, "got " + std::to_string(got));
  ck.expect(std::abs(got - 0.8854) <= 1e-4, "not ~0.8854: " + std::to_string(got));
  if (ck.out.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "NDCG@5 = %.6f (hand value %.6f)", got, dcg / idcg);
    ck.out.detail = buf;
  }
  return ck.out;
}

Outcome segmentation_examples() {
  Check ck;
  const auto a = rs::segment_atomic(
      "I wish there was a pattern lock feature and a camera shortcut for the lockscreen");
  ck.expect(a == std::vector<std::string>{"I wish there was a pattern lock feature for the lockscreen",
                                          "I wish there was a camera shortcut for the lockscreen"},
            "copulative example mismatch");
  const auto b = rs::segment_atomic(
      "This app is good, but it is lacking a key feature for anyone who uses mailing lists: Reply-To-List");
  ck.expect(b == std::vector<std::string>{"it is lacking a key feature for anyone who uses mailing lists: Reply-To-List"},
            "adversative example mismatch");
  if (ck.out.pass) ck.out.detail = "both published examples reproduced verbatim";
  return ck.out;
}

struct RandomFixture {
  std::vector<std::string> vocab;
  std::mt19937_64 rng;

  explicit RandomFixture(std::uint64_t seed) : rng(seed) {
    for (char c = 'a'; c <= 'p'; ++c) vocab.push_back(std::string(2, c));
  }

  std::vector<std::string> words(double p) {
    std::bernoulli_distribution keep(p);
    std::vector<std::string> out;
    for (const auto& w : vocab)
      if (keep(rng)) out.push_back(w);
    return out;
  }
};

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

Outcome interpolation_boundaries() {
  Check ck;
  const auto review_time = *rs::parse_rfc3339("2026-06-01T00:00:00Z");
  const auto past = *rs::parse_rfc3339("2026-01-01T00:00:00Z");
  const auto future = *rs::parse_rfc3339("2026-09-01T00:00:00Z");
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    RandomFixture fx(9000 + static_cast<std::uint64_t>(t));
    auto review = rs::make_word_set(fx.words(0.3));
    if (review.size() < 2) review = {"aa", "bb"};
    std::map<std::string, double> w;
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (const auto& x : fx.vocab) w[x] = u(fx.rng);
    const auto df = rs::DfTable::from_weights(w);

    rs::FilePair f;
    f.path = "F";
    f.code_words = rs::make_word_set(fx.words(0.4));
    // gamma = 0: commit words disjoint from the review.
    std::vector<std::string> disjoint;
    for (const auto& x : fx.vocab)
      if (!std::binary_search(review.begin(), review.end(), x) && fx.rng() % 2) disjoint.push_back(x);
    f.commit_entries = {{"c0", past, rs::make_word_set(disjoint)}};
    auto s0 = rs::interpolated_sim(review, f, review_time, df);
    const double code_only = dice_oracle(as_set(review), as_set(f.code_words), w);
    ck.expect(s0.gamma == 0, "gamma not 0");
    worst = std::max(worst, std::abs(s0.score - code_only));

    // gamma = L: the commit history covers every review word.
    auto extra = fx.words(0.2);
    extra.insert(extra.end(), review.begin(), review.end());
    rs::FilePair g = f;
    g.commit_entries = {{"c1", past, rs::make_word_set(extra)}};
    auto sl = rs::interpolated_sim(review, g, review_time, df);
    ck.expect(sl.gamma == sl.length, "gamma != L");
    worst = std::max(worst, std::abs(sl.score - dice_oracle(as_set(review), as_set(extra), w)));

    // Future commits change nothing.
    for (const auto* base : {&f, &g}) {
      rs::FilePair h = *base;
      h.commit_entries.push_back({"cf", future, rs::make_word_set(fx.words(0.6))});
      h.commit_entries.push_back({"cr", review_time, review});  // same instant: not earlier
      const auto before = rs::interpolated_sim(review, *base, review_time, df);
      const auto after = rs::interpolated_sim(review, h, review_time, df);
      ck.expect(before.score == after.score && before.gamma == after.gamma,
                "future-dated commit changed the score in fixture " + std::to_string(t));
    }
  }
  ck.expect(worst <= 1e-12, "boundary deviation " + std::to_string(worst));
  if (ck.out.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "100 fixtures; max boundary deviation %.1e; future commits inert", worst);
    ck.out.detail = buf;
  }
  return ck.out;
}

Outcome df_scale_invariance() {
  Check ck;
  double worst = 0;
  int orders = 0;
  for (int t = 0; t < 50; ++t) {
    RandomFixture fx(5000 + static_cast<std::uint64_t>(t));
    std::vector<rs::TokenDoc> reviews;
    for (int i = 0; i < 5; ++i) {
      rs::TokenDoc d;
      d.doc_id = "r" + std::to_string(i);
      d.tokens = fx.words(0.25);
      if (d.tokens.size() < 2) d.tokens = {"aa", "cc"};
      reviews.push_back(d);
    }
    std::vector<rs::FilePair> files;
    for (int i = 0; i < 8; ++i) {
      rs::FilePair f;
      f.path = "src/F" + std::to_string(i) + ".kt";
      f.code_words = rs::make_word_set(fx.words(0.3));
      for (int c = 0; c < static_cast<int>(fx.rng() % 3); ++c) {
        f.commit_entries.push_back({"c" + std::to_string(i) + "_" + std::to_string(c),
                                    *rs::parse_rfc3339("2026-01-0" + std::to_string(c + 1) + "T00:00:00Z"),
                                    rs::make_word_set(fx.words(0.2))});
      }
      files.push_back(f);
    }
    const auto df = rs::build_localization_df(reviews, files);
    std::uniform_real_distribution<double> logc(-6, 6);
    const double c = std::exp(logc(fx.rng));
    const auto scaled = df.scaled(c);
    for (const auto& r : reviews) {
      const auto rw = rs::make_word_set(r.tokens);
      for (const auto& f : files) {
        worst = std::max(worst, std::abs(rs::dice_sim(rw, f.code_words, df) - rs::dice_sim(rw, f.code_words, scaled)));
        const auto bag = rs::commit_bag(f, std::nullopt);
        worst = std::max(worst, std::abs(rs::dice_sim(rw, bag, df) - rs::dice_sim(rw, bag, scaled)));
      }
      const auto a = rs::rank_files(r, files, files.size(), std::nullopt, df);
      const auto b = rs::rank_files(r, files, files.size(), std::nullopt, scaled);
      std::vector<std::string> pa, pb;
      for (const auto& e : a.entries) pa.push_back(e.path);
      for (const auto& e : b.entries) pb.push_back(e.path);
      ck.expect(pa == pb, "ranking order changed in fixture " + std::to_string(t) + " (c=" + std::to_string(c) + ")");
      ++orders;
    }
  }
  ck.expect(worst <= 1e-12, "dice deviation " + std::to_string(worst));
  if (ck.out.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "50 fixtures, %d rankings unchanged; max dice deviation %.1e", orders, worst);
    ck.out.detail = buf;
  }
  return ck.out;
}

// Three disjoint topics. Each review names its topic's key phrase plus one
// word of its own; commits that touched each topic's file use its vocabulary.
struct Topic {
  const char* key;
  const char* file;
  const char* commit;
  std::vector<const char*> extras;
};

const std::vector<Topic>& topics() {
  static const std::vector<Topic> t{
      {"dark theme", "ui/ThemeManager.kt", "Dark theme palette",
       {"bright", "harsh", "pale", "glaring", "dim", "washed", "faded", "garish", "bland", "dull"}},
      {"cloud backup", "storage/BackupWorker.kt", "Cloud backup scheduling",
       {"slow", "stuck", "partial", "missing", "corrupt", "delayed", "huge", "frequent", "manual", "noisy"}},
      {"battery drain", "power/PowerMonitor.kt", "Reduce battery drain",
       {"overnight", "idle", "background", "severe", "sudden", "constant", "heavy", "rapid", "weird", "awful"}},
  };
  return t;
}

struct PlantedCorpus {
  fs::path dir;
  rs::PipelineConfig config;
  std::map<std::string, int> truth_label;  // doc id -> topic
};

PlantedCorpus planted_corpus(const std::string& tag) {
  PlantedCorpus pc;
  pc.dir = scratch_dir(tag);
  std::string reviews, truth = "{";
  int n = 0;
  for (int i = 0; i < 10; ++i) {
    for (std::size_t t = 0; t < topics().size(); ++t) {
      const auto& topic = topics()[t];
      const std::string id = "t" + std::to_string(t) + "_" + std::to_string(i);
      reviews += R"({"id":")" + id + R"(","app_id":"demo","text":"The )" + topic.key + " is too " + topic.extras[i] +
                 R"(.","timestamp":"2026-05-01T00:00:00Z","category":"feature_request"})" + "\n";
      truth += std::string(n++ ? "," : "") + "\"" + id + "\":[\"" + topic.file + "\"]";
      pc.truth_label[id + "#0"] = static_cast<int>(t);
    }
  }
  truth += "}";
  std::string commits;
  for (std::size_t t = 0; t < topics().size(); ++t) {
    const auto& topic = topics()[t];
    commits += R"({"sha":"s)" + std::to_string(t) + R"(","title":")" + topic.commit + R"(","description":"","timestamp":"2026-02-0)" +
               std::to_string(t + 1) + R"(T00:00:00Z","files":[")" + topic.file + "\"]}\n";
    write_file(pc.dir / "src" / topic.file, "class Component" + std::to_string(t) + " {\n  fun run() {}\n}\n");
  }
  write_file(pc.dir / "reviews.jsonl", reviews);
  write_file(pc.dir / "commits.jsonl", commits);
  write_file(pc.dir / "truth.json", truth);
  // 5 must-links inside topics, 5 cannot-links across topics.
  write_file(pc.dir / "constraints.json",
             R"({"must": [["t0_0#0","t0_1#0"],["t1_2#0","t1_3#0"],["t2_4#0","t2_5#0"],["t0_6#0","t0_7#0"],["t1_8#0","t1_9#0"]],)"
             R"( "cannot": [["t0_0#0","t1_0#0"],["t1_1#0","t2_1#0"],["t2_2#0","t0_2#0"],["t0_3#0","t2_3#0"],["t1_4#0","t0_4#0"]]})");
  pc.config.paths.reviews = pc.dir / "reviews.jsonl";
  pc.config.paths.commits = pc.dir / "commits.jsonl";
  pc.config.paths.source_tree = pc.dir / "src";
  pc.config.paths.constraints = pc.dir / "constraints.json";
  pc.config.paths.ground_truth = pc.dir / "truth.json";
  pc.config.paths.output_dir = pc.dir / "out";
  return pc;
}

Outcome planted_topics() {
  Check ck;
  const auto t0 = Clock::now();
  auto pc = planted_corpus("planted");
  double ari_sum = 0;
  std::size_t k_seen = 0;
  try {
    rs::cmd_preprocess(pc.config);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      pc.config.seed = seed;
      rs::cmd_cluster(pc.config);
      auto j = nlohmann::json::parse(read_file(rs::ArtifactPaths{pc.config.paths.output_dir}.clusters(rs::Category::FeatureRequest)));
      std::vector<int> planted, found;
      std::set<int> labels;
      for (const auto& e : j) {
        planted.push_back(pc.truth_label.at(e["doc_id"].get<std::string>()));
        found.push_back(e["cluster"].get<int>());
        labels.insert(found.back());
      }
      ck.expect(planted.size() == 30, "expected 30 documents, got " + std::to_string(planted.size()));
      k_seen = labels.size();
      ari_sum += adjusted_rand_index(planted, found);
    }
    const double ari = ari_sum / 10.0;
    ck.expect(ari >= 0.8, "mean ARI " + std::to_string(ari));

    auto rankings = rs::cmd_localize(pc.config);
    const auto report = rs::cmd_evaluate(pc.config);
    ck.expect(rankings.size() == 30, "expected 30 rankings");
    ck.expect(report.excluded.empty(), "reviews without ground truth");
    ck.expect(report.top_k.at(1) == 1.0, "Top-1 = " + std::to_string(report.top_k.at(1)));
    const double secs = seconds_since(t0);
    ck.expect(secs < 60.0, "runtime " + std::to_string(secs) + " s");
    if (ck.out.pass) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "mean ARI over 10 seeds = %.4f (K=%zu), Top-1 = %.2f over %zu reviews, %.2f s", ari,
                    k_seen, report.top_k.at(1), rankings.size(), secs);
      ck.out.detail = buf;
    }
  } catch (const std::exception& e) {
    ck.expect(false, std::string("pipeline error: ") + e.what());
  }
  fs::remove_all(pc.dir);
  return ck.out;
}

Outcome pca_checks() {
  Check ck;
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> g;
  double worst_orth = 0, worst_iso = 0;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index m = 3 + static_cast<Eigen::Index>(rng() % 30), n = 2 + static_cast<Eigen::Index>(rng() % 12);
    Eigen::MatrixXd x(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) x(i, j) = g(rng);
    std::vector<std::string> ids(static_cast<std::size_t>(m), "d");
    const auto full = std::min(m, n);
    double prev = INFINITY;
    for (Eigen::Index r = 1; r <= full; ++r) {
      auto red = rs::pca_reduce(x, ids, rs::FixedComponents{static_cast<std::size_t>(r)});
      const Eigen::MatrixXd gram = red.components.transpose() * red.components;
      worst_orth = std::max(worst_orth, (gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff());
      const double err = rs::reconstruction_error(x, red);
      ck.expect(err <= prev + 1e-9, "reconstruction error increased at r=" + std::to_string(r));
      prev = err;
      if (r == full) {
        for (Eigen::Index i = 0; i < m; ++i)
          for (Eigen::Index j = i + 1; j < m; ++j)
            worst_iso = std::max(worst_iso, std::abs((red.points.row(i) - red.points.row(j)).norm() -
                                                     (x.row(i) - x.row(j)).norm()));
      }
    }
  }
  ck.expect(worst_orth <= 1e-9, "orthonormality deviation " + std::to_string(worst_orth));
  ck.expect(worst_iso <= 1e-6, "distance deviation " + std::to_string(worst_iso));
  if (ck.out.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "50 matrices; max |C^T C - I| = %.1e, max distance change = %.1e", worst_orth, worst_iso);
    ck.out.detail = buf;
  }
  return ck.out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(REVIEWSCOPE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  Check ck;
  auto pc = planted_corpus("determinism");
  write_file(pc.dir / "config.ini",
             "[paths]\nreviews = reviews.jsonl\ncommits = commits.jsonl\nsource_tree = src\n"
             "constraints = constraints.json\nground_truth = truth.json\n[cluster]\nseed = 1234\n");
  const std::vector<std::string> artifacts{"clusters_feature_request.json", "clusters_problem_discovery.json",
                                           "cluster_summary.json", "rankings.json"};
  std::map<std::string, std::string> first;
  for (int run = 0; run < 2; ++run) {
    const auto out = pc.dir / ("run" + std::to_string(run));
    const int code = run_cli("--config " + (pc.dir / "config.ini").string() + " --out " + out.string() + " run-all");
    ck.expect(code == 0, "run-all exit code " + std::to_string(code));
    for (const auto& a : artifacts) {
      if (!fs::exists(out / a)) {
        if (a != "clusters_problem_discovery.json") ck.expect(false, "missing artifact " + a);
        continue;
      }
      const auto bytes = read_file(out / a);
      if (run == 0) {
        first[a] = bytes;
      } else {
        ck.expect(first[a] == bytes, a + " differs between runs");
      }
    }
  }
  if (ck.out.pass) ck.out.detail = std::to_string(first.size()) + " artifacts byte-identical across two CLI runs";
  fs::remove_all(pc.dir);
  return ck.out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"constraint satisfaction", constraint_satisfaction},
      {"Lloyd oracle equivalence", lloyd_equivalence},
      {"DBI brute-force agreement", dbi_agreement},
      {"NDCG worked example", ndcg_example},
      {"segmentation fidelity", segmentation_examples},
      {"interpolation boundaries", interpolation_boundaries},
      {"df-scale invariance", df_scale_invariance},
      {"planted-topic end to end", planted_topics},
      {"PCA checks", pca_checks},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("uncaught: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
