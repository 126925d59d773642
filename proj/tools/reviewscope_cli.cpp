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


// reviewscope command-line driver.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "reviewscope/reviewscope.hpp"

namespace rs = reviewscope;

namespace {

struct Overrides {
  std::string config = "reviewscope.ini";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::string top_k;
  std::optional<double> pca_variance;
  std::optional<bool> fallback_classifier;
  std::string out;
};

rs::PipelineConfig resolve(const Overrides& o) {
  auto c = rs::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.k) c.k = *o.k;
  if (!o.top_k.empty()) c.top_k = rs::parse_top_k_list(o.top_k);
  if (o.pca_variance) c.pca = rs::VarianceFraction{*o.pca_variance};
  if (o.fallback_classifier) c.fallback_classifier = *o.fallback_classifier;
  if (!o.out.empty()) c.paths.output_dir = o.out;
  c.validate();
  return c;
}

void flush(const rs::Diagnostics& diag, std::size_t& printed) {
  for (; printed < diag.warnings.size(); ++printed) std::cerr << "warning: " << diag.warnings[printed] << "\n";
}

void run_preprocess(const rs::PipelineConfig& c, rs::Diagnostics& diag) {
  auto r = rs::cmd_preprocess(c, &diag);
  std::cerr << "preprocess: " << r.reviews_loaded << " reviews, " << r.reviews_kept << " informative, "
            << r.atomic_sentences << " atomic sentences";
  for (const auto& [category, docs] : r.docs) std::cerr << ", " << rs::to_string(category) << "=" << docs.size();
  std::cerr << "\n";
}

void run_cluster(const rs::PipelineConfig& c, rs::Diagnostics& diag) {
  for (const auto& r : rs::cmd_cluster(c, &diag)) {
    std::cerr << "cluster: " << rs::to_string(r.category) << " k=" << r.assignment.k
              << " r=" << r.data.dim() << " iterations=" << r.assignment.iterations;
    if (r.dbi) std::cerr << " dbi=" << *r.dbi;
    std::cerr << "\n";
  }
}

void run_localize(const rs::PipelineConfig& c, rs::Diagnostics& diag) {
  auto r = rs::cmd_localize(c, &diag);
  std::cerr << "localize: " << r.size() << " rankings\n";
}

void run_evaluate(const rs::PipelineConfig& c, rs::Diagnostics& diag) {
  std::cout << rs::format_table(rs::cmd_evaluate(c, &diag));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Review clustering and change localization pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Overrides o;
  app.add_option("-c,--config", o.config, "INI config file")->capture_default_str();
  app.add_option("--seed", o.seed, "Random seed for clustering (default 42)");
  app.add_option("--k", o.k, "Cluster count; skips the bigram estimate")->check(CLI::PositiveNumber);
  app.add_option("--top-k", o.top_k, "Comma-separated ranking cutoffs (default 1,3,5)");
  app.add_option("--pca-variance", o.pca_variance, "Retained PCA variance fraction (default 0.95)")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--fallback-classifier", o.fallback_classifier,
                 "Label unlabeled reviews with keyword cues (true/false, default false)");
  app.add_option("-o,--out", o.out, "Output directory (default from config, else ./out)");

  struct Step {
    const char* name;
    const char* help;
    void (*run)(const rs::PipelineConfig&, rs::Diagnostics&);
  };
  const Step steps[] = {
      {"preprocess", "Ingest, filter, segment and normalize reviews", run_preprocess},
      {"cluster", "Cluster atomic sentences per category", run_cluster},
      {"localize", "Rank source files for each atomic sentence", run_localize},
      {"evaluate", "Score rankings against ground truth", run_evaluate},
  };
  for (const auto& s : steps) app.add_subcommand(s.name, s.help);
  app.add_subcommand("run-all", "preprocess, cluster, localize, then evaluate when ground truth is set");

  CLI11_PARSE(app, argc, argv);

  rs::Diagnostics diag;
  std::size_t printed = 0;
  try {
    const auto config = resolve(o);
    const auto* sub = app.get_subcommands().front();
    for (const auto& s : steps) {
      const bool all = sub->get_name() == "run-all";
      if (!all && sub->get_name() != s.name) continue;
      if (all && std::string_view(s.name) == "evaluate" && config.paths.ground_truth.empty()) continue;
      s.run(config, diag);
      flush(diag, printed);
    }
  } catch (const rs::InfeasibleAssignment& e) {
    flush(diag, printed);
    std::cerr << "error: " << e.what() << " (document " << e.doc_id() << ")\n";
    return 2;
  } catch (const rs::ConstraintError& e) {
    flush(diag, printed);
    std::cerr << "error: " << e.what() << " (" << e.first() << ", " << e.second() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    flush(diag, printed);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
