// Copyright 2026 The exposure-probe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// xprobe: command-line entry point for the exposure pipeline.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "xprobe/error.hpp"
#include "xprobe/membership.hpp"
#include "xprobe/parallel.hpp"
#include "xprobe/pipeline.hpp"
#include "xprobe/report.hpp"

namespace {

using namespace xprobe;

int fail(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

// Runs `fn`, turning any error into a stage-qualified diagnostic.
template <typename Fn>
int guarded(const std::string& stage, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const StageError& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(StageError(stage, e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exposure-probe: pretraining exposure of bug/fix pairs and its effect on model preference"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(xprobe::kToolVersion));
  int jobs = 0;
  app.add_option("--jobs,-j", jobs, "Worker threads (default: $EXPOSURE_PROBE_JOBS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::function<int()> action;

  // portrait build / query
  auto* portrait = app.add_subcommand("portrait", "Build or query a strided Bloom portrait");
  portrait->require_subcommand(1);
  PortraitParams params;
  std::string corpus, portrait_out;
  auto* build = portrait->add_subcommand("build", "Index a pretraining corpus");
  build->add_option("--corpus", corpus, "Corpus directory or JSONL {id, content}")->required();
  build->add_option("--out", portrait_out, "Portrait file to write")->required();
  build->add_option("--width", params.width, "Window width in tokens")->capture_default_str();
  build->add_option("--stride", params.stride, "Stride between stored windows")->capture_default_str();
  build->add_option("--fpr", params.target_fpr, "Target false-positive rate")->capture_default_str();
  build->add_option("--seed", params.hash_seed, "Hash seed")->capture_default_str();
  build->add_option("--expected-elements", params.expected_elements,
                    "Capacity; 0 counts windows first")
      ->capture_default_str();
  build->callback([&] {
    action = [&] {
      return guarded("build", [&] { stage_portrait_build(corpus, portrait_out, params); });
    };
  });

  std::string portrait_in, query_in, query_out;
  double threshold = kDefaultSeenThreshold;
  auto* query = portrait->add_subcommand("query", "Compute exposure of every pair variant");
  query->add_option("--portrait", portrait_in, "Portrait file")->required();
  query->add_option("--in", query_in, "pairs.jsonl")->required();
  query->add_option("--out", query_out, "exposure.jsonl to write")->required();
  query->add_option("--threshold", threshold, "Exposure score needed for 'seen'")->capture_default_str();
  query->callback([&] {
    action = [&] {
      return guarded("query",
                     [&] { stage_portrait_query(portrait_in, query_in, query_out, threshold); });
    };
  });

  // stratify
  std::string pairs, exposure, categories_out, summary;
  bool include_unsound = false;
  auto* strat = app.add_subcommand("stratify", "Assign exposure categories");
  strat->add_option("--pairs", pairs, "pairs.jsonl")->required();
  strat->add_option("--exposure", exposure, "exposure.jsonl")->required();
  strat->add_option("--out", categories_out, "categories.jsonl to write")->required();
  strat->add_option("--summary", summary, "Exposure table CSV to write")->required();
  strat->add_flag("--include-unsound", include_unsound, "Keep pairs with unsound queries");
  strat->callback([&] {
    action = [&] {
      return guarded("stratify", [&] {
        stage_stratify(pairs, exposure, categories_out, summary, include_unsound);
      });
    };
  });

  // score
  std::string tokenprobs, categories, verdicts_out, tables_dir;
  ScoreStageOptions score_opts;
  auto* score = app.add_subcommand("score", "Metric vectors, preferences and preference tables");
  score->add_option("--tokenprobs", tokenprobs, "tokenprobs.jsonl")->required();
  score->add_option("--categories", categories, "categories.jsonl")->required();
  score->add_option("--out", verdicts_out, "verdicts.jsonl to write")->required();
  score->add_option("--tables", tables_dir, "Directory for preference tables")->required();
  score->add_option("--per-category-n", score_opts.per_category_n, "Balanced sample size (0: all)");
  score->add_option("--sample-seed", score_opts.sample_seed, "Seed for balanced sampling");
  score->add_option("--model", score_opts.model, "Model name recorded in the tables");
  score->callback([&] {
    action = [&] {
      return guarded("score", [&] {
        stage_score(tokenprobs, categories, verdicts_out, tables_dir, score_opts);
      });
    };
  });

  // match
  std::string generations, outcomes_out, rates;
  bool strict = false;
  auto* match = app.add_subcommand("match", "Classify sampled completions");
  match->add_option("--generations", generations, "generations.jsonl")->required();
  match->add_option("--pairs", pairs, "pairs.jsonl")->required();
  match->add_option("--categories", categories, "categories.jsonl")->required();
  match->add_option("--out", outcomes_out, "outcomes.jsonl to write")->required();
  match->add_option("--rates", rates, "Generation rate CSV to write")->required();
  match->add_flag("--strict", strict, "Match by containment instead of the first line");
  match->callback([&] {
    action = [&] {
      return guarded("match", [&] {
        stage_match(generations, pairs, categories, outcomes_out, rates,
                    strict ? MatchMode::kContains : MatchMode::kExactFirstLine);
      });
    };
  });

  // refmodel train / score / generate
  auto* refmodel = app.add_subcommand("refmodel", "Character n-gram reference model");
  refmodel->require_subcommand(1);
  NGramModel::Options model_opts;
  std::string model_path, ref_out;
  auto* train = refmodel->add_subcommand("train", "Train on a corpus");
  train->add_option("--corpus", corpus, "Corpus directory or JSONL")->required();
  train->add_option("--out", model_path, "Model file to write")->required();
  train->add_option("--order", model_opts.order, "Context length in characters")->capture_default_str();
  train->add_option("--alpha", model_opts.alpha, "Additive smoothing")->capture_default_str();
  train->callback([&] {
    action = [&] {
      return guarded("train", [&] { stage_refmodel_train(corpus, model_path, model_opts); });
    };
  });
  auto* rscore = refmodel->add_subcommand("score", "Emit tokenprobs.jsonl");
  rscore->add_option("--model", model_path, "Model file")->required();
  rscore->add_option("--pairs", pairs, "pairs.jsonl")->required();
  rscore->add_option("--out", ref_out, "tokenprobs.jsonl to write")->required();
  rscore->callback([&] {
    action = [&] {
      return guarded("refmodel-score", [&] { stage_refmodel_score(model_path, pairs, ref_out); });
    };
  });
  GenerateOptions gen_opts;
  auto* rgen = refmodel->add_subcommand("generate", "Emit generations.jsonl");
  rgen->add_option("--model", model_path, "Model file")->required();
  rgen->add_option("--pairs", pairs, "pairs.jsonl")->required();
  rgen->add_option("--out", ref_out, "generations.jsonl to write")->required();
  rgen->add_option("--samples", gen_opts.n_samples, "Completions per pair")->capture_default_str();
  rgen->add_option("--max-new-tokens", gen_opts.max_chars, "Characters per completion")
      ->capture_default_str();
  rgen->add_option("--temperature", gen_opts.temperature)->capture_default_str();
  rgen->add_option("--top-p", gen_opts.top_p)->capture_default_str();
  rgen->add_option("--seed", gen_opts.seed)->capture_default_str();
  rgen->callback([&] {
    action = [&] {
      return guarded("generate",
                     [&] { stage_refmodel_generate(model_path, pairs, ref_out, gen_opts); });
    };
  });

  // report
  std::string run_dir, report_out;
  auto* report = app.add_subcommand("report", "Emit the report tables from a run directory");
  report->add_option("--run-dir", run_dir, "Run directory")->required();
  report->add_option("--out", report_out, "Report directory")->required();
  report->callback([&] {
    action = [&] { return guarded("report", [&] { stage_report(run_dir, report_out); }); };
  });

  // run
  std::string config_path;
  RunConfig flags;
  std::string tokenprobs_flag, generations_flag;
  std::vector<std::string> stages;
  auto* run = app.add_subcommand("run", "Run every stage; flags override the config file");
  run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* o_corpus = run->add_option("--corpus", flags.corpus);
  auto* o_pairs = run->add_option("--pairs", flags.pairs);
  auto* o_run_dir = run->add_option("--run-dir", flags.run_dir);
  auto* o_width = run->add_option("--width", flags.portrait.width);
  auto* o_stride = run->add_option("--stride", flags.portrait.stride);
  auto* o_fpr = run->add_option("--fpr", flags.portrait.target_fpr);
  auto* o_expected = run->add_option("--expected-elements", flags.portrait.expected_elements);
  auto* o_threshold = run->add_option("--threshold", flags.threshold);
  auto* o_seed = run->add_option("--seed", flags.seed, "Root seed for every random stream");
  auto* o_per_n = run->add_option("--per-category-n", flags.per_category_n);
  auto* o_tokenprobs = run->add_option("--tokenprobs", tokenprobs_flag, "External scorer output");
  auto* o_generations = run->add_option("--generations", generations_flag, "External scorer output");
  auto* o_scorer = run->add_option("--scorer", flags.scorer, "Name of the external scorer");
  auto* o_unsound = run->add_flag("--include-unsound", flags.include_unsound);
  auto* o_strict = run->add_flag("--strict", "Match by containment");
  auto* o_stages = run->add_option("--stages", stages, "Subset of stages to run");
  run->callback([&] {
    action = [&]() -> int {
      RunConfig c;
      try {
        if (!config_path.empty()) {
          const fs::path p = fs::absolute(config_path);
          c = run_config_from_json(Json::parse(read_file(p)), p.parent_path());
        }
        if (o_corpus->count()) c.corpus = flags.corpus;
        if (o_pairs->count()) c.pairs = flags.pairs;
        if (o_run_dir->count()) c.run_dir = flags.run_dir;
        if (o_width->count()) c.portrait.width = flags.portrait.width;
        if (o_stride->count()) c.portrait.stride = flags.portrait.stride;
        if (o_fpr->count()) c.portrait.target_fpr = flags.portrait.target_fpr;
        if (o_expected->count()) c.portrait.expected_elements = flags.portrait.expected_elements;
        if (o_threshold->count()) c.threshold = flags.threshold;
        if (o_seed->count()) c.seed = flags.seed;
        if (o_per_n->count()) c.per_category_n = flags.per_category_n;
        if (o_tokenprobs->count()) c.tokenprobs = fs::path(tokenprobs_flag);
        if (o_generations->count()) c.generations = fs::path(generations_flag);
        if (o_scorer->count()) c.scorer = flags.scorer;
        if (o_unsound->count()) c.include_unsound = true;
        if (o_strict->count()) c.match_mode = MatchMode::kContains;
        if (o_stages->count()) {
          Json names = stages;
          c.stages = run_config_from_json(Json{{"stages", names}}).stages;
        }
        if (jobs > 0) c.jobs = jobs;
      } catch (const std::exception& e) {
        return fail(e);
      }
      try {
        const RunResult r = run_pipeline(c);
        std::cerr << "run: " << r.executed.size() << " stages executed, " << r.cached.size()
                  << " cached; outputs in " << r.run_dir.string() << "\n";
        return r.exit_code;
      } catch (const std::exception& e) {
        return fail(e);
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (jobs > 0) set_jobs(jobs);
  return action ? action() : 0;
}
