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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xprobe/genmatch.hpp"
#include "xprobe/io.hpp"
#include "xprobe/portrait.hpp"
#include "xprobe/refmodel.hpp"

namespace xprobe {

namespace fs = std::filesystem;

struct PortraitBuildOptions {
  PortraitParams params;
};

struct ScoreStageOptions {
  std::size_t per_category_n = 0;  // 0: use every pair
  std::uint64_t sample_seed = 0;
  std::string model = "unknown";
};

// Individual stages; each reads and writes files only.
void stage_portrait_build(const fs::path& corpus, const fs::path& out, const PortraitParams& params);
void stage_portrait_query(const fs::path& portrait, const fs::path& pairs, const fs::path& out,
                          double threshold);
void stage_stratify(const fs::path& pairs, const fs::path& exposure, const fs::path& out,
                    const fs::path& summary_csv, bool include_unsound);
// Writes verdicts to `out`, metric vectors to metrics.jsonl beside it, and
// preference.csv / preference.json into `tables_dir`.
void stage_score(const fs::path& tokenprobs, const fs::path& categories, const fs::path& out,
                 const fs::path& tables_dir, const ScoreStageOptions& options);
void stage_match(const fs::path& generations, const fs::path& pairs, const fs::path& categories,
                 const fs::path& out, const fs::path& rates_csv, MatchMode mode);
void stage_refmodel_train(const fs::path& corpus, const fs::path& out,
                          const NGramModel::Options& options);
void stage_refmodel_score(const fs::path& model, const fs::path& pairs, const fs::path& out);
void stage_refmodel_generate(const fs::path& model, const fs::path& pairs, const fs::path& out,
                             const GenerateOptions& options);
// Reads categories.jsonl, verdicts.jsonl, outcomes.jsonl and run.json from
// `run_dir` (missing optional inputs yield empty tables) and writes
// table1.csv, table2_xor.csv, table3_and_nor.csv, categories.csv,
// generation_rates.csv, report.json and manifest.json into `out_dir`.
void stage_report(const fs::path& run_dir, const fs::path& out_dir);

enum class Stage { kBuild, kQuery, kStratify, kTrain, kScoreModel, kGenerate, kScore, kMatch, kReport };
std::string_view stage_name(Stage s);

struct RunConfig {
  fs::path corpus;
  fs::path pairs;
  fs::path run_dir;
  PortraitParams portrait;  // hash_seed is derived from `seed`
  double threshold = 0.9;
  bool include_unsound = false;
  std::uint64_t seed = 20240601;
  std::size_t per_category_n = 0;
  MatchMode match_mode = MatchMode::kExactFirstLine;
  NGramModel::Options refmodel;  // seed is derived from `seed`
  GenerateOptions decoding;      // seed is derived from `seed`
  // Outputs of an external scorer; when set the reference model is skipped
  // for that stage.
  std::optional<fs::path> tokenprobs;
  std::optional<fs::path> generations;
  std::string scorer;  // defaults to the reference model identity
  int jobs = 0;
  std::vector<Stage> stages;  // empty: all

  // Fills the derived seeds.  Throws Error on an invalid combination.
  void validate();
};

// Keys not present keep their defaults; relative paths are resolved
// against `base`.  Throws Error on unknown keys or wrongly typed values.
RunConfig run_config_from_json(const Json& j, const fs::path& base = {});
Json run_config_to_json(const RunConfig& c, bool include_run_dir = true);

struct RunResult {
  int exit_code = 0;
  fs::path run_dir;
  std::vector<std::string> executed;
  std::vector<std::string> cached;
};

// build -> query -> stratify -> train/score/generate -> score/match ->
// report, each skipped when its cache key (input digests + parameters)
// matches the previous run.  Failures surface as StageError.
RunResult run_pipeline(RunConfig config);

// Digest of a file's bytes, hex; "absent" when the file does not exist.
std::string file_digest(const fs::path& path);

}  // namespace xprobe
