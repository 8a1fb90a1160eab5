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

#include "xprobe/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "xprobe/dataset.hpp"
#include "xprobe/error.hpp"
#include "xprobe/hash.hpp"
#include "xprobe/membership.hpp"
#include "xprobe/metrics.hpp"
#include "xprobe/parallel.hpp"
#include "xprobe/report.hpp"

namespace xprobe {
namespace {

PairLoadResult load_pairs_verbose(const fs::path& path) {
  PairLoadResult r = load_pairs(path);
  for (const auto& d : r.rejected) {
    std::cerr << "warning: " << path.string() << ": record " << d.line << " rejected: " << d.message
              << "\n";
  }
  return r;
}

void write_jsonl(const fs::path& path, const std::vector<Json>& records) {
  write_file(path, to_jsonl(records));
}

ConditionTable condition_table(std::span<const PreferenceVerdict> verdicts,
                               const std::map<std::string, ExposureCategory>& categories,
                               std::size_t per_category_n, std::uint64_t seed) {
  std::optional<BalancedSample> sample;
  if (per_category_n > 0) {
    sample = sample_balanced(categories, per_category_n, seed);
    for (const auto& w : sample->warnings) std::cerr << "warning: " << w << "\n";
  }
  ConditionTable table;
  for (auto cond : kAllCategories) {
    const std::vector<std::string>* subset = sample ? &sample->pair_ids[cond] : nullptr;
    table[cond] = preference_table(verdicts, categories, cond, subset);
  }
  return table;
}

}  // namespace

std::string file_digest(const fs::path& path) {
  if (!fs::exists(path)) return "absent";
  if (fs::is_directory(path)) return to_hex(corpus_digest(load_corpus(path)));
  return Digest().update(read_file(path)).hex();
}

void stage_portrait_build(const fs::path& corpus, const fs::path& out, const PortraitParams& params) {
  const std::vector<Document> docs = load_corpus(corpus);
  const Portrait portrait = build_portrait(docs, params);
  save_portrait_file(portrait, out);
  std::cerr << "portrait: " << docs.size() << " documents, " << portrait.element_count()
            << " windows, m=" << portrait.params().bit_count << " k=" << portrait.params().hash_count
            << "\n";
}

void stage_portrait_query(const fs::path& portrait_path, const fs::path& pairs_path,
                          const fs::path& out, double threshold) {
  const Portrait portrait = load_portrait_file(portrait_path);
  const PairLoadResult loaded = load_pairs_verbose(pairs_path);
  std::vector<PaddedQuery> queries;
  std::vector<VariantExposure> rows;
  for (const auto& pair : loaded.pairs) {
    for (Variant v : {Variant::kBug, Variant::kFix}) {
      PaddedQuery q;
      try {
        q = variant_query(pair, v, portrait.params());
      } catch (const SpanError& e) {
        std::cerr << "warning: " << e.what() << "; reported as unsound\n";
        q = PaddedQuery{};
        q.unsound = true;
      }
      queries.push_back(std::move(q));
      rows.push_back({pair.pair_id, v, {}});
    }
  }
  const std::vector<ExposureReport> reports = query_exposure_batch(portrait, queries, threshold);
  std::vector<Json> out_rows;
  out_rows.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].report = reports[i];
    out_rows.push_back(exposure_to_json(rows[i]));
  }
  write_jsonl(out, out_rows);
}

void stage_stratify(const fs::path& pairs_path, const fs::path& exposure_path, const fs::path& out,
                    const fs::path& summary_csv, bool include_unsound) {
  const PairLoadResult loaded = load_pairs_verbose(pairs_path);
  const std::vector<VariantExposure> exposure = load_exposure(exposure_path);
  const StratifyResult strat = stratify(loaded.pairs, exposure, include_unsound);
  if (!strat.excluded.empty()) {
    std::cerr << "stratify: " << strat.excluded.size()
              << " pairs excluded (unsound membership query)\n";
  }

  std::map<std::pair<std::string, Variant>, const ExposureReport*> by_key;
  for (const auto& e : exposure) by_key[{e.pair_id, e.variant}] = &e.report;
  const std::set<std::string> excluded(strat.excluded.begin(), strat.excluded.end());
  std::vector<Json> records;
  for (const auto& pair : loaded.pairs) {
    const ExposureReport& bug = *by_key.at({pair.pair_id, Variant::kBug});
    const ExposureReport& fix = *by_key.at({pair.pair_id, Variant::kFix});
    CategoryRecord r;
    r.pair_id = pair.pair_id;
    r.category = category_from_seen(bug.seen, fix.seen);
    r.excluded = excluded.contains(pair.pair_id);
    r.bug_category = pair.bug_category;
    r.commits_until_fix = pair.commits_until_fix;
    r.bug_score = bug.exposure_score;
    r.fix_score = fix.exposure_score;
    records.push_back(category_to_json(r));
  }
  write_jsonl(out, records);
  write_file(summary_csv, emit_exposure_table(summarize_exposure(loaded.pairs, strat.categories)));
}

void stage_score(const fs::path& tokenprobs, const fs::path& categories_path, const fs::path& out,
                 const fs::path& tables_dir, const ScoreStageOptions& options) {
  std::size_t clamped = 0;
  const std::vector<TokenProbSequence> seqs = load_tokenprobs(tokenprobs, {}, &clamped);
  if (clamped > 0) {
    std::cerr << "warning: " << clamped << " zero probabilities clamped to 1e-12\n";
  }
  const std::vector<MetricVector> vectors = metric_vectors(seqs);

  std::vector<std::string> order;
  std::map<std::string, std::array<const MetricVector*, 2>> by_pair;
  std::vector<Json> metric_rows;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    auto [it, fresh] = by_pair.try_emplace(seqs[i].pair_id);
    if (fresh) order.push_back(seqs[i].pair_id);
    it->second[seqs[i].variant == Variant::kBug ? 0 : 1] = &vectors[i];
    metric_rows.push_back(metric_vector_to_json(seqs[i].pair_id, seqs[i].variant, vectors[i]));
  }

  std::vector<PreferenceVerdict> verdicts;
  std::vector<Json> verdict_rows;
  for (const auto& id : order) {
    const auto& v = by_pair.at(id);
    if (!v[0] || !v[1]) {
      std::cerr << "warning: pair " << id << " lacks a bug or fix sequence; skipped\n";
      continue;
    }
    for (Metric m : kAllMetrics) {
      verdicts.push_back({id, m, prefer(*v[0], *v[1], m)});
      verdict_rows.push_back(verdict_to_json(verdicts.back()));
    }
  }
  write_jsonl(out, verdict_rows);
  write_jsonl(out.parent_path() / "metrics.jsonl", metric_rows);

  const auto records = load_categories(categories_path);
  const ConditionTable table =
      condition_table(verdicts, category_map(records), options.per_category_n, options.sample_seed);
  write_file(tables_dir / "preference.csv", emit_preference_csv(table));
  write_file(tables_dir / "preference.json", preference_table_json(options.model, table).dump(2) + "\n");
}

void stage_match(const fs::path& generations, const fs::path& pairs_path,
                 const fs::path& categories_path, const fs::path& out, const fs::path& rates_csv,
                 MatchMode mode) {
  std::size_t off = 0;
  const std::vector<GenerationRecord> gens = load_generations(generations, &off);
  if (off > 0) {
    std::cerr << "warning: " << off << " generation records do not have exactly "
              << kExpectedCompletions << " completions\n";
  }
  const PairLoadResult loaded = load_pairs_verbose(pairs_path);
  std::map<std::string_view, const BugFixPair*> pairs;
  for (const auto& p : loaded.pairs) pairs[p.pair_id] = &p;

  std::vector<MatchOutcome> outcomes;
  std::vector<Json> rows;
  for (const auto& g : gens) {
    const auto it = pairs.find(g.pair_id);
    if (it == pairs.end()) {
      std::cerr << "warning: generations for unknown pair " << g.pair_id << "; skipped\n";
      continue;
    }
    outcomes.push_back(classify_outcome(g, *it->second, mode));
    rows.push_back(outcome_to_json(outcomes.back()));
  }
  write_jsonl(out, rows);
  const auto records = load_categories(categories_path);
  write_file(rates_csv, emit_generation_rates(outcome_rates(outcomes, category_map(records))));
}

void stage_refmodel_train(const fs::path& corpus, const fs::path& out,
                          const NGramModel::Options& options) {
  const std::vector<Document> docs = load_corpus(corpus);
  save_model_file(NGramModel::train(docs, options), out);
}

void stage_refmodel_score(const fs::path& model_path, const fs::path& pairs_path, const fs::path& out) {
  const NGramModel model = load_model_file(model_path);
  const PairLoadResult loaded = load_pairs_verbose(pairs_path);
  const auto requests = score_requests(loaded.pairs);
  const auto seqs = score_batch(model, requests);
  std::vector<Json> rows;
  rows.reserve(seqs.size());
  for (const auto& s : seqs) rows.push_back(tokenprobs_to_json(s));
  write_jsonl(out, rows);
}

void stage_refmodel_generate(const fs::path& model_path, const fs::path& pairs_path,
                             const fs::path& out, const GenerateOptions& options) {
  const NGramModel model = load_model_file(model_path);
  const PairLoadResult loaded = load_pairs_verbose(pairs_path);
  const auto records = generate_batch(model, loaded.pairs, options);
  std::vector<Json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(generation_to_json(r));
  write_jsonl(out, rows);
}

void stage_report(const fs::path& run_dir, const fs::path& out_dir) {
  const fs::path categories_path = run_dir / "categories.jsonl";
  if (!fs::exists(categories_path)) throw IoError("missing " + categories_path.string());
  const std::vector<CategoryRecord> records = load_categories(categories_path);
  const auto categories = category_map(records);

  Json run = Json::object();
  if (fs::exists(run_dir / "run.json")) run = Json::parse(read_file(run_dir / "run.json"));
  const Json manifest_base = run.value("manifest", Json::object());
  const std::string model = manifest_base.value("scorer", std::string("unknown"));
  const std::size_t per_category_n = manifest_base.value("per_category_n", std::size_t{0});
  const std::uint64_t sample_seed =
      manifest_base.contains("seeds") ? manifest_base["seeds"].value("sample", std::uint64_t{0}) : 0;

  std::vector<BugFixPair> pairs;
  pairs.reserve(records.size());
  for (const auto& r : records) {
    BugFixPair p;
    p.pair_id = r.pair_id;
    p.commits_until_fix = r.commits_until_fix;
    pairs.push_back(std::move(p));
  }
  const ExposureSummary summary = summarize_exposure(pairs, categories);

  std::vector<PreferenceVerdict> verdicts;
  if (fs::exists(run_dir / "verdicts.jsonl")) verdicts = load_verdicts(run_dir / "verdicts.jsonl");
  std::vector<MatchOutcome> outcomes;
  if (fs::exists(run_dir / "outcomes.jsonl")) outcomes = load_outcomes(run_dir / "outcomes.jsonl");

  const ConditionTable table = condition_table(verdicts, categories, per_category_n, sample_seed);
  const auto breakdown = category_breakdown(verdicts, records);
  const auto rates = outcome_rates(outcomes, categories);

  constexpr std::array<ExposureCategory, 2> kXor = {ExposureCategory::kOnlyFix,
                                                    ExposureCategory::kOnlyBug};
  constexpr std::array<ExposureCategory, 2> kAndNor = {ExposureCategory::kBoth,
                                                       ExposureCategory::kNeither};
  write_file(out_dir / "table1.csv", emit_exposure_table(summary));
  write_file(out_dir / "table2_xor.csv", emit_preference_tables(model, table, kXor));
  write_file(out_dir / "table3_and_nor.csv", emit_preference_tables(model, table, kAndNor));
  write_file(out_dir / "categories.csv", emit_category_breakdown(breakdown));
  write_file(out_dir / "generation_rates.csv", emit_generation_rates(rates));

  Json sidecar = {{"exposure", exposure_summary_json(summary)},
                  {"preference", preference_table_json(model, table)},
                  {"generation_rates", generation_rates_json(rates)}};
  write_file(out_dir / "report.json", sidecar.dump(2) + "\n");

  Json manifest = manifest_base;
  manifest["tool_version"] = kToolVersion;
  manifest["report_inputs"] = {{"categories", file_digest(categories_path)},
                               {"verdicts", file_digest(run_dir / "verdicts.jsonl")},
                               {"outcomes", file_digest(run_dir / "outcomes.jsonl")}};
  if (run.contains("config")) manifest["config"] = run["config"];
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kBuild: return "build";
    case Stage::kQuery: return "query";
    case Stage::kStratify: return "stratify";
    case Stage::kTrain: return "train";
    case Stage::kScoreModel: return "refmodel-score";
    case Stage::kGenerate: return "generate";
    case Stage::kScore: return "score";
    case Stage::kMatch: return "match";
    case Stage::kReport: return "report";
  }
  return "unknown";
}

void RunConfig::validate() {
  portrait.validate();
  if (corpus.empty()) throw Error("config: corpus path is required");
  if (pairs.empty()) throw Error("config: pairs path is required");
  if (run_dir.empty()) throw Error("config: run_dir is required");
  if (!(threshold >= 0.0)) throw Error("config: threshold must be non-negative");
  if (decoding.temperature < 0.0) throw Error("config: temperature must be >= 0");
  if (!(decoding.top_p > 0.0 && decoding.top_p <= 1.0)) throw Error("config: top_p must lie in (0, 1]");
  if (!(refmodel.alpha > 0.0)) throw Error("config: refmodel alpha must be positive");
  // Every random stream derives from the one root seed.
  portrait.hash_seed = mix64(seed ^ 0x706f727472616974ULL);
  refmodel.seed = mix64(seed ^ 0x6d6f64656cULL);
  decoding.seed = mix64(seed ^ 0x67656e6572617465ULL);
}

namespace {

std::uint64_t sample_seed_of(const RunConfig& c) { return mix64(c.seed ^ 0x73616d706c65ULL); }

template <typename T>
void take(const Json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(std::string("config: field \"") + key + "\" has the wrong type");
  }
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const char* where) {
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw Error(std::string("config: unknown key \"") + k + "\" in " + where);
    }
  }
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (Stage st : {Stage::kBuild, Stage::kQuery, Stage::kStratify, Stage::kTrain, Stage::kScoreModel,
                   Stage::kGenerate, Stage::kScore, Stage::kMatch, Stage::kReport}) {
    if (stage_name(st) == s) return st;
  }
  return std::nullopt;
}

}  // namespace

RunConfig run_config_from_json(const Json& j, const fs::path& base) {
  if (!j.is_object()) throw Error("config: top level must be an object");
  check_keys(j,
             {"corpus", "pairs", "run_dir", "portrait", "threshold", "include_unsound", "seed",
              "per_category_n", "match_mode", "refmodel", "decoding", "tokenprobs", "generations",
              "scorer", "jobs", "stages"},
             "config");
  RunConfig c;
  auto path_of = [&](const char* key) -> std::optional<fs::path> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_string()) throw Error(std::string("config: \"") + key + "\" must be a string");
    fs::path p = j.at(key).get<std::string>();
    return p.is_relative() && !base.empty() ? base / p : p;
  };
  if (auto p = path_of("corpus")) c.corpus = *p;
  if (auto p = path_of("pairs")) c.pairs = *p;
  if (auto p = path_of("run_dir")) c.run_dir = *p;
  c.tokenprobs = path_of("tokenprobs");
  c.generations = path_of("generations");
  if (j.contains("portrait")) {
    const Json& p = j.at("portrait");
    check_keys(p, {"width", "stride", "fpr", "expected_elements"}, "portrait");
    take(p, "width", c.portrait.width);
    take(p, "stride", c.portrait.stride);
    take(p, "fpr", c.portrait.target_fpr);
    take(p, "expected_elements", c.portrait.expected_elements);
  }
  take(j, "threshold", c.threshold);
  take(j, "include_unsound", c.include_unsound);
  take(j, "seed", c.seed);
  take(j, "per_category_n", c.per_category_n);
  if (j.contains("match_mode")) {
    std::string mode;
    take(j, "match_mode", mode);
    if (mode == "exact") {
      c.match_mode = MatchMode::kExactFirstLine;
    } else if (mode == "contains") {
      c.match_mode = MatchMode::kContains;
    } else {
      throw Error("config: match_mode must be \"exact\" or \"contains\"");
    }
  }
  if (j.contains("refmodel")) {
    const Json& r = j.at("refmodel");
    check_keys(r, {"order", "alpha"}, "refmodel");
    take(r, "order", c.refmodel.order);
    take(r, "alpha", c.refmodel.alpha);
  }
  if (j.contains("decoding")) {
    const Json& d = j.at("decoding");
    check_keys(d, {"samples", "max_new_tokens", "temperature", "top_p", "context_limit"}, "decoding");
    take(d, "samples", c.decoding.n_samples);
    take(d, "max_new_tokens", c.decoding.max_chars);
    take(d, "temperature", c.decoding.temperature);
    take(d, "top_p", c.decoding.top_p);
    take(d, "context_limit", c.decoding.context_limit);
  }
  take(j, "scorer", c.scorer);
  take(j, "jobs", c.jobs);
  if (j.contains("stages")) {
    std::vector<std::string> names;
    take(j, "stages", names);
    for (const auto& n : names) {
      const auto st = parse_stage(n);
      if (!st) throw Error("config: unknown stage \"" + n + "\"");
      c.stages.push_back(*st);
    }
  }
  return c;
}

Json run_config_to_json(const RunConfig& c, bool include_run_dir) {
  Json j = {{"corpus", c.corpus.generic_string()},
            {"pairs", c.pairs.generic_string()},
            {"portrait",
             {{"width", c.portrait.width},
              {"stride", c.portrait.stride},
              {"fpr", c.portrait.target_fpr},
              {"expected_elements", c.portrait.expected_elements}}},
            {"threshold", c.threshold},
            {"include_unsound", c.include_unsound},
            {"seed", c.seed},
            {"per_category_n", c.per_category_n},
            {"match_mode", c.match_mode == MatchMode::kContains ? "contains" : "exact"},
            {"refmodel", {{"order", c.refmodel.order}, {"alpha", c.refmodel.alpha}}},
            {"decoding",
             {{"samples", c.decoding.n_samples},
              {"max_new_tokens", c.decoding.max_chars},
              {"temperature", c.decoding.temperature},
              {"top_p", c.decoding.top_p},
              {"context_limit", c.decoding.context_limit}}},
            {"tokenprobs", c.tokenprobs ? Json(c.tokenprobs->generic_string()) : Json(nullptr)},
            {"generations", c.generations ? Json(c.generations->generic_string()) : Json(nullptr)},
            {"scorer", c.scorer},
            {"jobs", c.jobs}};
  if (include_run_dir) j["run_dir"] = c.run_dir.generic_string();
  Json stages = Json::array();
  for (Stage s : c.stages) stages.push_back(stage_name(s));
  j["stages"] = stages;
  return j;
}

RunResult run_pipeline(RunConfig config) {
  config.validate();
  if (config.jobs > 0) set_jobs(config.jobs);
  const fs::path dir = config.run_dir;
  fs::create_directories(dir / "cache");

  RunResult result;
  result.run_dir = dir;
  auto selected = [&](Stage s) {
    return config.stages.empty() ||
           std::find(config.stages.begin(), config.stages.end(), s) != config.stages.end();
  };

  // Runs `body` unless the stored key for `stage` equals `key` and every
  // output exists.
  auto run_stage = [&](Stage stage, const std::string& key, const std::vector<fs::path>& outputs,
                       const std::function<void()>& body) {
    const std::string name(stage_name(stage));
    if (!selected(stage)) return;
    const fs::path key_file = dir / "cache" / (name + ".key");
    const bool outputs_present =
        std::all_of(outputs.begin(), outputs.end(), [](const fs::path& p) { return fs::exists(p); });
    if (outputs_present && fs::exists(key_file) && read_file(key_file) == key) {
      result.cached.push_back(name);
      std::cerr << "[" << name << "] cached\n";
      return;
    }
    std::cerr << "[" << name << "] running\n";
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
    write_file(key_file, key);
    result.executed.push_back(name);
  };
  auto key_of = [&](Stage stage, std::initializer_list<std::string> parts) {
    Digest d;
    d.update(kToolVersion).update(stage_name(stage));
    for (const auto& p : parts) d.update(p);
    return d.hex();
  };

  const Json merged = run_config_to_json(config, false);
  std::cerr << "config: " << merged.dump() << "\n";

  const fs::path portrait = dir / "portrait.xpdp";
  const fs::path exposure = dir / "exposure.jsonl";
  const fs::path categories = dir / "categories.jsonl";
  const fs::path table1 = dir / "table1.csv";
  const fs::path model = dir / "model.xpnm";
  const fs::path tokenprobs = config.tokenprobs.value_or(dir / "tokenprobs.jsonl");
  const fs::path generations = config.generations.value_or(dir / "generations.jsonl");
  const fs::path verdicts = dir / "verdicts.jsonl";
  const fs::path rates = dir / "rates.csv";
  const fs::path outcomes = dir / "outcomes.jsonl";

  std::string corpus_digest_hex;
  try {
    corpus_digest_hex = file_digest(config.corpus);
    if (corpus_digest_hex == "absent") throw IoError("corpus not found: " + config.corpus.string());
    if (!fs::exists(config.pairs)) throw IoError("pairs file not found: " + config.pairs.string());
  } catch (const std::exception& e) {
    throw StageError("build", e.what());
  }
  const std::string pairs_digest = file_digest(config.pairs);
  const PortraitParams& pp = config.portrait;

  run_stage(Stage::kBuild,
            key_of(Stage::kBuild, {corpus_digest_hex, std::to_string(pp.width), std::to_string(pp.stride),
                                   Json(pp.target_fpr).dump(), std::to_string(pp.hash_seed),
                                   std::to_string(pp.expected_elements)}),
            {portrait}, [&] { stage_portrait_build(config.corpus, portrait, pp); });

  run_stage(Stage::kQuery,
            key_of(Stage::kQuery, {file_digest(portrait), pairs_digest, Json(config.threshold).dump()}),
            {exposure}, [&] { stage_portrait_query(portrait, config.pairs, exposure, config.threshold); });

  run_stage(Stage::kStratify,
            key_of(Stage::kStratify, {pairs_digest, file_digest(exposure),
                                      config.include_unsound ? "1" : "0"}),
            {categories, table1},
            [&] { stage_stratify(config.pairs, exposure, categories, table1, config.include_unsound); });

  const bool need_model = !config.tokenprobs || !config.generations;
  std::string scorer = config.scorer;
  if (need_model) {
    run_stage(Stage::kTrain,
              key_of(Stage::kTrain, {corpus_digest_hex, std::to_string(config.refmodel.order),
                                     Json(config.refmodel.alpha).dump(),
                                     std::to_string(config.refmodel.seed)}),
              {model}, [&] { stage_refmodel_train(config.corpus, model, config.refmodel); });
  }
  if (scorer.empty()) {
    if (config.tokenprobs) {
      scorer = "external";
    } else {
      std::ostringstream id;
      id << "refmodel-char" << config.refmodel.order << "-a" << config.refmodel.alpha;
      scorer = id.str();
    }
  }
  if (!config.tokenprobs) {
    run_stage(Stage::kScoreModel, key_of(Stage::kScoreModel, {file_digest(model), pairs_digest}),
              {tokenprobs}, [&] { stage_refmodel_score(model, config.pairs, tokenprobs); });
  }
  const GenerateOptions& g = config.decoding;
  if (!config.generations) {
    run_stage(Stage::kGenerate,
              key_of(Stage::kGenerate,
                     {file_digest(model), pairs_digest, std::to_string(g.n_samples),
                      std::to_string(g.max_chars), Json(g.temperature).dump(), Json(g.top_p).dump(),
                      std::to_string(g.seed), std::to_string(g.context_limit)}),
              {generations}, [&] { stage_refmodel_generate(model, config.pairs, generations, g); });
  }

  ScoreStageOptions score_opts;
  score_opts.per_category_n = config.per_category_n;
  score_opts.sample_seed = sample_seed_of(config);
  score_opts.model = scorer;
  run_stage(Stage::kScore,
            key_of(Stage::kScore, {file_digest(tokenprobs), file_digest(categories),
                                   std::to_string(config.per_category_n),
                                   std::to_string(score_opts.sample_seed), scorer}),
            {verdicts, dir / "metrics.jsonl", dir / "tables" / "preference.csv"},
            [&] { stage_score(tokenprobs, categories, verdicts, dir / "tables", score_opts); });

  run_stage(Stage::kMatch,
            key_of(Stage::kMatch, {file_digest(generations), pairs_digest, file_digest(categories),
                                   config.match_mode == MatchMode::kContains ? "contains" : "exact"}),
            {outcomes, rates},
            [&] { stage_match(generations, config.pairs, categories, outcomes, rates, config.match_mode); });

  // Everything needed to re-run with the reference model.
  Json manifest = {
      {"tool_version", kToolVersion},
      {"portrait",
       {{"corpus_digest", fs::exists(portrait) ? to_hex(load_portrait_file(portrait).corpus_digest())
                                               : std::string("absent")},
        {"file_digest", file_digest(portrait)},
        {"width", pp.width},
        {"stride", pp.stride},
        {"fpr", pp.target_fpr},
        {"hash_seed", pp.hash_seed}}},
      {"dataset_digest", pairs_digest},
      {"scorer", scorer},
      {"decoding",
       {{"samples", g.n_samples},
        {"max_new_tokens", g.max_chars},
        {"temperature", g.temperature},
        {"top_p", g.top_p},
        {"context_limit", g.context_limit}}},
      {"threshold", config.threshold},
      {"per_category_n", config.per_category_n},
      {"seeds",
       {{"root", config.seed},
        {"portrait", pp.hash_seed},
        {"refmodel", config.refmodel.seed},
        {"generate", g.seed},
        {"sample", score_opts.sample_seed}}}};
  const Json run = {{"config", merged}, {"manifest", manifest}};
  const std::string run_text = run.dump(2) + "\n";
  if (!fs::exists(dir / "run.json") || read_file(dir / "run.json") != run_text) {
    write_file(dir / "run.json", run_text);
  }

  const fs::path report = dir / "report";
  run_stage(Stage::kReport,
            key_of(Stage::kReport, {file_digest(categories), file_digest(verdicts),
                                    file_digest(outcomes), file_digest(dir / "run.json")}),
            {report / "table1.csv", report / "manifest.json"}, [&] { stage_report(dir, report); });
  return result;
}

}  // namespace xprobe
