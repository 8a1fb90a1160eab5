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

// OpenMP kernels against their single-threaded reference versions.

#include <benchmark/benchmark.h>

#include <vector>

#include "xprobe/membership.hpp"
#include "xprobe/metrics.hpp"
#include "xprobe/portrait.hpp"
#include "xprobe/reference.hpp"
#include "xprobe/refmodel.hpp"
#include "xprobe/synth.hpp"

namespace {

using namespace xprobe;

const std::vector<Document>& corpus() {
  static const std::vector<Document> docs = [] {
    synth::Rng rng(1);
    std::vector<Document> d;
    for (int i = 0; i < 2000; ++i) d.push_back({"d" + std::to_string(i), synth::java_file(rng, 40)});
    return d;
  }();
  return docs;
}

const std::vector<PaddedQuery>& queries() {
  static const std::vector<PaddedQuery> qs = [] {
    synth::Rng rng(2);
    std::vector<PaddedQuery> out;
    for (int i = 0; i < 20000; ++i) {
      const CanonicalStream s = canonicalize(corpus()[rng.below(corpus().size())].text);
      const std::size_t b = rng.below(s.size() - 99);
      out.push_back(pad_query(s, {b, b + 20}, PortraitParams{}));
    }
    return out;
  }();
  return qs;
}

const Portrait& portrait() {
  static const Portrait p = build_portrait(corpus(), PortraitParams{});
  return p;
}

const std::vector<TokenProbSequence>& sequences() {
  static const std::vector<TokenProbSequence> seqs = [] {
    synth::Rng rng(3);
    std::vector<TokenProbSequence> out(20000);
    for (auto& s : out) {
      s.probs.resize(1 + rng.below(200));
      for (auto& p : s.probs) p = 1.0 - rng.uniform();
      s.tokens.assign(s.probs.size(), "a");
    }
    return out;
  }();
  return seqs;
}

const NGramModel& model() {
  static const NGramModel m = NGramModel::train(corpus(), NGramModel::Options{});
  return m;
}

const std::vector<ScoreRequest>& requests() {
  static const std::vector<ScoreRequest> rs = [] {
    synth::Rng rng(4);
    std::vector<ScoreRequest> out;
    for (int i = 0; i < 500; ++i) {
      const BugFixPair p = synth::make_pair(rng, "p" + std::to_string(i));
      out.push_back({p.pair_id, Variant::kBug, p.context_before, p.bug_text});
      out.push_back({p.pair_id, Variant::kFix, p.context_before, p.fix_text});
    }
    return out;
  }();
  return rs;
}

void BM_BuildParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_portrait(corpus(), PortraitParams{}));
}
void BM_BuildReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ref::build_portrait(corpus(), PortraitParams{}));
}
void BM_QueryParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(query_exposure_batch(portrait(), queries()));
}
void BM_QueryReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ref::query_exposure_batch(portrait(), queries()));
}
void BM_MetricsParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(metric_vectors(sequences()));
}
void BM_MetricsReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ref::metric_vectors(sequences()));
}
void BM_ScoreParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(score_batch(model(), requests()));
}
void BM_ScoreReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ref::score_batch(model(), requests()));
}

BENCHMARK(BM_BuildParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QueryParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QueryReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MetricsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MetricsReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreReference)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  portrait();
  queries();
  sequences();
  model();
  requests();
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
