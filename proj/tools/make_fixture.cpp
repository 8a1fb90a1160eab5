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

// make_fixture: writes the synthetic corpus, pairs and config used by the
// end-to-end tests.

#include <iostream>

#include "CLI11.hpp"
#include "xprobe/dataset.hpp"
#include "xprobe/io.hpp"
#include "xprobe/synth.hpp"

int main(int argc, char** argv) {
  using namespace xprobe;
  CLI::App app{"Generate the bundled synthetic fixture"};
  std::string out = "data/fixture";
  std::size_t n_pairs = 120;
  std::size_t n_filler = 60;
  std::uint64_t seed = 7;
  app.add_option("--out", out)->capture_default_str();
  app.add_option("--pairs", n_pairs)->capture_default_str();
  app.add_option("--filler", n_filler, "Unrelated corpus files")->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  synth::Rng rng(seed);
  std::vector<Json> corpus, pairs;
  for (std::size_t i = 0; i < n_filler; ++i) {
    corpus.push_back({{"id", "filler/F" + std::to_string(i) + ".java"},
                      {"content", synth::java_file(rng, 20 + rng.below(40))}});
  }
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const std::string id = "fixture-" + std::to_string(i);
    BugFixPair p = synth::make_pair(rng, id, 8 + rng.below(6), 6 + rng.below(6), 1 + rng.below(5000));
    // Cycle through: neither, both, bug only, fix only, neither.
    const std::size_t slot = i % 5;
    const bool plant_bug = slot == 1 || slot == 2;
    const bool plant_fix = slot == 1 || slot == 3;
    if (plant_bug) {
      const Document d = synth::embed(rng, "planted/" + id + ".bug.java", *p.source_file_bug, rng.below(97));
      corpus.push_back({{"id", d.id}, {"content", d.text}});
    }
    if (plant_fix) {
      const Document d = synth::embed(rng, "planted/" + id + ".fix.java", *p.source_file_fix, rng.below(97));
      corpus.push_back({{"id", d.id}, {"content", d.text}});
    }
    // A few pairs without files to exercise the unsound path.
    if (i % 37 == 36) {
      p.source_file_bug.reset();
      p.source_file_fix.reset();
    }
    pairs.push_back(pair_to_json(p));
  }
  const std::filesystem::path dir = out;
  write_file(dir / "corpus.jsonl", to_jsonl(corpus));
  write_file(dir / "pairs.jsonl", to_jsonl(pairs));
  const Json config = {{"corpus", "corpus.jsonl"},
                       {"pairs", "pairs.jsonl"},
                       {"run_dir", "run"},
                       {"seed", 20240601},
                       {"threshold", 0.9},
                       {"per_category_n", 0}};
  write_file(dir / "config.json", config.dump(2) + "\n");
  std::cerr << "fixture: " << corpus.size() << " documents, " << pairs.size() << " pairs -> " << out
            << "\n";
  return 0;
}
