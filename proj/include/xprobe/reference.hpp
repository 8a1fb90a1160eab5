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

// Single-threaded reference versions of the OpenMP kernels.  They follow
// the definitions literally and exist so tests and benchmarks can compare
// the parallel paths against them.

#include <span>
#include <vector>

#include "xprobe/membership.hpp"
#include "xprobe/metrics.hpp"
#include "xprobe/portrait.hpp"
#include "xprobe/refmodel.hpp"

namespace xprobe::ref {

// One filter, documents inserted in order.
Portrait build_portrait(std::span<const Document> documents, PortraitParams params);

// Window-by-window membership with a per-token coverage mask.
ExposureReport query_exposure(const Portrait& portrait, const PaddedQuery& query,
                              double threshold = kDefaultSeenThreshold);
std::vector<ExposureReport> query_exposure_batch(const Portrait& portrait,
                                                 std::span<const PaddedQuery> queries,
                                                 double threshold = kDefaultSeenThreshold);

// Direct definitions: product-free log sums and the O(n^2) pairwise Gini.
MetricVector metric_vector(std::span<const double> probs);
std::vector<MetricVector> metric_vectors(std::span<const TokenProbSequence> seqs);

std::vector<TokenProbSequence> score_batch(const NGramModel& model,
                                           std::span<const ScoreRequest> requests);

}  // namespace xprobe::ref
