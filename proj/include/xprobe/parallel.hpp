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

namespace xprobe {

// Worker count used by the OpenMP kernels.  Resolution order: the last
// set_jobs() call, then $EXPOSURE_PROBE_JOBS, then the OpenMP default.
int jobs();
void set_jobs(int n);

}  // namespace xprobe
