// Copyright 2026 The factopt Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FACTOPT_ORCHESTRATOR_HPP
#define FACTOPT_ORCHESTRATOR_HPP

#include <string>
#include <vector>

#include "factopt/blueprint.hpp"
#include "factopt/domain.hpp"
#include "factopt/stage1.hpp"
#include "factopt/stage2.hpp"
#include "factopt/stage3.hpp"

namespace factopt {

struct RunConfig {
  int max_stage1_attempts = 64;
  int max_stage2_attempts_per_stage1 = 256;
  // Per-stage wall-clock limits in seconds; 0 disables. Leaving them off
  // keeps runs deterministic, which the test suites rely on.
  double stage1_time_limit_s = 0.0;
  double stage2_time_limit_s = 0.0;
  double stage3_time_limit_s = 0.0;
  long long conveyor_penalty = 2;
  long long inserter_penalty = 1;
  int assembler_penalty = 9;
  // When set, every intermediate solution and the final report are written
  // here as text files with run-to-run byte-identical contents.
  std::string dump_dir;
};

enum class RunOutcome { Solved, Infeasible, LimitReached };

struct StageTimes {
  double stage1_s = 0.0;
  double stage2_s = 0.0;
  double stage3_s = 0.0;
};

struct RunReport {
  RunOutcome outcome = RunOutcome::Infeasible;
  Blueprint blueprint;  // meaningful when outcome == Solved

  int stage1_attempts = 0;
  std::vector<int> stage2_attempts;          // per production plan tried
  std::vector<long long> stage1_objectives;  // records objective decay
  std::vector<int> stage1_assemblers;        // active assemblers per attempt
  long long plan_objective = 0;
  long long layout_objective = 0;

  // Final intermediate artifacts, kept for reporting and debugging.
  Stage1Solution plan;
  PackingLayout packing;
  LayoutSolution layout;

  // Wall-clock per stage; deliberately absent from to_text() so dumps stay
  // byte-identical across runs.
  StageTimes times;

  std::string to_text() const;
};

// Runs the three-stage loop: propose a production plan, pack its assembler
// blocks, then route. A failed routing excludes the packing; a plan whose
// packings are exhausted is excluded and planning re-runs. Infeasible means
// true exhaustion; hitting an attempt cap, node limit, or time limit yields
// LimitReached with the partial report.
RunReport optimize(const ProblemInstance& inst, const RunConfig& cfg);

// Merges a plan, a packing, and a routed layout into the final blueprint.
// The predicted rate sums the planned rates of output-item producers plus
// any sources that supply the output item directly.
Blueprint assemble_blueprint(const Stage1Solution& plan, const PackingLayout& packing,
                             const LayoutSolution& layout, const ProblemInstance& inst);

}  // namespace factopt

#endif  // FACTOPT_ORCHESTRATOR_HPP
