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

#ifndef FACTOPT_STAGE1_HPP
#define FACTOPT_STAGE1_HPP

#include <vector>

#include "factopt/domain.hpp"
#include "factopt/fdsolver.hpp"

namespace factopt {

struct Stage1Params {
  // Flat cost per active assembler in the production-plan objective.
  int assembler_penalty = 9;
  long long node_limit = 0;   // 0 = unlimited
  double time_limit_s = 0.0;  // 0 = unlimited
};

// A production plan: which recipe each assembler slot runs, how fast, and
// how many inserters move each item in and the product out. Slots are
// interchangeable placeholders; the packing stage decides where they go.
struct Stage1Solution {
  std::vector<int> recipe_idx;  // per slot, 1-based into recipes, 0 = unused
  std::vector<int> rate;        // product items/min per slot
  // inserters_in[slot][item id], vectors sized num_items + 1; index 0 unused.
  std::vector<std::vector<int>> inserters_in;
  std::vector<int> inserters_out;  // per slot
  long long objective = 0;

  int num_active() const;
  int total_inserters(int slot) const;
};

struct Stage1Outcome {
  fd::SolveStatus status = fd::SolveStatus::Unsat;
  Stage1Solution solution;  // meaningful when status == Sat
  long long nodes = 0;
};

// Maximizes output-item production minus assembler and inserter penalties,
// subject to per-item flow balance against the source supplies, recipe rate
// caps, and exact inserter counts (ceil of flow over inserter throughput).
// Plans whose (recipe, total-inserter) profile matches an entry of
// `excluded` are ruled out; slots are canonicalized by sorting to avoid
// re-deriving permutations of rejected plans.
Stage1Outcome solve_stage1(const ProblemInstance& inst,
                           const ModelBounds& bounds,
                           const Stage1Params& params,
                           const std::vector<Stage1Solution>& excluded);

}  // namespace factopt

#endif  // FACTOPT_STAGE1_HPP
