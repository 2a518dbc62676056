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

#ifndef FACTOPT_STAGE2_HPP
#define FACTOPT_STAGE2_HPP

#include <vector>

#include "factopt/domain.hpp"
#include "factopt/fdsolver.hpp"
#include "factopt/stage1.hpp"

namespace factopt {

struct Stage2Params {
  long long node_limit = 0;   // 0 = unlimited
  double time_limit_s = 0.0;  // 0 = unlimited
};

// Where the 3x3 assembler blocks sit. Blocks are numbered 1..K in row-major
// anchor order; which production-plan slot runs in which block is decided by
// the layout stage.
struct PackingLayout {
  std::vector<GridCoord> anchors;  // north-west corner per block
  Grid<int> block_at;              // 0 = free tile, else block id

  // Row-major tile indices of the anchors; the ledger key for a packing.
  std::vector<int> anchor_flat() const;
};

struct Stage2Outcome {
  fd::SolveStatus status = fd::SolveStatus::Unsat;
  PackingLayout layout;  // meaningful when status == Sat
  long long nodes = 0;
};

// Places one 3x3 block per active plan slot: in bounds, pairwise disjoint,
// clear of sources and the destination, and with enough free side-adjacent
// tiles that every block can be matched to an active slot and host that
// slot's inserters on distinct tiles. Packings whose anchor set equals an
// entry of `excluded` are ruled out. Returns the first acceptable packing
// in deterministic order.
Stage2Outcome solve_stage2(const ProblemInstance& inst,
                           const Stage1Solution& plan,
                           const Stage2Params& params,
                           const std::vector<PackingLayout>& excluded);

}  // namespace factopt

#endif  // FACTOPT_STAGE2_HPP
