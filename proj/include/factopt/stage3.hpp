// Copyright 2026 The factopt Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FACTOPT_STAGE3_HPP_
#define FACTOPT_STAGE3_HPP_

#include <string>
#include <vector>

#include "factopt/domain.hpp"
#include "factopt/fdsolver.hpp"
#include "factopt/grid.hpp"
#include "factopt/stage1.hpp"
#include "factopt/stage2.hpp"

namespace factopt {

// Final per-tile layout: which object sits where, what it carries, and the
// route value that orders the flow. Direction codes follow Dir (1..4);
// 0 means "no object". A tile hosts at most one of conveyor / inserter /
// assembler-block cell.
struct LayoutSolution {
  Grid<int> conveyors;  // 0 or Dir the conveyor moves toward
  Grid<int> inserters;  // 0 or Dir the inserter pushes toward
  Grid<int> routes;     // 0 on empty/assembler tiles, else 1..w+h
  Grid<int> carrying;   // item id on every occupied tile, 0 elsewhere
  // block_slot[b] = plan slot (0-based index into Stage1Solution arrays)
  // assigned to packing block b+1, for blocks in row-major anchor order.
  std::vector<int> block_slot;
  long long objective = 0;

  LayoutSolution() : conveyors(0, 0), inserters(0, 0), routes(0, 0), carrying(0, 0) {}
};

// One placed assembler as the route checker sees it: footprint anchor plus
// the item interface of its recipe.
struct BlockSpec {
  GridCoord anchor;
  int product = 0;
  std::vector<int> ingredients;
};

struct Stage3Params {
  long long conveyor_penalty = 2;
  long long inserter_penalty = 1;
  long long node_limit = 0;   // 0 = unlimited
  double time_limit_s = 0.0;  // 0 = unlimited
};

struct Stage3Outcome {
  fd::SolveStatus status = fd::SolveStatus::Unsat;
  LayoutSolution layout;  // meaningful when status == Sat
  long long nodes = 0;
};

// True when the destination tile must host a conveyor: some active assembler
// produces the output item, or a source supplies it directly.
bool should_deliver(const ProblemInstance& inst, const Stage1Solution& plan);

// Expands a packing + slot assignment into checker-ready block descriptors.
std::vector<BlockSpec> block_specs(const ProblemInstance& inst, const Stage1Solution& plan,
                                   const PackingLayout& packing,
                                   const std::vector<int>& block_slot);

// Verifies the route/carrying semantics of a candidate layout against the
// blueprint geometry. Returns human-readable violations; empty means the
// grids form a well-formed flow: routes start at 1 on source conveyors and
// out-inserters, every fed tile sits exactly one above its longest feeder,
// conveyors merge only same-item flows, inserters bridge their input tile to
// their output tile, and the destination conveyor exists iff `deliver`.
// Solver-independent; shared by tests, the validator, and solution vetting.
std::vector<std::string> check_route_grids(const ProblemInstance& inst,
                                           const std::vector<BlockSpec>& blocks, bool deliver,
                                           const Grid<int>& conveyors,
                                           const Grid<int>& inserters, const Grid<int>& routes,
                                           const Grid<int>& carrying);

// Places inserters and conveyors for one packing: assigns plan slots to
// blocks (bijectively), realizes every per-block inserter count, and routes
// all flows, minimizing conveyor_penalty * #conveyors +
// inserter_penalty * #inserters. Unsat tells the orchestrator to try the
// next packing.
Stage3Outcome solve_stage3(const ProblemInstance& inst, const Stage1Solution& plan,
                           const PackingLayout& packing, const Stage3Params& params);

}  // namespace factopt

#endif  // FACTOPT_STAGE3_HPP_
