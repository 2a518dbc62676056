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

#ifndef FACTOPT_VALIDATOR_HPP
#define FACTOPT_VALIDATOR_HPP

#include <boost/rational.hpp>
#include <string>
#include <vector>

#include "factopt/blueprint.hpp"
#include "factopt/domain.hpp"

namespace factopt {

// Exact item rate in items/min; rationals keep the steady-state fixed point
// free of float drift so ties are adjudicated exactly.
using Rate = boost::rational<long long>;

struct FlowReport {
  Grid<Rate> tile_rate;           // items/min moved across each tile
  std::vector<Rate> utilization;  // per assembler: achieved / recipe rate
  Rate delivered_rate{0};
  std::vector<GridCoord> starved;  // inserters that receive zero flow

  std::string to_text() const;
};

// Structural legality of a finished blueprint against the game rules:
// object disjointness, route acyclicity and bounds, carrying consistency,
// source/destination usage, and per-recipe inserter adjacency. Returns
// human-readable diagnostics with tile coordinates; empty means legal.
std::vector<std::string> validate_structure(const Blueprint& bp,
                                            const ProblemInstance& inst);

// Steady-state rate propagation: sources emit declared rates, conveyors
// forward capped at conveyor_capacity, inserters move up to inserter_rate
// draining shared belts upstream-first, assemblers produce at the tightest
// ingredient ratio. Runs to the fixed point of this monotone map.
FlowReport simulate_flow(const Blueprint& bp, const ProblemInstance& inst);

struct LayoutOracleResult {
  bool feasible = false;
  long long objective = 0;
};

// Exhaustive layout search for tiny instances (w*h <= 12, <= 2 items):
// enumerates every object grid, filters with validate_structure, and
// returns the cheapest conveyor/inserter cost. Throws std::invalid_argument
// when the instance exceeds the enumeration guard.
LayoutOracleResult brute_force_layout_oracle(const ProblemInstance& inst,
                                             long long conveyor_penalty = 2,
                                             long long inserter_penalty = 1);

}  // namespace factopt

#endif  // FACTOPT_VALIDATOR_HPP
