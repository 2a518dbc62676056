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

#ifndef FACTOPT_BLUEPRINT_HPP
#define FACTOPT_BLUEPRINT_HPP

#include <vector>

#include "factopt/grid.hpp"

namespace factopt {

// A placed 3x3 assembler; `recipe` is a 1-based index into the instance's
// recipe book and `anchor` is the block's north-west tile.
struct BlueprintAssembler {
  GridCoord anchor;
  int recipe = 0;
  bool operator==(const BlueprintAssembler&) const = default;
};

// Finished layout: per-tile conveyor/inserter direction codes (0 = none,
// else Dir) plus the assembler list. `predicted_rate` is the destination
// throughput in items/min the optimizer promised; the flow simulator may
// find less (it knows about starvation, the optimizer does not).
struct Blueprint {
  int width = 0;
  int height = 0;
  Grid<int> conveyors;
  Grid<int> inserters;
  std::vector<BlueprintAssembler> assemblers;
  long long predicted_rate = 0;

  Blueprint() = default;
  Blueprint(int w, int h) : width(w), height(h), conveyors(w, h), inserters(w, h) {}

  bool operator==(const Blueprint&) const = default;
};

}  // namespace factopt

#endif  // FACTOPT_BLUEPRINT_HPP
