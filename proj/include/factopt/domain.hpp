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

#ifndef FACTOPT_DOMAIN_HPP
#define FACTOPT_DOMAIN_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "factopt/grid.hpp"

namespace factopt {

// Thrown for malformed instance documents: JSON syntax errors (message
// carries the byte position reported by the parser), missing fields,
// references to unknown item ids, duplicate recipes.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct SourceSpec {
  GridCoord pos;
  int item = 0;   // item id supplied at this tile
  int rate = 0;   // items per minute the outside world can deliver here
};

// At most one recipe per product item. qty_produced items of `product` per
// craft, consuming ingredients[j] items of j per craft; `rate` is the
// production rate in items per minute when crafting continuously.
struct Recipe {
  int product = 0;
  int qty_produced = 1;
  int rate = 0;
  std::map<int, int> ingredients;  // item id -> per-craft quantity
};

struct ProblemInstance {
  int width = 0;
  int height = 0;
  int num_items = 0;
  int out_item = 0;
  int inserter_rate = 50;       // items per minute through one inserter
  int conveyor_capacity = 450;  // items per minute along one conveyor tile
  std::vector<SourceSpec> sources;
  GridCoord destination;
  std::vector<Recipe> recipes;

  // nullptr when no recipe produces `item`.
  const Recipe* recipe_for(int item) const;
  bool is_source_tile(GridCoord c) const;
  // Rates summed over all sources supplying `item`.
  int supply_rate(int item) const;
};

// Search-space bounds shared by the stage models.
struct ModelBounds {
  int max_rate = 0;           // largest per-recipe production rate
  int max_assemblers = 0;     // floor(w/3) * floor(h/3)
  int max_consumption = 0;    // largest single-ingredient flow, items/min
  int max_inserters_in = 1;   // per assembler and ingredient, clamped to 1..12
  int max_inserters_out = 1;  // per assembler, clamped to 1..12
};

// Parses a JSON instance document. Throws ParseError on syntax errors,
// missing fields, unknown item ids, or duplicate recipes. Geometric and
// semantic problems are left to validate_instance.
ProblemInstance parse_instance(const std::string& json_text);

// Returns human-readable violations; empty means the instance is sound.
// Checks coordinate bounds and distinctness, positive quantities and rates,
// recipe-graph acyclicity, and that out_item is producible from the source
// items through the recipe book.
std::vector<std::string> validate_instance(const ProblemInstance& inst);

// Derives stage-model bounds. An empty recipe book yields all-zero bounds:
// nothing can be crafted, so the planner can only lay out bare transport.
ModelBounds derive_bounds(const ProblemInstance& inst);

std::string to_json(const ProblemInstance& inst);

}  // namespace factopt

#endif  // FACTOPT_DOMAIN_HPP
