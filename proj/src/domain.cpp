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

#include "factopt/domain.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace factopt {

using nlohmann::json;

const Recipe* ProblemInstance::recipe_for(int item) const {
  for (const Recipe& r : recipes)
    if (r.product == item) return &r;
  return nullptr;
}

bool ProblemInstance::is_source_tile(GridCoord c) const {
  for (const SourceSpec& s : sources)
    if (s.pos == c) return true;
  return false;
}

int ProblemInstance::supply_rate(int item) const {
  int total = 0;
  for (const SourceSpec& s : sources)
    if (s.item == item) total += s.rate;
  return total;
}

namespace {

const json& require_field(const json& j, const char* name,
                          const char* context) {
  auto it = j.find(name);
  if (it == j.end())
    throw ParseError(std::string("missing field '") + name + "' in " +
                     context);
  return *it;
}

int require_int(const json& j, const char* name, const char* context) {
  const json& v = require_field(j, name, context);
  if (!v.is_number_integer())
    throw ParseError(std::string("field '") + name + "' in " + context +
                     " must be an integer");
  return v.get<int>();
}

void check_item_id(int item, int num_items, const std::string& where) {
  if (item < 1 || item > num_items)
    throw ParseError(where + " references unknown item id " +
                     std::to_string(item));
}

}  // namespace

ProblemInstance parse_instance(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be an object");

  ProblemInstance inst;
  inst.width = require_int(doc, "width", "instance");
  inst.height = require_int(doc, "height", "instance");
  inst.num_items = require_int(doc, "num_items", "instance");
  inst.out_item = require_int(doc, "out_item", "instance");
  if (doc.contains("inserter_rate"))
    inst.inserter_rate = require_int(doc, "inserter_rate", "instance");
  if (doc.contains("conveyor_capacity"))
    inst.conveyor_capacity = require_int(doc, "conveyor_capacity", "instance");

  check_item_id(inst.out_item, inst.num_items, "out_item");

  const json& srcs = require_field(doc, "sources", "instance");
  if (!srcs.is_array()) throw ParseError("'sources' must be an array");
  int src_idx = 0;
  for (const json& s : srcs) {
    ++src_idx;
    std::string ctx = "sources[" + std::to_string(src_idx) + "]";
    SourceSpec spec;
    spec.pos.x = require_int(s, "x", ctx.c_str());
    spec.pos.y = require_int(s, "y", ctx.c_str());
    spec.item = require_int(s, "item", ctx.c_str());
    spec.rate = require_int(s, "rate", ctx.c_str());
    check_item_id(spec.item, inst.num_items, ctx);
    inst.sources.push_back(spec);
  }

  const json& dest = require_field(doc, "destination", "instance");
  inst.destination.x = require_int(dest, "x", "destination");
  inst.destination.y = require_int(dest, "y", "destination");

  const json& recs = require_field(doc, "recipes", "instance");
  if (!recs.is_array()) throw ParseError("'recipes' must be an array");
  for (const json& r : recs) {
    Recipe rec;
    rec.product = require_int(r, "product", "recipe");
    std::string ctx = "recipe for item " + std::to_string(rec.product);
    check_item_id(rec.product, inst.num_items, ctx);
    if (inst.recipe_for(rec.product) != nullptr)
      throw ParseError("duplicate recipe for item " +
                       std::to_string(rec.product));
    rec.qty_produced = require_int(r, "qty_produced", ctx.c_str());
    rec.rate = require_int(r, "rate", ctx.c_str());
    const json& ing = require_field(r, "ingredients", ctx.c_str());
    if (!ing.is_object())
      throw ParseError("'ingredients' of " + ctx + " must be an object");
    for (auto it = ing.begin(); it != ing.end(); ++it) {
      int item;
      try {
        item = std::stoi(it.key());
      } catch (const std::exception&) {
        throw ParseError(ctx + " has non-numeric ingredient key '" + it.key() +
                         "'");
      }
      check_item_id(item, inst.num_items, ctx);
      if (!it.value().is_number_integer())
        throw ParseError(ctx + " ingredient quantities must be integers");
      rec.ingredients[item] = it.value().get<int>();
    }
    inst.recipes.push_back(rec);
  }
  return inst;
}

namespace {

std::string coord_str(GridCoord c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

// Detects cycles in the item dependency graph (product -> ingredient edges).
bool has_recipe_cycle(const ProblemInstance& inst, int item,
                      std::vector<int>& state) {
  if (state[item] == 1) return true;
  if (state[item] == 2) return false;
  state[item] = 1;
  if (const Recipe* r = inst.recipe_for(item)) {
    for (const auto& [ing, qty] : r->ingredients) {
      (void)qty;
      if (has_recipe_cycle(inst, ing, state)) return true;
    }
  }
  state[item] = 2;
  return false;
}

}  // namespace

std::vector<std::string> validate_instance(const ProblemInstance& inst) {
  std::vector<std::string> out;
  auto flag = [&out](const std::string& s) { out.push_back(s); };

  if (inst.width < 1 || inst.height < 1)
    flag("grid dimensions must be at least 1x1");
  if (inst.num_items < 1) flag("num_items must be at least 1");
  if (inst.inserter_rate < 1) flag("inserter_rate must be at least 1");
  if (inst.conveyor_capacity < 1) flag("conveyor_capacity must be at least 1");

  Grid<int> occupancy(std::max(inst.width, 1), std::max(inst.height, 1), 0);
  auto in_grid = [&](GridCoord c) {
    return c.x >= 1 && c.x <= inst.width && c.y >= 1 && c.y <= inst.height;
  };

  if (!in_grid(inst.destination))
    flag("destination " + coord_str(inst.destination) + " is out of bounds");
  else
    occupancy.at(inst.destination) = -1;

  int idx = 0;
  for (const SourceSpec& s : inst.sources) {
    ++idx;
    std::string who = "source " + std::to_string(idx);
    if (!in_grid(s.pos)) {
      flag(who + " " + coord_str(s.pos) + " is out of bounds");
      continue;
    }
    if (s.rate < 1) flag(who + " must have rate >= 1");
    int& cell = occupancy.at(s.pos);
    if (cell == -1)
      flag(who + " coincides with the destination at " + coord_str(s.pos));
    else if (cell > 0)
      flag(who + " repeats source tile " + coord_str(s.pos));
    else
      cell = idx;
  }

  for (const Recipe& r : inst.recipes) {
    std::string who = "recipe for item " + std::to_string(r.product);
    if (r.qty_produced < 1) flag(who + ": qty_produced must be >= 1");
    if (r.rate < 1) flag(who + ": rate must be >= 1");
    if (r.ingredients.count(r.product))
      flag(who + ": product listed among its own ingredients");
    for (const auto& [item, qty] : r.ingredients)
      if (qty < 1)
        flag(who + ": ingredient " + std::to_string(item) +
             " quantity must be >= 1");
  }

  if (inst.num_items >= 1 && inst.out_item >= 1 &&
      inst.out_item <= inst.num_items) {
    std::vector<int> state(inst.num_items + 1, 0);
    for (int i = 1; i <= inst.num_items; ++i)
      if (state[i] == 0 && has_recipe_cycle(inst, i, state)) {
        flag("recipe graph contains a cycle involving item " +
             std::to_string(i));
        break;
      }

    // Producibility closure: start from source items, repeatedly apply
    // recipes whose ingredients are all available.
    std::set<int> avail;
    for (const SourceSpec& s : inst.sources) avail.insert(s.item);
    bool grew = true;
    while (grew) {
      grew = false;
      for (const Recipe& r : inst.recipes) {
        if (avail.count(r.product)) continue;
        bool ok = true;
        for (const auto& [item, qty] : r.ingredients) {
          (void)qty;
          if (!avail.count(item)) ok = false;
        }
        if (ok) {
          avail.insert(r.product);
          grew = true;
        }
      }
    }
    if (!avail.count(inst.out_item))
      flag("out_item " + std::to_string(inst.out_item) +
           " is not producible from the sources through the recipe book");
  }
  return out;
}

ModelBounds derive_bounds(const ProblemInstance& inst) {
  ModelBounds b;
  // With no recipes nothing can be crafted; every bound collapses to zero
  // and the planner's only move is a bare transport layout.
  if (inst.recipes.empty()) return b;
  b.max_assemblers = (inst.width / 3) * (inst.height / 3);
  for (const Recipe& r : inst.recipes) {
    b.max_rate = std::max(b.max_rate, r.rate);
    for (const auto& [item, qty] : r.ingredients) {
      (void)item;
      // Per-craft quantities normalized to items/min of this ingredient.
      int flow = qty * r.rate / r.qty_produced;
      b.max_consumption = std::max(b.max_consumption, flow);
    }
  }
  auto clamp_band = [](int n) { return std::clamp(n, 1, 12); };
  auto ceil_div = [](int a, int d) { return (a + d - 1) / d; };
  b.max_inserters_in = clamp_band(ceil_div(b.max_consumption, inst.inserter_rate));
  b.max_inserters_out = clamp_band(ceil_div(b.max_rate, inst.inserter_rate));
  return b;
}

std::string to_json(const ProblemInstance& inst) {
  json doc;
  doc["width"] = inst.width;
  doc["height"] = inst.height;
  doc["num_items"] = inst.num_items;
  doc["out_item"] = inst.out_item;
  doc["inserter_rate"] = inst.inserter_rate;
  doc["conveyor_capacity"] = inst.conveyor_capacity;
  doc["sources"] = json::array();
  for (const SourceSpec& s : inst.sources)
    doc["sources"].push_back(
        {{"x", s.pos.x}, {"y", s.pos.y}, {"item", s.item}, {"rate", s.rate}});
  doc["destination"] = {{"x", inst.destination.x}, {"y", inst.destination.y}};
  doc["recipes"] = json::array();
  for (const Recipe& r : inst.recipes) {
    json ing = json::object();
    for (const auto& [item, qty] : r.ingredients)
      ing[std::to_string(item)] = qty;
    doc["recipes"].push_back({{"product", r.product},
                              {"qty_produced", r.qty_produced},
                              {"rate", r.rate},
                              {"ingredients", ing}});
  }
  return doc.dump(2);
}

}  // namespace factopt
