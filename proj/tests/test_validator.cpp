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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "factopt/stage3.hpp"
#include "factopt/validator.hpp"

using namespace factopt;

namespace {

bool has_violation(const std::vector<std::string>& vs, const std::string& needle) {
  return std::any_of(vs.begin(), vs.end(), [&](const std::string& v) {
    return v.find(needle) != std::string::npos;
  });
}

// 3x5 strip: one assembler turning item 1 into item 2, fed from the
// bottom-left source, delivering to the bottom-right corner.
ProblemInstance strip_instance(int source_rate) {
  ProblemInstance inst;
  inst.width = 3;
  inst.height = 5;
  inst.num_items = 2;
  inst.out_item = 2;
  inst.inserter_rate = 50;
  inst.sources = {{{1, 5}, 1, source_rate}};
  inst.destination = {3, 5};
  Recipe r;
  r.product = 2;
  r.qty_produced = 1;
  r.rate = 50;
  r.ingredients = {{1, 1}};
  inst.recipes = {r};
  return inst;
}

Blueprint strip_blueprint() {
  Blueprint bp(3, 5);
  bp.assemblers = {{{1, 1}, 1}};
  bp.conveyors.at(1, 5) = static_cast<int>(Dir::North);
  bp.inserters.at(1, 4) = static_cast<int>(Dir::North);
  bp.inserters.at(2, 4) = static_cast<int>(Dir::South);
  bp.conveyors.at(2, 5) = static_cast<int>(Dir::East);
  bp.conveyors.at(3, 5) = static_cast<int>(Dir::East);
  bp.predicted_rate = 50;
  return bp;
}

// Two chained assemblers on 7x6 where a single item-2 belt serves both; the
// downstream feeder starves when item 2 arrives no faster than one arm
// can drain.
struct StarvationFixture {
  ProblemInstance inst;
  Blueprint bp;
};

StarvationFixture starvation_fixture(int item2_rate) {
  StarvationFixture f;
  f.inst.width = 7;
  f.inst.height = 6;
  f.inst.num_items = 4;
  f.inst.out_item = 4;
  f.inst.inserter_rate = 50;
  f.inst.sources = {{{1, 5}, 1, 100}, {{2, 6}, 2, item2_rate}};
  f.inst.destination = {7, 6};
  Recipe mid;
  mid.product = 3;
  mid.qty_produced = 1;
  mid.rate = 50;
  mid.ingredients = {{1, 1}, {2, 1}};
  Recipe out;
  out.product = 4;
  out.qty_produced = 1;
  out.rate = 50;
  out.ingredients = {{2, 1}, {3, 1}};
  f.inst.recipes = {mid, out};

  f.bp = Blueprint(7, 6);
  f.bp.assemblers = {{{1, 1}, 1}, {{5, 1}, 2}};
  auto conv = [&](int x, int y, Dir d) { f.bp.conveyors.at(x, y) = static_cast<int>(d); };
  auto ins = [&](int x, int y, Dir d) { f.bp.inserters.at(x, y) = static_cast<int>(d); };
  conv(1, 5, Dir::North);   // item-1 source
  ins(1, 4, Dir::North);    // item 1 into the first assembler
  conv(2, 6, Dir::North);   // item-2 source
  conv(2, 5, Dir::East);
  ins(2, 4, Dir::North);    // item 2 into the first assembler
  conv(3, 5, Dir::East);
  conv(4, 5, Dir::East);
  conv(5, 5, Dir::North);
  ins(5, 4, Dir::North);    // item 2 into the second assembler (starves)
  ins(4, 2, Dir::East);     // direct item-3 handoff between the assemblers
  ins(6, 4, Dir::South);    // item 4 out of the second assembler
  conv(6, 5, Dir::East);
  conv(7, 5, Dir::South);
  conv(7, 6, Dir::South);   // destination
  f.bp.predicted_rate = 50;
  return f;
}

ProblemInstance merge_instance() {
  ProblemInstance inst;
  inst.width = 3;
  inst.height = 3;
  inst.num_items = 1;
  inst.out_item = 1;
  inst.sources = {{{2, 1}, 1, 100}, {{1, 3}, 1, 100}};
  inst.destination = {3, 2};
  return inst;
}

PackingLayout empty_packing(int w, int h) {
  PackingLayout p;
  p.block_at = Grid<int>(w, h);
  return p;
}

}  // namespace

TEST_CASE("a legal single-assembler blueprint validates cleanly") {
  CHECK(validate_structure(strip_blueprint(), strip_instance(200)).empty());
}

TEST_CASE("a conveyor loop is reported as a cycle") {
  ProblemInstance inst;
  inst.width = 3;
  inst.height = 2;
  inst.num_items = 1;
  inst.out_item = 1;
  inst.destination = {3, 1};
  Blueprint bp(3, 2);
  bp.conveyors.at(1, 1) = static_cast<int>(Dir::East);
  bp.conveyors.at(2, 1) = static_cast<int>(Dir::South);
  bp.conveyors.at(2, 2) = static_cast<int>(Dir::West);
  bp.conveyors.at(1, 2) = static_cast<int>(Dir::North);
  const auto vs = validate_structure(bp, inst);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0] == "cycle detected");
}

TEST_CASE("a conveyor fed two different items is reported as mixed") {
  ProblemInstance inst;
  inst.width = 3;
  inst.height = 2;
  inst.num_items = 2;
  inst.out_item = 1;
  inst.sources = {{{1, 1}, 1, 50}, {{1, 2}, 2, 50}};
  inst.destination = {3, 1};
  Blueprint bp(3, 2);
  bp.conveyors.at(1, 1) = static_cast<int>(Dir::East);
  bp.conveyors.at(1, 2) = static_cast<int>(Dir::East);
  bp.conveyors.at(2, 2) = static_cast<int>(Dir::North);
  bp.conveyors.at(2, 1) = static_cast<int>(Dir::East);
  bp.conveyors.at(3, 1) = static_cast<int>(Dir::East);
  const auto vs = validate_structure(bp, inst);
  CHECK(has_violation(vs, "mixed items on conveyor"));
}

TEST_CASE("an assembler missing an ingredient feed is reported") {
  ProblemInstance inst = strip_instance(200);
  inst.num_items = 3;
  inst.out_item = 3;
  Recipe r;
  r.product = 3;
  r.qty_produced = 1;
  r.rate = 50;
  r.ingredients = {{1, 1}, {2, 1}};
  inst.recipes = {r};
  const auto vs = validate_structure(strip_blueprint(), inst);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0] == "(1,1): assembler is not fed item 2");
}

TEST_CASE("an assembler with no output inserter is reported") {
  ProblemInstance inst = strip_instance(200);
  inst.out_item = 1;  // the source item is delivered directly
  Blueprint bp(3, 5);
  bp.assemblers = {{{1, 1}, 1}};
  bp.conveyors.at(1, 5) = static_cast<int>(Dir::East);
  bp.conveyors.at(2, 5) = static_cast<int>(Dir::East);
  bp.conveyors.at(3, 5) = static_cast<int>(Dir::East);
  bp.inserters.at(2, 4) = static_cast<int>(Dir::North);
  const auto vs = validate_structure(bp, inst);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0] == "(1,1): assembler has no output inserter");
}

TEST_CASE("a bad recipe id and bad dimensions are reported") {
  ProblemInstance inst = strip_instance(200);
  Blueprint bp = strip_blueprint();
  bp.assemblers[0].recipe = 7;
  CHECK(has_violation(validate_structure(bp, inst), "assembler recipe id out of range"));
  Blueprint tiny(2, 2);
  CHECK(has_violation(validate_structure(tiny, inst),
                      "blueprint dimensions do not match the instance"));
}

TEST_CASE("a plain belt carries the source rate to the destination") {
  ProblemInstance inst;
  inst.width = 3;
  inst.height = 1;
  inst.num_items = 1;
  inst.out_item = 1;
  inst.sources = {{{1, 1}, 1, 100}};
  inst.destination = {3, 1};
  Blueprint bp(3, 1);
  bp.conveyors.at(1, 1) = static_cast<int>(Dir::East);
  bp.conveyors.at(2, 1) = static_cast<int>(Dir::East);
  bp.conveyors.at(3, 1) = static_cast<int>(Dir::East);
  bp.predicted_rate = 100;
  REQUIRE(validate_structure(bp, inst).empty());
  const FlowReport rep = simulate_flow(bp, inst);
  CHECK(rep.delivered_rate == Rate(100));
  CHECK(rep.tile_rate.at(2, 1) == Rate(100));
  CHECK(rep.starved.empty());
  CHECK(rep.to_text().find("delivered_rate: 100/1") != std::string::npos);
}

TEST_CASE("an inserter hop caps the rate at the inserter rate") {
  ProblemInstance inst;
  inst.width = 3;
  inst.height = 1;
  inst.num_items = 1;
  inst.out_item = 1;
  inst.sources = {{{1, 1}, 1, 100}};
  inst.destination = {3, 1};
  Blueprint bp(3, 1);
  bp.conveyors.at(1, 1) = static_cast<int>(Dir::East);
  bp.inserters.at(2, 1) = static_cast<int>(Dir::East);
  bp.conveyors.at(3, 1) = static_cast<int>(Dir::East);
  REQUIRE(validate_structure(bp, inst).empty());
  const FlowReport rep = simulate_flow(bp, inst);
  CHECK(rep.delivered_rate == Rate(50));
  CHECK(rep.tile_rate.at(2, 1) == Rate(50));
}

TEST_CASE("conveyor capacity caps throughput") {
  ProblemInstance inst;
  inst.width = 2;
  inst.height = 1;
  inst.num_items = 1;
  inst.out_item = 1;
  inst.sources = {{{1, 1}, 1, 1000}};
  inst.destination = {2, 1};
  Blueprint bp(2, 1);
  bp.conveyors.at(1, 1) = static_cast<int>(Dir::East);
  bp.conveyors.at(2, 1) = static_cast<int>(Dir::East);
  const FlowReport rep = simulate_flow(bp, inst);
  CHECK(rep.delivered_rate == Rate(450));
}

TEST_CASE("assembler production follows the tightest ingredient ratio") {
  SUBCASE("ample supply runs the recipe at full rate") {
    const FlowReport rep = simulate_flow(strip_blueprint(), strip_instance(200));
    REQUIRE(rep.utilization.size() == 1);
    CHECK(rep.utilization[0] == Rate(1));
    CHECK(rep.delivered_rate == Rate(50));
    CHECK(rep.starved.empty());
  }
  SUBCASE("scarce supply scales production down exactly") {
    const FlowReport rep = simulate_flow(strip_blueprint(), strip_instance(25));
    REQUIRE(rep.utilization.size() == 1);
    CHECK(rep.utilization[0] == Rate(1, 2));
    CHECK(rep.delivered_rate == Rate(25));
  }
  SUBCASE("raising the source rate never lowers delivery") {
    const Rate lo = simulate_flow(strip_blueprint(), strip_instance(25)).delivered_rate;
    const Rate hi = simulate_flow(strip_blueprint(), strip_instance(200)).delivered_rate;
    CHECK(lo <= hi);
  }
}

TEST_CASE("a shared ingredient belt starves the downstream inserter") {
  StarvationFixture f = starvation_fixture(50);
  REQUIRE(validate_structure(f.bp, f.inst).empty());
  const FlowReport rep = simulate_flow(f.bp, f.inst);
  REQUIRE(rep.starved.size() == 2);
  CHECK(rep.starved[0] == GridCoord{5, 4});
  CHECK(rep.starved[1] == GridCoord{6, 4});
  CHECK(rep.delivered_rate == Rate(0));
  CHECK(rep.delivered_rate < Rate(f.bp.predicted_rate));
  REQUIRE(rep.utilization.size() == 2);
  CHECK(rep.utilization[0] == Rate(1));
  CHECK(rep.utilization[1] == Rate(0));

  SUBCASE("doubling the scarce supply removes the starvation") {
    StarvationFixture ample = starvation_fixture(100);
    const FlowReport rep2 = simulate_flow(ample.bp, ample.inst);
    CHECK(rep2.starved.empty());
    CHECK(rep2.delivered_rate == Rate(50));
    CHECK(rep2.delivered_rate == Rate(ample.bp.predicted_rate));
  }
}

TEST_CASE("a blueprint with no objects delivers nothing") {
  ProblemInstance inst = strip_instance(200);
  Blueprint bp(3, 5);
  const FlowReport rep = simulate_flow(bp, inst);
  CHECK(rep.delivered_rate == Rate(0));
  CHECK(rep.starved.empty());
}

TEST_CASE("layout oracle handles the adjacent strip") {
  ProblemInstance inst;
  inst.width = 2;
  inst.height = 1;
  inst.num_items = 1;
  inst.out_item = 1;
  inst.sources = {{{1, 1}, 1, 100}};
  inst.destination = {2, 1};
  const LayoutOracleResult res = brute_force_layout_oracle(inst);
  REQUIRE(res.feasible);
  CHECK(res.objective == 4);  // two conveyors at the default penalty
}

TEST_CASE("layout oracle prices the three-tile strip") {
  ProblemInstance inst;
  inst.width = 3;
  inst.height = 1;
  inst.num_items = 1;
  inst.out_item = 1;
  inst.sources = {{{1, 1}, 1, 100}};
  inst.destination = {3, 1};
  SUBCASE("default penalties favor a middle inserter") {
    const LayoutOracleResult res = brute_force_layout_oracle(inst);
    REQUIRE(res.feasible);
    CHECK(res.objective == 5);
    Stage3Outcome out = solve_stage3(inst, Stage1Solution{}, empty_packing(3, 1), {});
    REQUIRE(out.status == fd::SolveStatus::Sat);
    CHECK(out.layout.objective == res.objective);
  }
  SUBCASE("expensive inserters favor the full belt") {
    const LayoutOracleResult res = brute_force_layout_oracle(inst, 2, 10);
    REQUIRE(res.feasible);
    CHECK(res.objective == 6);
  }
}

TEST_CASE("layout oracle rejects an undeliverable single tile") {
  ProblemInstance inst;
  inst.width = 1;
  inst.height = 1;
  inst.num_items = 2;
  inst.out_item = 2;
  inst.sources = {{{1, 1}, 1, 100}};
  inst.destination = {1, 1};
  const LayoutOracleResult res = brute_force_layout_oracle(inst);
  CHECK_FALSE(res.feasible);
}

TEST_CASE("layout oracle agrees with the layout stage on the merge instance") {
  ProblemInstance inst = merge_instance();
  const LayoutOracleResult res = brute_force_layout_oracle(inst);
  REQUIRE(res.feasible);
  CHECK(res.objective == 10);
  Stage3Outcome out = solve_stage3(inst, Stage1Solution{}, empty_packing(3, 3), {});
  REQUIRE(out.status == fd::SolveStatus::Sat);
  CHECK(out.layout.objective == res.objective);
}

TEST_CASE("layout oracle enforces its size guard") {
  ProblemInstance inst;
  inst.width = 4;
  inst.height = 4;
  inst.num_items = 1;
  inst.out_item = 1;
  inst.destination = {1, 1};
  CHECK_THROWS_AS(brute_force_layout_oracle(inst), std::invalid_argument);
}
