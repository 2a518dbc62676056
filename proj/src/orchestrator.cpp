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

#include "factopt/orchestrator.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "factopt/bpstring.hpp"

namespace factopt {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string pad3(int n) {
  std::ostringstream os;
  os << std::setw(3) << std::setfill('0') << n;
  return os.str();
}

std::string coord_str(GridCoord c) {
  std::ostringstream os;
  os << "(" << c.x << "," << c.y << ")";
  return os.str();
}

std::string grid_text(const Grid<int>& g) {
  std::ostringstream os;
  for (int y = 1; y <= g.height(); ++y) {
    for (int x = 1; x <= g.width(); ++x) {
      if (x > 1) os << " ";
      os << g.at(x, y);
    }
    os << "\n";
  }
  return os.str();
}

std::string plan_text(const Stage1Solution& plan) {
  std::ostringstream os;
  os << "objective: " << plan.objective << "\n";
  if (plan.num_active() == 0) os << "no active assemblers\n";
  for (std::size_t s = 0; s < plan.recipe_idx.size(); ++s) {
    if (plan.recipe_idx[s] == 0) continue;
    os << "slot " << s << ": recipe " << plan.recipe_idx[s] << " rate " << plan.rate[s]
       << " out " << plan.inserters_out[s] << " in";
    for (std::size_t j = 1; j < plan.inserters_in[s].size(); ++j)
      if (plan.inserters_in[s][j] > 0)
        os << " " << j << ":" << plan.inserters_in[s][j];
    os << "\n";
  }
  return os.str();
}

std::string packing_text(const PackingLayout& packing) {
  std::ostringstream os;
  os << "anchors:";
  if (packing.anchors.empty()) os << " none";
  for (const GridCoord& a : packing.anchors) os << " " << coord_str(a);
  os << "\n" << grid_text(packing.block_at);
  return os.str();
}

std::string layout_text(const LayoutSolution& layout) {
  std::ostringstream os;
  os << "objective: " << layout.objective << "\n";
  os << "block slots:";
  if (layout.block_slot.empty()) os << " none";
  for (int s : layout.block_slot) os << " " << s;
  os << "\nconveyors:\n" << grid_text(layout.conveyors);
  os << "inserters:\n" << grid_text(layout.inserters);
  os << "routes:\n" << grid_text(layout.routes);
  os << "carrying:\n" << grid_text(layout.carrying);
  return os.str();
}

class Dumper {
 public:
  explicit Dumper(const std::string& dir) : dir_(dir) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }
  void write(const std::string& name, const std::string& text) const {
    if (dir_.empty()) return;
    std::ofstream out(std::filesystem::path(dir_) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dump file: " + name);
    out << text;
  }

 private:
  std::string dir_;
};

}  // namespace

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "outcome: ";
  switch (outcome) {
    case RunOutcome::Solved: os << "solved"; break;
    case RunOutcome::Infeasible: os << "infeasible"; break;
    case RunOutcome::LimitReached: os << "limit-reached"; break;
  }
  os << "\nstage1 attempts: " << stage1_attempts << "\n";
  os << "stage1 objectives:";
  if (stage1_objectives.empty()) os << " none";
  for (long long v : stage1_objectives) os << " " << v;
  os << "\nstage1 assemblers:";
  if (stage1_assemblers.empty()) os << " none";
  for (int v : stage1_assemblers) os << " " << v;
  os << "\nstage2 attempts:";
  if (stage2_attempts.empty()) os << " none";
  for (int v : stage2_attempts) os << " " << v;
  os << "\n";
  if (outcome == RunOutcome::Solved) {
    os << "plan objective: " << plan_objective << "\n";
    os << "layout objective: " << layout_objective << "\n";
    os << "assemblers: " << blueprint.assemblers.size() << "\n";
    os << "predicted rate: " << blueprint.predicted_rate << "\n";
  }
  return os.str();
}

Blueprint assemble_blueprint(const Stage1Solution& plan, const PackingLayout& packing,
                             const LayoutSolution& layout, const ProblemInstance& inst) {
  if (packing.anchors.size() != layout.block_slot.size())
    throw std::invalid_argument("layout does not cover the packing's blocks");
  if (static_cast<int>(packing.anchors.size()) != plan.num_active())
    throw std::invalid_argument("packing does not cover the plan's active slots");
  Blueprint bp(inst.width, inst.height);
  bp.conveyors = layout.conveyors;
  bp.inserters = layout.inserters;
  for (std::size_t b = 0; b < packing.anchors.size(); ++b) {
    const int slot = layout.block_slot[b];
    if (slot < 0 || slot >= static_cast<int>(plan.recipe_idx.size()) ||
        plan.recipe_idx[slot] == 0)
      throw std::invalid_argument("layout assigns a block to an idle plan slot");
    bp.assemblers.push_back({packing.anchors[b], plan.recipe_idx[slot]});
  }
  long long predicted = 0;
  for (std::size_t s = 0; s < plan.recipe_idx.size(); ++s) {
    if (plan.recipe_idx[s] == 0) continue;
    if (inst.recipes[plan.recipe_idx[s] - 1].product == inst.out_item)
      predicted += plan.rate[s];
  }
  for (const SourceSpec& src : inst.sources)
    if (src.item == inst.out_item) predicted += src.rate;
  bp.predicted_rate = predicted;
  return bp;
}

RunReport optimize(const ProblemInstance& inst, const RunConfig& cfg) {
  if (cfg.max_stage1_attempts < 1 || cfg.max_stage2_attempts_per_stage1 < 1)
    throw std::invalid_argument("attempt limits must be at least 1");

  const ModelBounds bounds = derive_bounds(inst);
  const Dumper dump(cfg.dump_dir);
  dump.write("instance.json", to_json(inst) + "\n");

  RunReport report;
  std::vector<Stage1Solution> plan_ledger;

  Stage1Params p1;
  p1.assembler_penalty = cfg.assembler_penalty;
  p1.time_limit_s = cfg.stage1_time_limit_s;
  Stage2Params p2;
  p2.time_limit_s = cfg.stage2_time_limit_s;
  Stage3Params p3;
  p3.conveyor_penalty = cfg.conveyor_penalty;
  p3.inserter_penalty = cfg.inserter_penalty;
  p3.time_limit_s = cfg.stage3_time_limit_s;

  auto finish = [&](RunOutcome outcome) -> RunReport& {
    report.outcome = outcome;
    dump.write("report.txt", report.to_text());
    return report;
  };

  while (report.stage1_attempts < cfg.max_stage1_attempts) {
    const auto t1 = std::chrono::steady_clock::now();
    const Stage1Outcome s1 = solve_stage1(inst, bounds, p1, plan_ledger);
    report.times.stage1_s += seconds_since(t1);
    if (s1.status == fd::SolveStatus::Unsat) return finish(RunOutcome::Infeasible);
    if (s1.status != fd::SolveStatus::Sat) return finish(RunOutcome::LimitReached);

    ++report.stage1_attempts;
    report.stage1_objectives.push_back(s1.solution.objective);
    report.stage1_assemblers.push_back(s1.solution.num_active());
    report.stage2_attempts.push_back(0);
    const std::string tag1 = pad3(report.stage1_attempts);
    dump.write("stage1_attempt_" + tag1 + ".txt", plan_text(s1.solution));

    std::vector<PackingLayout> packing_ledger;
    bool stage2_exhausted = false;
    while (report.stage2_attempts.back() < cfg.max_stage2_attempts_per_stage1) {
      const auto t2 = std::chrono::steady_clock::now();
      const Stage2Outcome s2 = solve_stage2(inst, s1.solution, p2, packing_ledger);
      report.times.stage2_s += seconds_since(t2);
      if (s2.status == fd::SolveStatus::Unsat) {
        stage2_exhausted = true;
        break;
      }
      if (s2.status != fd::SolveStatus::Sat) return finish(RunOutcome::LimitReached);

      ++report.stage2_attempts.back();
      const std::string tag2 = tag1 + "_" + pad3(report.stage2_attempts.back());
      dump.write("stage2_attempt_" + tag2 + ".txt", packing_text(s2.layout));

      const auto t3 = std::chrono::steady_clock::now();
      const Stage3Outcome s3 = solve_stage3(inst, s1.solution, s2.layout, p3);
      report.times.stage3_s += seconds_since(t3);
      if (s3.status == fd::SolveStatus::Sat) {
        report.plan = s1.solution;
        report.packing = s2.layout;
        report.layout = s3.layout;
        report.plan_objective = s1.solution.objective;
        report.layout_objective = s3.layout.objective;
        report.blueprint = assemble_blueprint(s1.solution, s2.layout, s3.layout, inst);
        dump.write("stage3_solution_" + tag2 + ".txt", layout_text(s3.layout));
        dump.write("blueprint.txt", blueprint_to_text(report.blueprint));
        return finish(RunOutcome::Solved);
      }
      if (s3.status != fd::SolveStatus::Unsat) return finish(RunOutcome::LimitReached);
      packing_ledger.push_back(s2.layout);  // routing refused this packing
    }
    if (!stage2_exhausted) return finish(RunOutcome::LimitReached);
    plan_ledger.push_back(s1.solution);  // no packing of this plan can be routed
  }
  return finish(RunOutcome::LimitReached);
}

}  // namespace factopt
