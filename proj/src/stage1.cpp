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

#include "factopt/stage1.hpp"

namespace factopt {

using fd::Model;
using fd::SearchConfig;
using fd::SolveStatus;
using fd::Term;
using fd::VarId;

int Stage1Solution::num_active() const {
  int n = 0;
  for (int r : recipe_idx)
    if (r != 0) ++n;
  return n;
}

int Stage1Solution::total_inserters(int slot) const {
  int t = inserters_out[slot];
  for (int n : inserters_in[slot]) t += n;
  return t;
}

Stage1Outcome solve_stage1(const ProblemInstance& inst,
                           const ModelBounds& bounds,
                           const Stage1Params& params,
                           const std::vector<Stage1Solution>& excluded) {
  const int slots = bounds.max_assemblers;
  const int num_recipes = int(inst.recipes.size());
  const int items = inst.num_items;
  const int ir = inst.inserter_rate;
  const int max_in = bounds.max_inserters_in;
  const int max_out = bounds.max_inserters_out;
  const int max_total = items * max_in + max_out;

  Model m;

  // Core variables come first so search branches recipes, then rates,
  // then the derived counts; helper booleans trail behind.
  std::vector<VarId> recipe(slots), rate(slots), total(slots), n_out(slots);
  std::vector<std::vector<VarId>> n_in(slots), cons(slots);
  for (int a = 0; a < slots; ++a) recipe[a] = m.new_var(0, num_recipes);
  for (int a = 0; a < slots; ++a) rate[a] = m.new_var(0, bounds.max_rate);
  for (int a = 0; a < slots; ++a) total[a] = m.new_var(0, max_total);
  for (int a = 0; a < slots; ++a) n_out[a] = m.new_var(0, max_out);
  for (int a = 0; a < slots; ++a) {
    n_in[a].assign(items + 1, -1);
    cons[a].assign(items + 1, -1);
    for (int j = 1; j <= items; ++j) {
      n_in[a][j] = m.new_var(0, max_in);
      cons[a][j] = m.new_var(0, bounds.max_consumption);
    }
  }
  // prod[a][r]: items/min of recipes[r-1].product coming out of slot a.
  std::vector<std::vector<VarId>> prod(slots,
                                       std::vector<VarId>(num_recipes + 1, -1));
  for (int a = 0; a < slots; ++a)
    for (int r = 1; r <= num_recipes; ++r)
      prod[a][r] = m.new_var(0, inst.recipes[r - 1].rate);

  long long obj_lo = -(long long)slots *
                     (params.assembler_penalty + max_total);
  long long obj_hi = (long long)slots * bounds.max_rate;
  VarId obj = m.new_var(int(obj_lo), int(obj_hi));

  std::vector<VarId> active(slots);
  std::vector<std::vector<VarId>> is_recipe(slots);
  for (int a = 0; a < slots; ++a) {
    active[a] = m.reified_gt_const(recipe[a], 0);
    is_recipe[a].assign(num_recipes + 1, -1);
    for (int r = 1; r <= num_recipes; ++r)
      is_recipe[a][r] = m.reified_eq_const(recipe[a], r);
  }

  for (int a = 0; a < slots; ++a) {
    // Idle slots craft nothing; running slots craft at least one item/min
    // and at most the recipe's own rate.
    m.post_linear_le({{1, rate[a]}, {-bounds.max_rate, active[a]}}, 0);
    m.post_implies_le(active[a], {{-1, rate[a]}}, -1);
    for (int r = 1; r <= num_recipes; ++r)
      m.post_implies_le(is_recipe[a][r], {{1, rate[a]}},
                        inst.recipes[r - 1].rate);

    for (int r = 1; r <= num_recipes; ++r) {
      // Production channels the slot rate when the recipe matches, else 0.
      m.post_linear_le(
          {{1, prod[a][r]}, {-inst.recipes[r - 1].rate, is_recipe[a][r]}}, 0);
      m.post_implies_le(is_recipe[a][r], {{1, prod[a][r]}, {-1, rate[a]}}, 0);
      m.post_implies_le(is_recipe[a][r], {{1, rate[a]}, {-1, prod[a][r]}}, 0);
    }

    for (int j = 1; j <= items; ++j) {
      // cons[a][j] = floor(qty * rate / qty_produced) under the recipe that
      // consumes j; zero when no assigned recipe consumes it.
      std::vector<Term> uses = {{1, cons[a][j]}};
      for (int r = 1; r <= num_recipes; ++r) {
        const Recipe& rec = inst.recipes[r - 1];
        auto it = rec.ingredients.find(j);
        if (it == rec.ingredients.end()) continue;
        int q = it->second, qp = rec.qty_produced;
        uses.push_back({-bounds.max_consumption, is_recipe[a][r]});
        m.post_implies_le(is_recipe[a][r],
                          {{qp, cons[a][j]}, {-q, rate[a]}}, 0);
        m.post_implies_le(is_recipe[a][r],
                          {{q, rate[a]}, {-qp, cons[a][j]}}, qp - 1);
      }
      m.post_linear_le(uses, 0);

      // Exactly ceil(flow / inserter rate) feeding inserters.
      m.post_linear_le({{1, cons[a][j]}, {-ir, n_in[a][j]}}, 0);
      m.post_linear_le({{ir, n_in[a][j]}, {-1, cons[a][j]}}, ir - 1);
    }

    // Exactly ceil(rate / inserter rate) inserters carrying product away.
    m.post_linear_le({{1, rate[a]}, {-ir, n_out[a]}}, 0);
    m.post_linear_le({{ir, n_out[a]}, {-1, rate[a]}}, ir - 1);

    std::vector<Term> tsum = {{-1, total[a]}, {1, n_out[a]}};
    for (int j = 1; j <= items; ++j) tsum.push_back({1, n_in[a][j]});
    m.post_linear_eq(tsum, 0);
  }

  // Per-item balance: consumption across slots never exceeds outside supply
  // plus in-grid production.
  for (int j = 1; j <= items; ++j) {
    std::vector<Term> bal;
    for (int a = 0; a < slots; ++a) bal.push_back({1, cons[a][j]});
    for (int r = 1; r <= num_recipes; ++r)
      if (inst.recipes[r - 1].product == j)
        for (int a = 0; a < slots; ++a) bal.push_back({-1, prod[a][r]});
    if (bal.empty()) continue;
    m.post_linear_le(bal, inst.supply_rate(j));
  }

  // Objective: output-item production minus assembler and inserter costs.
  {
    std::vector<Term> terms = {{1, obj}};
    for (int r = 1; r <= num_recipes; ++r)
      if (inst.recipes[r - 1].product == inst.out_item)
        for (int a = 0; a < slots; ++a) terms.push_back({-1, prod[a][r]});
    for (int a = 0; a < slots; ++a) {
      terms.push_back({params.assembler_penalty, active[a]});
      terms.push_back({1, n_out[a]});
      for (int j = 1; j <= items; ++j) terms.push_back({1, n_in[a][j]});
    }
    m.post_linear_eq(terms, 0);
  }

  // Canonical slot order: recipes descending so running slots lead, ties
  // broken by descending inserter totals. Slots are symmetric, so every
  // plan has a representative in this order.
  for (int a = 0; a + 1 < slots; ++a) {
    m.post_linear_le({{1, recipe[a + 1]}, {-1, recipe[a]}}, 0);
    VarId diff = m.new_var(0, num_recipes);
    m.post_linear_eq({{1, diff}, {-1, recipe[a]}, {1, recipe[a + 1]}}, 0);
    VarId same = m.reified_eq_const(diff, 0);
    m.post_implies_le(same, {{1, total[a + 1]}, {-1, total[a]}}, 0);
  }

  // Rejected plans may not reappear: at least one slot must differ in
  // recipe or inserter total from every ledger entry.
  for (const Stage1Solution& ex : excluded) {
    std::vector<Term> match;
    for (int a = 0; a < slots; ++a) {
      match.push_back({1, m.reified_eq_const(recipe[a], ex.recipe_idx[a])});
      match.push_back({1, m.reified_eq_const(total[a], ex.total_inserters(a))});
    }
    m.post_linear_le(std::move(match), 2LL * slots - 1);
  }

  SearchConfig cfg;
  cfg.mode = SearchConfig::Mode::Maximize;
  cfg.objective = obj;
  cfg.node_limit = params.node_limit;
  cfg.time_limit_s = params.time_limit_s;
  fd::Outcome out = m.solve(cfg);

  Stage1Outcome result;
  result.status = out.status;
  result.nodes = out.nodes;
  if (out.has_solution && out.status == SolveStatus::Sat) {
    Stage1Solution& s = result.solution;
    s.recipe_idx.resize(slots);
    s.rate.resize(slots);
    s.inserters_in.assign(slots, std::vector<int>(items + 1, 0));
    s.inserters_out.resize(slots);
    for (int a = 0; a < slots; ++a) {
      s.recipe_idx[a] = out.assignment[recipe[a]];
      s.rate[a] = out.assignment[rate[a]];
      s.inserters_out[a] = out.assignment[n_out[a]];
      for (int j = 1; j <= items; ++j)
        s.inserters_in[a][j] = out.assignment[n_in[a][j]];
    }
    s.objective = out.objective;
  }
  return result;
}

}  // namespace factopt
