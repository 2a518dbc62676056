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

#include "factopt/stage2.hpp"

#include <algorithm>

namespace factopt {

using fd::Model;
using fd::SearchConfig;
using fd::SolveStatus;
using fd::VarId;

namespace {

// Side-adjacent tiles of a 3x3 block anchored at `a`: three per side, no
// corners, since inserters only act along the four cardinal directions.
std::vector<GridCoord> side_tiles(GridCoord a) {
  std::vector<GridCoord> out;
  for (int i = 0; i < 3; ++i) {
    out.push_back({a.x + i, a.y - 1});
    out.push_back({a.x + i, a.y + 3});
    out.push_back({a.x - 1, a.y + i});
    out.push_back({a.x + 3, a.y + i});
  }
  return out;
}

bool block_covers(GridCoord anchor, GridCoord t) {
  return t.x >= anchor.x && t.x < anchor.x + 3 && t.y >= anchor.y &&
         t.y < anchor.y + 3;
}

}  // namespace

std::vector<int> PackingLayout::anchor_flat() const {
  std::vector<int> out;
  for (GridCoord a : anchors) out.push_back(block_at.flat_index(a));
  return out;
}

Stage2Outcome solve_stage2(const ProblemInstance& inst,
                           const Stage1Solution& plan,
                           const Stage2Params& params,
                           const std::vector<PackingLayout>& excluded) {
  const int w = inst.width, h = inst.height;

  std::vector<int> totals;  // inserter demand per active plan slot
  for (std::size_t a = 0; a < plan.recipe_idx.size(); ++a)
    if (plan.recipe_idx[a] != 0)
      totals.push_back(plan.total_inserters(int(a)));
  const int blocks = int(totals.size());
  const int max_total =
      totals.empty() ? 0 : *std::max_element(totals.begin(), totals.end());

  Grid<int> grid_shape(w, h, 0);  // geometry helper for flat indices
  auto reserved = [&](GridCoord c) {
    return c == inst.destination || inst.is_source_tile(c);
  };

  // Candidate anchors: block in bounds and clear of reserved tiles.
  std::vector<int> candidates;
  for (int y = 1; y + 2 <= h; ++y)
    for (int x = 1; x + 2 <= w; ++x) {
      bool ok = true;
      for (int dy = 0; dy < 3 && ok; ++dy)
        for (int dx = 0; dx < 3 && ok; ++dx)
          if (reserved({x + dx, y + dy})) ok = false;
      if (ok) candidates.push_back(grid_shape.flat_index({x, y}));
    }

  Model m;
  std::vector<VarId> anchor(blocks), which(blocks), need(blocks);
  std::vector<std::vector<VarId>> slot(blocks);

  for (int k = 0; k < blocks; ++k) anchor[k] = m.new_var(1, w * h);
  for (int k = 0; k < blocks; ++k) which[k] = m.new_var(1, blocks);
  for (int k = 0; k < blocks; ++k) need[k] = m.new_var(0, max_total);
  for (int k = 0; k < blocks; ++k) {
    slot[k].resize(max_total);
    for (int j = 0; j < max_total; ++j) slot[k][j] = m.new_var(0, w * h);
  }

  // Restrict anchors to the candidate list.
  for (int k = 0; k < blocks; ++k)
    for (int v = 1; v <= w * h; ++v)
      if (!std::binary_search(candidates.begin(), candidates.end(), v))
        m.remove_val(anchor[k], v);

  // Pairwise: row-major anchor order (canonical block numbering) and
  // disjoint 3x3 footprints.
  for (int i = 0; i < blocks; ++i)
    for (int j = i + 1; j < blocks; ++j) {
      std::vector<std::vector<int>> ok_pairs;
      for (int a : candidates)
        for (int b : candidates) {
          if (a >= b) continue;
          GridCoord ca = grid_shape.from_flat(a), cb = grid_shape.from_flat(b);
          if (std::abs(ca.x - cb.x) >= 3 || std::abs(ca.y - cb.y) >= 3)
            ok_pairs.push_back({a, b});
        }
      m.post_table({anchor[i], anchor[j]}, std::move(ok_pairs));
    }

  // Each block is matched to a distinct plan slot and needs that slot's
  // inserter count; matching freedom matters when capacities differ.
  if (blocks > 0) {
    m.post_alldiff_except_0(which);
    std::vector<int> padded(blocks + 1, 0);
    for (int k = 0; k < blocks; ++k) padded[k + 1] = totals[k];
    for (int k = 0; k < blocks; ++k) m.post_element(need[k], padded, which[k]);
  }

  // Slot tiles: slot[k][j] > 0 means block k stakes that tile for one of
  // its inserters. Used slots form an ascending prefix; exactly `need`
  // slots are used; tiles are globally distinct.
  std::vector<VarId> all_slots;
  for (int k = 0; k < blocks; ++k) {
    std::vector<fd::Term> used_sum = {{-1, need[k]}};
    VarId prev_used = -1;
    for (int j = 0; j < max_total; ++j) {
      VarId used = m.reified_gt_const(slot[k][j], 0);
      used_sum.push_back({1, used});
      if (prev_used != -1) m.post_implies(used, prev_used);
      if (j > 0)
        m.post_implies_le(used, {{1, slot[k][j - 1]}, {-1, slot[k][j]}}, -1);
      prev_used = used;
      all_slots.push_back(slot[k][j]);
    }
    m.post_linear_eq(std::move(used_sum), 0);

    // A used tile must sit on a free side of its own block and clear of
    // every other block's footprint; reserved tiles are never usable.
    std::vector<std::vector<int>> own_pairs;
    for (int a : candidates) {
      own_pairs.push_back({0, a});
      for (GridCoord t : side_tiles(grid_shape.from_flat(a)))
        if (grid_shape.in_bounds(t) && !reserved(t))
          own_pairs.push_back({grid_shape.flat_index(t), a});
    }
    for (int j = 0; j < max_total; ++j)
      m.post_table({slot[k][j], anchor[k]}, own_pairs);

    for (int other = 0; other < blocks; ++other) {
      if (other == k) continue;
      std::vector<std::vector<int>> clear_pairs;
      for (int a : candidates) {
        GridCoord ca = grid_shape.from_flat(a);
        clear_pairs.push_back({0, a});
        for (int t = 1; t <= w * h; ++t)
          if (!block_covers(ca, grid_shape.from_flat(t)))
            clear_pairs.push_back({t, a});
      }
      for (int j = 0; j < max_total; ++j)
        m.post_table({slot[k][j], anchor[other]}, clear_pairs);
    }
  }
  if (!all_slots.empty()) m.post_alldiff_except_0(all_slots);

  // Ledger: refuse anchor sets already tried for this plan.
  for (const PackingLayout& ex : excluded)
    m.post_vec_neq(anchor, ex.anchor_flat());

  SearchConfig cfg;
  cfg.node_limit = params.node_limit;
  cfg.time_limit_s = params.time_limit_s;
  fd::Outcome out = m.solve(cfg);

  Stage2Outcome result;
  result.status = out.status;
  result.nodes = out.nodes;
  if (out.status == SolveStatus::Sat) {
    PackingLayout& lay = result.layout;
    lay.block_at = Grid<int>(w, h, 0);
    for (int k = 0; k < blocks; ++k) {
      GridCoord a = lay.block_at.from_flat(out.assignment[anchor[k]]);
      lay.anchors.push_back(a);
      for (int dy = 0; dy < 3; ++dy)
        for (int dx = 0; dx < 3; ++dx)
          lay.block_at.at(a.x + dx, a.y + dy) = k + 1;
    }
  }
  return result;
}

}  // namespace factopt
