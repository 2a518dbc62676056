// Copyright 2026 The factopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "factopt/stage3.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace factopt {
namespace {

// Combined object code used internally: 0 = empty, 1..4 = conveyor toward
// Dir, 5..8 = inserter toward Dir.
constexpr int kObjEmpty = 0;
constexpr int kObjMax = 8;

bool code_is_conveyor(int c) { return c >= 1 && c <= 4; }
bool code_is_inserter(int c) { return c >= 5 && c <= 8; }
Dir code_dir(int c) { return static_cast<Dir>(c > 4 ? c - 4 : c); }
int inserter_code(Dir d) { return 4 + static_cast<int>(d); }

std::string tile_str(GridCoord t) {
  std::ostringstream os;
  os << "(" << t.x << "," << t.y << ")";
  return os.str();
}

// Joint legality and flow of two object codes on adjacent free tiles.
// Mirrors check_route_grids' local rules so the model and the checker accept
// exactly the same neighborhoods.
struct PairEval {
  bool valid;
  int flow_tu;
  int flow_ut;
};

PairEval eval_pair(int ct, int cu, Dir t_to_u, bool t_is_dest, bool u_is_dest) {
  const Dir u_to_t = dir_opposite(t_to_u);
  // Validity demanded by `a`'s direction along this edge; the destination's
  // direction is exempt.
  auto side_ok = [](int a, int b, Dir a_to_b, bool a_is_dest, bool b_is_dest) -> bool {
    if (a == kObjEmpty || a_is_dest) return true;
    const Dir da = code_dir(a);
    if (code_is_conveyor(a)) {
      if (da != a_to_b) return true;
      if (b == kObjEmpty) return false;
      if (code_is_conveyor(b)) return b_is_dest || code_dir(b) != dir_opposite(a_to_b);
      return code_dir(b) == a_to_b;  // the inserter must pick from a
    }
    if (da == a_to_b) {  // b is the inserter's output tile
      if (b == kObjEmpty) return false;
      if (code_is_inserter(b)) return code_dir(b) == da;
      return true;
    }
    if (da == dir_opposite(a_to_b)) {  // b is the inserter's input tile
      if (b_is_dest || b == kObjEmpty) return false;
      if (code_is_inserter(b)) return code_dir(b) == da;
      return true;
    }
    return true;  // the inserter's axis does not touch this edge
  };
  auto flow = [](int a, int b, Dir a_to_b, bool a_is_dest) -> int {
    if (a_is_dest || a == kObjEmpty || b == kObjEmpty) return 0;
    if (code_is_conveyor(b)) return code_dir(a) == a_to_b ? 1 : 0;
    if (code_dir(b) != a_to_b) return 0;  // b picks from its input tile only
    return (code_is_conveyor(a) || code_dir(a) == a_to_b) ? 1 : 0;
  };
  PairEval r{};
  r.valid = side_ok(ct, cu, t_to_u, t_is_dest, u_is_dest) &&
            side_ok(cu, ct, u_to_t, u_is_dest, t_is_dest);
  r.flow_tu = r.valid ? flow(ct, cu, t_to_u, t_is_dest) : 0;
  r.flow_ut = r.valid ? flow(cu, ct, u_to_t, u_is_dest) : 0;
  return r;
}

}  // namespace

bool should_deliver(const ProblemInstance& inst, const Stage1Solution& plan) {
  for (const SourceSpec& s : inst.sources) {
    if (s.item == inst.out_item) return true;
  }
  for (std::size_t a = 0; a < plan.recipe_idx.size(); ++a) {
    if (plan.recipe_idx[a] > 0 &&
        inst.recipes[plan.recipe_idx[a] - 1].product == inst.out_item) {
      return true;
    }
  }
  return false;
}

std::vector<BlockSpec> block_specs(const ProblemInstance& inst, const Stage1Solution& plan,
                                   const PackingLayout& packing,
                                   const std::vector<int>& block_slot) {
  if (block_slot.size() != packing.anchors.size()) {
    throw std::invalid_argument("block_slot size does not match the packing");
  }
  std::vector<BlockSpec> out;
  out.reserve(packing.anchors.size());
  for (std::size_t b = 0; b < packing.anchors.size(); ++b) {
    int slot = block_slot[b];
    const Recipe& r = inst.recipes[plan.recipe_idx[slot] - 1];
    BlockSpec spec;
    spec.anchor = packing.anchors[b];
    spec.product = r.product;
    for (const auto& [item, qty] : r.ingredients) spec.ingredients.push_back(item);
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<std::string> check_route_grids(const ProblemInstance& inst,
                                           const std::vector<BlockSpec>& blocks, bool deliver,
                                           const Grid<int>& conveyors,
                                           const Grid<int>& inserters, const Grid<int>& routes,
                                           const Grid<int>& carrying) {
  std::vector<std::string> out;
  auto flag = [&out](GridCoord t, const std::string& msg) {
    out.push_back(tile_str(t) + ": " + msg);
  };
  const int w = inst.width;
  const int h = inst.height;
  if (conveyors.width() != w || conveyors.height() != h || inserters.width() != w ||
      inserters.height() != h || routes.width() != w || routes.height() != h ||
      carrying.width() != w || carrying.height() != h) {
    out.push_back("grid dimensions do not match the instance");
    return out;
  }

  Grid<int> block_at(w, h);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const GridCoord a = blocks[b].anchor;
    for (int dy = 0; dy < 3; ++dy) {
      for (int dx = 0; dx < 3; ++dx) {
        const GridCoord c{a.x + dx, a.y + dy};
        if (!block_at.in_bounds(c)) {
          flag(a, "assembler block leaves the grid");
          continue;
        }
        if (block_at.at(c) != 0) flag(c, "assembler blocks overlap");
        block_at.at(c) = static_cast<int>(b) + 1;
      }
    }
  }

  // Fold the two direction grids into one object-code grid.
  Grid<int> code(w, h);
  for (int y = 1; y <= h; ++y) {
    for (int x = 1; x <= w; ++x) {
      const GridCoord t{x, y};
      int cv = conveyors.at(t);
      int iv = inserters.at(t);
      if (cv < 0 || cv > 4) {
        flag(t, "conveyor direction code out of range");
        cv = 0;
      }
      if (iv < 0 || iv > 4) {
        flag(t, "inserter direction code out of range");
        iv = 0;
      }
      if (cv != 0 && iv != 0) flag(t, "tile hosts both a conveyor and an inserter");
      if ((cv != 0 || iv != 0) && block_at.at(t) != 0) {
        flag(t, "transport object inside an assembler block");
      }
      code.at(t) = block_at.at(t) != 0 ? kObjEmpty : (cv != 0 ? cv : (iv != 0 ? 4 + iv : 0));
    }
  }

  const GridCoord dest = inst.destination;
  auto src_item = [&inst](GridCoord t) -> int {
    for (const SourceSpec& s : inst.sources) {
      if (s.pos == t) return s.item;
    }
    return 0;
  };

  // flow(t, u): tile t hands items to adjacent tile u. The destination never
  // feeds anything; assembler cells exchange items only through inserters.
  auto flow = [&](GridCoord t, GridCoord u) -> bool {
    if (t == dest) return false;
    const int ct = code.at(t);
    const int cu = code.at(u);
    if (ct == kObjEmpty || cu == kObjEmpty) return false;
    if (code_is_conveyor(cu)) return step(t, code_dir(ct)) == u;
    const Dir d = code_dir(cu);  // cu is an inserter; it takes from its input tile only
    if (step(u, dir_opposite(d)) != t) return false;
    return code_is_conveyor(ct) || code_dir(ct) == d;
  };

  const int route_cap = w + h;
  for (int y = 1; y <= h; ++y) {
    for (int x = 1; x <= w; ++x) {
      const GridCoord t{x, y};
      const int blk = block_at.at(t);
      const int c = code.at(t);
      const int r = routes.at(t);
      const int k = carrying.at(t);
      const int sitem = src_item(t);
      if (blk != 0) {
        if (sitem != 0) flag(t, "assembler block covers a source tile");
        if (t == dest) flag(t, "assembler block covers the destination");
        if (k != blocks[blk - 1].product) flag(t, "assembler cell must carry the block's product");
        if (r != 0) flag(t, "assembler cell must have route value 0");
        continue;
      }
      const bool is_dst = (t == dest);
      if (c == kObjEmpty) {
        if (sitem != 0) flag(t, "source tile must host a conveyor");
        if (is_dst && deliver) flag(t, "destination must host a conveyor to receive the output");
        if (k != 0) flag(t, "empty tile must carry nothing");
        if (r != 0) flag(t, "empty tile must have route value 0");
        continue;
      }
      if (k < 1 || k > inst.num_items) flag(t, "occupied tile must carry a valid item");
      if (r < 1 || r > route_cap) flag(t, "route value out of range");
      if (code_is_conveyor(c)) {
        const Dir d = code_dir(c);
        if (is_dst && !deliver) flag(t, "destination hosts a conveyor but nothing is delivered");
        int n_feed = 0;
        int max_feed = 0;
        bool feed_item_ok = true;
        for (Dir nd : kAllDirs) {
          const GridCoord a = step(t, nd);
          if (!code.in_bounds(a) || block_at.at(a) != 0) continue;
          if (flow(a, t)) {
            ++n_feed;
            max_feed = std::max(max_feed, routes.at(a));
            if (carrying.at(a) != k) feed_item_ok = false;
          }
        }
        if (sitem != 0) {
          if (k != sitem) flag(t, "source conveyor must carry the declared source item");
          if (r != 1) flag(t, "source conveyor must start its route at 1");
          if (n_feed != 0) flag(t, "source conveyor may not be fed");
        } else {
          if (is_dst && k != inst.out_item) {
            flag(t, "destination conveyor must carry the output item");
          }
          if (n_feed == 0) {
            flag(t, "conveyor is fed by nothing");
          } else {
            if (r != max_feed + 1) flag(t, "conveyor route must sit one above its longest feeder");
            if (!feed_item_ok) flag(t, "conveyor merges flows of different items");
          }
        }
        if (!is_dst) {
          const GridCoord u = step(t, d);
          bool ok = code.in_bounds(u);
          if (ok && block_at.at(u) == 0) {
            const int cu = code.at(u);
            if (code_is_conveyor(cu)) {
              ok = (u == dest) || step(u, code_dir(cu)) != t;  // facing pairs deadlock
            } else if (code_is_inserter(cu)) {
              ok = (code_dir(cu) == d);  // that inserter picks from t
            } else {
              ok = false;
            }
          }
          if (!ok) flag(t, "conveyor direction has no valid target");
          int consumers = 0;
          for (Dir nd : kAllDirs) {
            const GridCoord a = step(t, nd);
            if (!code.in_bounds(a) || block_at.at(a) != 0) continue;
            if (flow(t, a)) ++consumers;
          }
          if (consumers == 0) flag(t, "conveyor output is consumed by nothing");
        }
      } else {
        const Dir d = code_dir(c);
        if (sitem != 0) flag(t, "source tile must host a conveyor");
        if (is_dst) flag(t, "destination tile may not host an inserter");
        const GridCoord v = step(t, dir_opposite(d));
        const GridCoord u = step(t, d);
        if (!code.in_bounds(v)) {
          flag(t, "inserter picks from outside the grid");
        } else if (v == dest) {
          flag(t, "inserter may not pick from the destination");
        } else if (block_at.at(v) != 0) {
          const BlockSpec& b = blocks[block_at.at(v) - 1];
          if (r != 1) flag(t, "inserter taking from an assembler must start its route at 1");
          if (k != b.product) flag(t, "inserter taking from an assembler must carry its product");
        } else {
          const int cv = code.at(v);
          if (cv == kObjEmpty) {
            flag(t, "inserter picks from an empty tile");
          } else if (code_is_inserter(cv) && code_dir(cv) != d) {
            flag(t, "chained inserters must share a direction");
          } else {
            if (r != routes.at(v) + 1) flag(t, "inserter route must sit one above its input tile");
            if (k != carrying.at(v)) flag(t, "inserter must carry its input tile's item");
          }
        }
        if (!code.in_bounds(u)) {
          flag(t, "inserter drops outside the grid");
        } else if (block_at.at(u) != 0) {
          const BlockSpec& b = blocks[block_at.at(u) - 1];
          if (std::find(b.ingredients.begin(), b.ingredients.end(), k) == b.ingredients.end()) {
            flag(t, "inserter feeds an assembler an item its recipe does not use");
          }
        } else {
          const int cu = code.at(u);
          if (cu == kObjEmpty) {
            flag(t, "inserter drops onto an empty tile");
          } else if (code_is_inserter(cu) && code_dir(cu) != d) {
            flag(t, "chained inserters must share a direction");
          }
          // Dropping onto a source conveyor is caught by the source's
          // may-not-be-fed rule above.
        }
      }
    }
  }
  return out;
}

Stage3Outcome solve_stage3(const ProblemInstance& inst, const Stage1Solution& plan,
                           const PackingLayout& packing, const Stage3Params& params) {
  const int w = inst.width;
  const int h = inst.height;
  const int cap = w + h;
  const int n_items = inst.num_items;
  const int S = plan.num_active();
  const int K = static_cast<int>(packing.anchors.size());
  if (S != K) throw std::invalid_argument("packing does not match the plan's active assemblers");
  const bool deliver = should_deliver(inst, plan);
  const Grid<int>& block_at = packing.block_at;
  const GridCoord dest = inst.destination;

  Grid<int> src(w, h);
  for (const SourceSpec& s : inst.sources) src.at(s.pos) = s.item;

  // Per-slot interface data; active slots are the prefix [0, S).
  std::vector<int> slot_product(S), slot_out(S);
  std::vector<std::vector<int>> slot_in(S);
  long long sum_out = 0, sum_in = 0;
  for (int s = 0; s < S; ++s) {
    slot_product[s] = inst.recipes[plan.recipe_idx[s] - 1].product;
    slot_out[s] = plan.inserters_out[s];
    slot_in[s] = plan.inserters_in[s];
    sum_out += slot_out[s];
    for (int j = 1; j <= n_items; ++j) sum_in += slot_in[s][j];
  }

  fd::Model m;

  // --- assignment vars branch first: A[p] = 1 + assigned plan slot ---
  std::vector<fd::VarId> A(K);
  for (int p = 0; p < K; ++p) A[p] = m.new_var(1, S);
  if (K > 0) m.post_alldiff_except_0(A);
  // Identical slots are interchangeable; keep them in block order.
  for (int i = 0; i < S; ++i) {
    for (int j = i + 1; j < S; ++j) {
      if (plan.recipe_idx[i] != plan.recipe_idx[j] || slot_out[i] != slot_out[j] ||
          slot_in[i] != slot_in[j]) {
        continue;
      }
      for (int p = 0; p < K; ++p) {
        for (int q = p + 1; q < K; ++q) {
          fd::VarId bp = m.reified_eq_const(A[p], j + 1);
          fd::VarId bq = m.reified_eq_const(A[q], i + 1);
          m.post_linear_le({{1, bp}, {1, bq}}, 1);
        }
      }
    }
  }

  // --- tile ordering: flood outward from sources, destination, and block
  // rims so the search settles the constrained region first ---
  auto adjacent_block = [&](GridCoord t) {
    for (Dir d : kAllDirs) {
      GridCoord u = step(t, d);
      if (block_at.in_bounds(u) && block_at.at(u) != 0) return true;
    }
    return false;
  };
  std::vector<GridCoord> order;
  {
    Grid<int> seen(w, h);
    std::queue<GridCoord> bfs;
    auto push = [&](GridCoord t) {
      if (seen.at(t) == 0 && block_at.at(t) == 0) {
        seen.at(t) = 1;
        bfs.push(t);
      }
    };
    for (int y = 1; y <= h; ++y)
      for (int x = 1; x <= w; ++x)
        if (src.at(x, y) != 0) push({x, y});
    if (block_at.at(dest) == 0) push(dest);
    for (int y = 1; y <= h; ++y)
      for (int x = 1; x <= w; ++x)
        if (block_at.at(x, y) == 0 && adjacent_block({x, y})) push({x, y});
    while (!bfs.empty()) {
      GridCoord t = bfs.front();
      bfs.pop();
      order.push_back(t);
      for (Dir d : kAllDirs) {
        GridCoord u = step(t, d);
        if (seen.in_bounds(u)) push(u);
      }
    }
    for (int y = 1; y <= h; ++y)
      for (int x = 1; x <= w; ++x)
        if (block_at.at(x, y) == 0 && seen.at(x, y) == 0) order.push_back({x, y});
  }

  // --- static code legality ---
  auto conv_ok = [&](GridCoord t, Dir d) {
    GridCoord u = step(t, d);
    if (!block_at.in_bounds(u)) return false;
    if (src.at(u) != 0) return false;  // nothing may feed a source
    if (u == dest && !deliver) return false;
    return true;
  };
  auto ins_ok = [&](GridCoord t, Dir d) {
    GridCoord v = step(t, dir_opposite(d));
    GridCoord u = step(t, d);
    if (!block_at.in_bounds(v) || !block_at.in_bounds(u)) return false;
    if (v == dest) return false;  // nothing picks from the destination
    if (src.at(u) != 0) return false;
    if (u == dest && !deliver) return false;
    return true;
  };

  // --- core tile vars, grouped so branching runs objects, then routes,
  // then carried items ---
  Grid<int> obj_id(w, h), route_id(w, h), carry_id(w, h);
  for (const GridCoord& t : order) {
    fd::VarId v;
    if (src.at(t) != 0 || (t == dest && deliver)) {
      v = m.new_var(1, 4);
      if (src.at(t) != 0) {
        for (Dir d : kAllDirs) {
          if (!conv_ok(t, d)) {
            if (m.dom_size(v) == 1) {
              m.post_linear_le({}, -1);
            } else {
              m.remove_val(v, static_cast<int>(d));
            }
          }
        }
      }
    } else if (t == dest) {
      v = m.new_var(0, 0);
    } else {
      v = m.new_var(0, kObjMax);
      for (Dir d : kAllDirs) {
        if (!conv_ok(t, d)) m.remove_val(v, static_cast<int>(d));
        if (!ins_ok(t, d)) m.remove_val(v, inserter_code(d));
      }
    }
    obj_id.at(t) = v;
  }
  for (const GridCoord& t : order) {
    if (src.at(t) != 0) {
      route_id.at(t) = m.new_var(1, 1);
    } else if (t == dest) {
      route_id.at(t) = m.new_var(deliver ? 2 : 0, deliver ? cap : 0);
    } else {
      route_id.at(t) = m.new_var(0, cap);
    }
  }
  for (const GridCoord& t : order) {
    if (src.at(t) != 0) {
      carry_id.at(t) = m.new_var(src.at(t), src.at(t));
    } else if (t == dest) {
      carry_id.at(t) = m.new_var(deliver ? inst.out_item : 0, deliver ? inst.out_item : 0);
    } else {
      carry_id.at(t) = m.new_var(0, n_items);
    }
  }

  // --- route-value windows from shortest distances: a route climbing to
  // tile t spends at least dist-from-a-start steps, and whatever leaves t
  // needs dist-to-a-sink more before the w+h cap ---
  {
    auto bfs_dist = [&](const std::vector<GridCoord>& seeds) {
      Grid<int> dist(w, h);
      for (int y = 1; y <= h; ++y)
        for (int x = 1; x <= w; ++x) dist.at(x, y) = -1;
      std::queue<GridCoord> q;
      for (const GridCoord& s : seeds) {
        if (dist.at(s) == -1 && block_at.at(s) == 0) {
          dist.at(s) = 0;
          q.push(s);
        }
      }
      while (!q.empty()) {
        GridCoord t = q.front();
        q.pop();
        for (Dir d : kAllDirs) {
          GridCoord u = step(t, d);
          if (dist.in_bounds(u) && block_at.at(u) == 0 && dist.at(u) == -1) {
            dist.at(u) = dist.at(t) + 1;
            q.push(u);
          }
        }
      }
      return dist;
    };
    std::vector<GridCoord> starts, sinks;
    for (int y = 1; y <= h; ++y) {
      for (int x = 1; x <= w; ++x) {
        GridCoord t{x, y};
        if (block_at.at(t) != 0) continue;
        if (src.at(t) != 0) starts.push_back(t);
        if (adjacent_block(t)) {
          starts.push_back(t);
          sinks.push_back(t);
        }
      }
    }
    if (deliver) sinks.push_back(dest);
    Grid<int> ds = bfs_dist(starts);
    Grid<int> dk = bfs_dist(sinks);
    for (const GridCoord& t : order) {
      const bool must_occupy = src.at(t) != 0 || (t == dest && deliver);
      if (ds.at(t) < 0 || dk.at(t) < 0) {
        if (must_occupy) {
          m.post_linear_le({}, -1);
        } else if (m.dom_contains(obj_id.at(t), 0)) {
          m.set_hi(obj_id.at(t), 0);
        } else {
          m.post_linear_le({}, -1);
        }
        continue;
      }
      fd::VarId r = route_id.at(t);
      for (int v = 1; v <= ds.at(t) && v <= cap; ++v) {
        if (!m.dom_contains(r, v)) continue;
        if (m.dom_size(r) == 1) {
          m.post_linear_le({}, -1);
        } else {
          m.remove_val(r, v);
        }
      }
      for (int v = cap - dk.at(t) + 1; v <= cap; ++v) {
        if (v < 1 || !m.dom_contains(r, v)) continue;
        if (m.dom_size(r) == 1) {
          m.post_linear_le({}, -1);
        } else {
          m.remove_val(r, v);
        }
      }
    }
  }

  // --- occupancy indicators and empty<->route<->carry channelling ---
  Grid<int> occ_id(w, h), ins_id(w, h);
  for (const GridCoord& t : order) {
    occ_id.at(t) = m.reified_gt_const(obj_id.at(t), 0);
    ins_id.at(t) = m.reified_gt_const(obj_id.at(t), 4);
    if (src.at(t) != 0 || t == dest) continue;  // their grids are pinned
    fd::VarId r_pos = m.reified_gt_const(route_id.at(t), 0);
    fd::VarId c_pos = m.reified_gt_const(carry_id.at(t), 0);
    m.post_implies(occ_id.at(t), r_pos);
    m.post_implies(r_pos, occ_id.at(t));
    m.post_implies(occ_id.at(t), c_pos);
    m.post_implies(c_pos, occ_id.at(t));
  }

  // --- adjacency: one table per edge fixes legality and the two flow
  // indicators; flows then drive route increments and item equality ---
  std::map<std::pair<int, int>, fd::VarId> q_cache;  // (flat, code) -> bool
  auto q_of = [&](GridCoord t, int code) {
    auto key = std::make_pair(block_at.flat_index(t), code);
    auto it = q_cache.find(key);
    if (it != q_cache.end()) return it->second;
    fd::VarId b = m.reified_eq_const(obj_id.at(t), code);
    q_cache.emplace(key, b);
    return b;
  };
  // Inserters whose input tile is an assembler cell start a route at 1 and
  // carry that block's product; collect them per tile for the fed-rule.
  std::vector<std::vector<fd::VarId>> start_of(static_cast<std::size_t>(w) * h + 1);
  std::vector<std::vector<fd::VarId>> in_z(static_cast<std::size_t>(w) * h + 1);
  std::vector<std::vector<fd::VarId>> out_f(static_cast<std::size_t>(w) * h + 1);

  for (const GridCoord& t : order) {
    for (Dir d : {Dir::East, Dir::South}) {
      GridCoord u = step(t, d);
      if (!block_at.in_bounds(u) || block_at.at(u) != 0) continue;
      fd::VarId f_tu = m.new_bool();
      fd::VarId f_ut = m.new_bool();
      std::vector<std::vector<int>> tuples;
      for (int ct = 0; ct <= kObjMax; ++ct) {
        if (!m.dom_contains(obj_id.at(t), ct)) continue;
        for (int cu = 0; cu <= kObjMax; ++cu) {
          if (!m.dom_contains(obj_id.at(u), cu)) continue;
          PairEval pe = eval_pair(ct, cu, d, t == dest, u == dest);
          if (pe.valid) tuples.push_back({ct, cu, pe.flow_tu, pe.flow_ut});
        }
      }
      m.post_table({obj_id.at(t), obj_id.at(u), f_tu, f_ut}, tuples);
      for (int rev = 0; rev < 2; ++rev) {
        const GridCoord a = rev ? u : t;  // feeder
        const GridCoord b = rev ? t : u;  // fed
        const fd::VarId f = rev ? f_ut : f_tu;
        fd::VarId diff = m.new_var(-cap, cap);  // routes[b] - routes[a]
        m.post_linear_eq({{1, route_id.at(b)}, {-1, route_id.at(a)}, {-1, diff}}, 0);
        m.post_implies_le(f, {{-1, diff}}, -1);  // feeders sit strictly below
        fd::VarId e = m.reified_eq_const(diff, 1);
        fd::VarId z = m.new_bool();  // this edge realizes the +1 step
        m.post_implies(z, f);
        m.post_implies(z, e);
        m.post_linear_le({{1, f}, {1, e}, {-1, z}}, 1);
        m.post_implies_le(f, {{1, carry_id.at(a)}, {-1, carry_id.at(b)}}, 0);
        m.post_implies_le(f, {{1, carry_id.at(b)}, {-1, carry_id.at(a)}}, 0);
        in_z[block_at.flat_index(b)].push_back(z);
        out_f[block_at.flat_index(a)].push_back(f);
      }
    }
  }

  // --- assembler interfaces: counts per block must match the assigned
  // slot, out-inserters adopt the block's product ---
  std::vector<fd::VarId> block_product_var(K);
  {
    std::vector<int> prod_arr(S + 1, 0);
    for (int s = 0; s < S; ++s) prod_arr[s + 1] = slot_product[s];
    for (int p = 0; p < K; ++p) {
      int max_prod = 0;
      for (int s = 0; s < S; ++s) max_prod = std::max(max_prod, slot_product[s]);
      block_product_var[p] = m.new_var(0, max_prod);
      m.post_element(block_product_var[p], prod_arr, A[p]);
    }
  }
  std::map<std::pair<int, int>, fd::VarId> cj_cache;  // (flat, item) -> bool
  auto cj_of = [&](GridCoord t, int j) {
    auto key = std::make_pair(block_at.flat_index(t), j);
    auto it = cj_cache.find(key);
    if (it != cj_cache.end()) return it->second;
    fd::VarId b = m.reified_eq_const(carry_id.at(t), j);
    cj_cache.emplace(key, b);
    return b;
  };
  struct SinkPos {  // inserter position dropping into a block
    GridCoord t;
    int code;
  };
  std::vector<SinkPos> sink_positions;
  {
    std::vector<std::vector<std::pair<GridCoord, int>>> in_pos(K + 1), out_pos(K + 1);
    for (const GridCoord& t : order) {
      for (Dir d : kAllDirs) {
        GridCoord u = step(t, d);
        if (!block_at.in_bounds(u) || block_at.at(u) == 0) continue;
        int b = block_at.at(u);
        in_pos[b].push_back({t, inserter_code(d)});
        out_pos[b].push_back({t, inserter_code(dir_opposite(d))});
      }
    }
    for (int b = 1; b <= K; ++b) {
      for (const auto& [t, code] : out_pos[b]) {
        fd::VarId g = q_of(t, code);
        start_of[block_at.flat_index(t)].push_back(g);
        m.post_implies_le(g, {{1, route_id.at(t)}}, 1);
        m.post_implies_le(g, {{-1, route_id.at(t)}}, -1);
        m.post_implies_le(g, {{1, carry_id.at(t)}, {-1, block_product_var[b - 1]}}, 0);
        m.post_implies_le(g, {{1, block_product_var[b - 1]}, {-1, carry_id.at(t)}}, 0);
      }
      // out-count
      {
        std::vector<int> arr(S + 1, 0);
        int mx = 0;
        for (int s = 0; s < S; ++s) {
          arr[s + 1] = slot_out[s];
          mx = std::max(mx, slot_out[s]);
        }
        fd::VarId out_n = m.new_var(0, mx);
        m.post_element(out_n, arr, A[b - 1]);
        std::vector<fd::Term> terms;
        for (const auto& [t, code] : out_pos[b]) terms.push_back({1, q_of(t, code)});
        terms.push_back({-1, out_n});
        m.post_linear_eq(std::move(terms), 0);
      }
      // in-counts per item
      for (int j = 1; j <= n_items; ++j) {
        std::vector<int> arr(S + 1, 0);
        int mx = 0;
        for (int s = 0; s < S; ++s) {
          arr[s + 1] = slot_in[s][j];
          mx = std::max(mx, slot_in[s][j]);
        }
        fd::VarId in_n = m.new_var(0, mx);
        m.post_element(in_n, arr, A[b - 1]);
        std::vector<fd::Term> terms;
        for (const auto& [t, code] : in_pos[b]) {
          fd::VarId q = q_of(t, code);
          fd::VarId cj = cj_of(t, j);
          fd::VarId y = m.new_bool();
          m.post_implies(y, q);
          m.post_implies(y, cj);
          m.post_linear_le({{1, q}, {1, cj}, {-1, y}}, 1);
          terms.push_back({1, y});
        }
        terms.push_back({-1, in_n});
        m.post_linear_eq(std::move(terms), 0);
      }
      for (const auto& [t, code] : in_pos[b]) sink_positions.push_back({t, code});
    }
  }

  // --- every occupied tile is either a route start or fed by an edge that
  // steps its route value up by exactly one ---
  for (const GridCoord& t : order) {
    if (src.at(t) != 0) continue;  // sources start at 1 with no feeders
    std::vector<fd::Term> terms{{1, occ_id.at(t)}};
    for (fd::VarId z : in_z[block_at.flat_index(t)]) terms.push_back({-1, z});
    for (fd::VarId g : start_of[block_at.flat_index(t)]) terms.push_back({-1, g});
    m.post_linear_le(std::move(terms), 0);
  }
  // --- every non-destination conveyor hands its items to someone ---
  for (const GridCoord& t : order) {
    if (t == dest) continue;
    std::vector<fd::Term> terms{{1, occ_id.at(t)}, {-1, ins_id.at(t)}};
    for (fd::VarId f : out_f[block_at.flat_index(t)]) terms.push_back({-1, f});
    m.post_linear_le(std::move(terms), 0);
  }

  // --- redundant: the longest route ends at a sink (destination conveyor
  // or an inserter dropping into an assembler) ---
  if (deliver || K > 0 || !inst.sources.empty()) {
    fd::VarId mx = m.new_var(0, cap);
    for (const GridCoord& t : order) m.post_linear_le({{1, route_id.at(t)}, {-1, mx}}, 0);
    std::vector<fd::Term> sel_sum;
    if (deliver) {
      fd::VarId sel = m.new_bool();
      m.post_implies_le(sel, {{1, mx}, {-1, route_id.at(dest)}}, 0);
      sel_sum.push_back({1, sel});
    }
    for (const SinkPos& sp : sink_positions) {
      fd::VarId sel = m.new_bool();
      m.post_implies(sel, q_of(sp.t, sp.code));
      m.post_implies_le(sel, {{1, mx}, {-1, route_id.at(sp.t)}}, 0);
      sel_sum.push_back({1, sel});
    }
    std::vector<fd::Term> eq = sel_sum;
    m.post_linear_eq(std::move(eq), 1);
  }

  // --- objective: weighted object count ---
  const long long cp = params.conveyor_penalty;
  const long long ip = params.inserter_penalty;
  long long ub = 0;
  for (std::size_t i = 0; i < order.size(); ++i) ub += std::max(cp, ip);
  long long lb = cp * (static_cast<long long>(inst.sources.size()) + (deliver ? 1 : 0)) +
                 ip * std::max(sum_out, sum_in);
  if (ub > 1000000000LL) throw std::invalid_argument("penalties too large");
  fd::VarId cost = m.new_var(static_cast<int>(std::min(lb, ub)), static_cast<int>(ub));
  if (lb > ub) m.post_linear_le({}, -1);
  {
    std::vector<fd::Term> terms;
    for (const GridCoord& t : order) {
      terms.push_back({cp, occ_id.at(t)});
      if (ip != cp) terms.push_back({ip - cp, ins_id.at(t)});
    }
    terms.push_back({-1, cost});
    m.post_linear_eq(std::move(terms), 0);
  }

  fd::SearchConfig cfg;
  cfg.mode = fd::SearchConfig::Mode::Minimize;
  cfg.objective = cost;
  cfg.node_limit = params.node_limit;
  cfg.time_limit_s = params.time_limit_s;
  fd::Outcome oc = m.solve(cfg);

  Stage3Outcome out;
  out.nodes = oc.nodes;
  out.status = oc.status;
  if (oc.status != fd::SolveStatus::Sat) return out;

  LayoutSolution& sol = out.layout;
  sol.conveyors = Grid<int>(w, h);
  sol.inserters = Grid<int>(w, h);
  sol.routes = Grid<int>(w, h);
  sol.carrying = Grid<int>(w, h);
  sol.block_slot.resize(K);
  for (int p = 0; p < K; ++p) sol.block_slot[p] = oc.assignment[A[p]] - 1;
  for (const GridCoord& t : order) {
    const int code = oc.assignment[obj_id.at(t)];
    if (code_is_conveyor(code)) sol.conveyors.at(t) = code;
    if (code_is_inserter(code)) sol.inserters.at(t) = code - 4;
    sol.routes.at(t) = oc.assignment[route_id.at(t)];
    sol.carrying.at(t) = oc.assignment[carry_id.at(t)];
  }
  for (int p = 0; p < K; ++p) {
    const GridCoord a = packing.anchors[p];
    for (int dy = 0; dy < 3; ++dy)
      for (int dx = 0; dx < 3; ++dx)
        sol.carrying.at(a.x + dx, a.y + dy) = slot_product[sol.block_slot[p]];
  }
  sol.objective = oc.objective;
  return out;
}

}  // namespace factopt
