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

#include "factopt/validator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

#include "factopt/stage3.hpp"

namespace factopt {
namespace {

bool conv_code(int c) { return c >= 1 && c <= 4; }
bool ins_code(int c) { return c >= 5 && c <= 8; }
Dir code_dir(int c) { return static_cast<Dir>(c > 4 ? c - 4 : c); }

std::string tile_str(GridCoord c) {
  std::ostringstream os;
  os << "(" << c.x << "," << c.y << ")";
  return os.str();
}

std::string rate_str(const Rate& r) {
  std::ostringstream os;
  os << r.numerator() << "/" << r.denominator();
  return os.str();
}

// Fold the two direction grids into one object-code grid (1..4 conveyor,
// 5..8 inserter). Tiles under assembler blocks and out-of-range codes fold
// to 0; check_route_grids reports those separately.
Grid<int> fold_codes(const Blueprint& bp, const Grid<int>& block_at) {
  Grid<int> code(bp.width, bp.height);
  for (int y = 1; y <= bp.height; ++y) {
    for (int x = 1; x <= bp.width; ++x) {
      if (block_at.at(x, y) != 0) continue;
      const int c = bp.conveyors.at(x, y);
      const int i = bp.inserters.at(x, y);
      if (c >= 1 && c <= 4) {
        code.at(x, y) = c;
      } else if (i >= 1 && i <= 4) {
        code.at(x, y) = i + 4;
      }
    }
  }
  return code;
}

Grid<int> paint_blocks(const ProblemInstance& inst, const std::vector<BlockSpec>& blocks) {
  Grid<int> block_at(inst.width, inst.height);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int dy = 0; dy < 3; ++dy) {
      for (int dx = 0; dx < 3; ++dx) {
        const GridCoord c{blocks[b].anchor.x + dx, blocks[b].anchor.y + dy};
        if (block_at.in_bounds(c)) block_at.at(c) = static_cast<int>(b) + 1;
      }
    }
  }
  return block_at;
}

struct DerivedLabels {
  Grid<int> routes;
  Grid<int> carrying;
  bool cycle = false;
  std::vector<GridCoord> mixed;  // conveyors fed with more than one item
};

// Reconstructs route and carrying labels from object directions alone:
// sources and assembler out-takes start routes at 1, every other transport
// tile sits one above its longest feeder, and items propagate along flow
// edges. A blueprint whose flow graph is cyclic cannot be labelled.
DerivedLabels derive_labels(const ProblemInstance& inst, const std::vector<BlockSpec>& blocks,
                            const Grid<int>& code, const Grid<int>& block_at) {
  const int w = inst.width, h = inst.height;
  DerivedLabels d;
  d.routes = Grid<int>(w, h);
  d.carrying = Grid<int>(w, h);
  Grid<int> src(w, h), indeg(w, h), best(w, h);
  Grid<int> mixed_flag(w, h);
  for (const SourceSpec& s : inst.sources) src.at(s.pos) = s.item;
  const GridCoord dest = inst.destination;

  auto is_free = [&](GridCoord c) { return block_at.in_bounds(c) && block_at.at(c) == 0; };
  auto flow = [&](GridCoord a, GridCoord b) {
    if (a == dest) return false;  // delivered items leave the system
    const int ca = code.at(a), cb = code.at(b);
    if (ca == 0 || cb == 0) return false;
    if (conv_code(cb)) return step(a, code_dir(ca)) == b;
    const Dir dd = code_dir(cb);
    if (step(b, dir_opposite(dd)) != a) return false;
    return conv_code(ca) || code_dir(ca) == dd;
  };

  int transport = 0;
  std::vector<GridCoord> ready;
  for (int y = 1; y <= h; ++y) {
    for (int x = 1; x <= w; ++x) {
      const GridCoord t{x, y};
      if (code.at(t) == 0) continue;
      ++transport;
      int deg = 0;
      for (Dir dd : kAllDirs) {
        const GridCoord a = step(t, dd);
        if (is_free(a) && flow(a, t)) ++deg;
      }
      indeg.at(t) = deg;
      if (src.at(t) != 0) {
        d.routes.at(t) = 1;
        d.carrying.at(t) = src.at(t);
      } else if (ins_code(code.at(t))) {
        const GridCoord v = step(t, dir_opposite(code_dir(code.at(t))));
        if (block_at.in_bounds(v) && block_at.at(v) != 0)
          d.routes.at(t) = 1, d.carrying.at(t) = blocks[block_at.at(v) - 1].product;
      }
      if (deg == 0) ready.push_back(t);
    }
  }
  int processed = 0;
  for (std::size_t head = 0; head < ready.size(); ++head) {
    const GridCoord t = ready[head];
    ++processed;
    for (Dir dd : kAllDirs) {
      const GridCoord u = step(t, dd);
      if (!is_free(u) || !flow(t, u)) continue;
      best.at(u) = std::max(best.at(u), d.routes.at(t));
      if (d.carrying.at(u) == 0) {
        d.carrying.at(u) = d.carrying.at(t);
      } else if (d.carrying.at(u) != d.carrying.at(t) && conv_code(code.at(u)) &&
                 mixed_flag.at(u) == 0) {
        mixed_flag.at(u) = 1;
        d.mixed.push_back(u);
      }
      if (--indeg.at(u) == 0) {
        if (d.routes.at(u) == 0) d.routes.at(u) = best.at(u) + 1;
        ready.push_back(u);
      }
    }
  }
  d.cycle = processed != transport;
  for (const BlockSpec& b : blocks) {
    for (int dy = 0; dy < 3; ++dy) {
      for (int dx = 0; dx < 3; ++dx) {
        const GridCoord c{b.anchor.x + dx, b.anchor.y + dy};
        if (d.carrying.in_bounds(c)) d.carrying.at(c) = b.product;
      }
    }
  }
  return d;
}

}  // namespace

std::vector<std::string> validate_structure(const Blueprint& bp, const ProblemInstance& inst) {
  std::vector<std::string> out;
  if (bp.width != inst.width || bp.height != inst.height ||
      bp.conveyors.width() != bp.width || bp.conveyors.height() != bp.height ||
      bp.inserters.width() != bp.width || bp.inserters.height() != bp.height) {
    out.push_back("blueprint dimensions do not match the instance");
    return out;
  }

  std::vector<BlockSpec> blocks;
  for (const BlueprintAssembler& a : bp.assemblers) {
    if (a.recipe < 1 || a.recipe > static_cast<int>(inst.recipes.size())) {
      out.push_back(tile_str(a.anchor) + ": assembler recipe id out of range");
      return out;
    }
    const Recipe& r = inst.recipes[a.recipe - 1];
    BlockSpec b;
    b.anchor = a.anchor;
    b.product = r.product;
    for (const auto& [item, qty] : r.ingredients) b.ingredients.push_back(item);
    blocks.push_back(b);
  }

  const Grid<int> block_at = paint_blocks(inst, blocks);
  const Grid<int> code = fold_codes(bp, block_at);
  const DerivedLabels d = derive_labels(inst, blocks, code, block_at);
  for (const GridCoord& c : d.mixed) out.push_back(tile_str(c) + ": mixed items on conveyor");
  if (d.cycle) {
    out.push_back("cycle detected");
    return out;  // route labels do not exist, so the grid checks cannot run
  }

  bool deliver = false;
  for (const SourceSpec& s : inst.sources)
    if (s.item == inst.out_item) deliver = true;
  for (const BlockSpec& b : blocks)
    if (b.product == inst.out_item) deliver = true;

  std::vector<std::string> grid_violations =
      check_route_grids(inst, blocks, deliver, bp.conveyors, bp.inserters, d.routes, d.carrying);
  out.insert(out.end(), grid_violations.begin(), grid_violations.end());

  // Every assembler must be workable: each recipe ingredient arrives on at
  // least one inserter, and at least one inserter takes the product away.
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Recipe& r = inst.recipes[bp.assemblers[b].recipe - 1];
    std::map<int, int> feeds;
    int takes = 0;
    for (int y = 1; y <= bp.height; ++y) {
      for (int x = 1; x <= bp.width; ++x) {
        const GridCoord t{x, y};
        if (block_at.at(t) != 0 || !ins_code(code.at(t))) continue;
        const Dir dd = code_dir(code.at(t));
        const GridCoord u = step(t, dd), v = step(t, dir_opposite(dd));
        if (block_at.in_bounds(u) && block_at.at(u) == static_cast<int>(b) + 1)
          ++feeds[d.carrying.at(t)];
        if (block_at.in_bounds(v) && block_at.at(v) == static_cast<int>(b) + 1) ++takes;
      }
    }
    for (const auto& [item, qty] : r.ingredients) {
      if (feeds[item] == 0)
        out.push_back(tile_str(blocks[b].anchor) + ": assembler is not fed item " +
                      std::to_string(item));
    }
    if (takes == 0)
      out.push_back(tile_str(blocks[b].anchor) + ": assembler has no output inserter");
  }
  return out;
}

FlowReport simulate_flow(const Blueprint& bp, const ProblemInstance& inst) {
  FlowReport rep;
  rep.tile_rate = Grid<Rate>(inst.width, inst.height);
  rep.utilization.assign(bp.assemblers.size(), Rate(0));
  if (bp.width != inst.width || bp.height != inst.height) return rep;
  const int w = inst.width, h = inst.height;

  std::vector<BlockSpec> blocks;
  for (const BlueprintAssembler& a : bp.assemblers) {
    BlockSpec b;
    b.anchor = a.anchor;
    if (a.recipe >= 1 && a.recipe <= static_cast<int>(inst.recipes.size()))
      b.product = inst.recipes[a.recipe - 1].product;
    blocks.push_back(b);
  }
  const Grid<int> block_at = paint_blocks(inst, blocks);
  const Grid<int> code = fold_codes(bp, block_at);
  const DerivedLabels labels = derive_labels(inst, blocks, code, block_at);
  const GridCoord dest = inst.destination;

  // Node ids: transport tiles use their flat index, assembler k follows at
  // w*h + 1 + k. Shares at fan-outs are fixed by the drain rule (ascending
  // tile index, i.e. upstream-first along a belt), so a single pass in
  // dependency order computes the fixed point of the monotone rate map;
  // tiles on a flow cycle (already illegal) keep rate zero.
  const int tile_nodes = w * h;
  const int node_count = tile_nodes + 1 + static_cast<int>(blocks.size());
  std::vector<std::vector<int>> succ(node_count);
  std::vector<int> indeg(node_count, 0);
  std::vector<char> exists(node_count, 0);
  std::vector<Rate> inflow(node_count, Rate(0));
  std::vector<Rate> avail(tile_nodes + 1, Rate(0));
  std::vector<std::vector<int>> pickers(tile_nodes + 1);      // per conveyor
  std::vector<std::vector<int>> out_takes(blocks.size());     // per assembler

  auto flat = [&](GridCoord c) { return block_at.flat_index(c); };
  auto add_edge = [&](int a, int b) {
    succ[a].push_back(b);
    ++indeg[b];
  };

  for (const SourceSpec& s : inst.sources) {
    if (code.at(s.pos) != 0) inflow[flat(s.pos)] += Rate(s.rate);
  }

  for (int y = 1; y <= h; ++y) {
    for (int x = 1; x <= w; ++x) {
      const GridCoord t{x, y};
      const int c = code.at(t);
      if (c == 0) continue;
      exists[flat(t)] = 1;
      if (conv_code(c)) {
        for (Dir dd : kAllDirs) {
          const GridCoord u = step(t, dd);
          if (!block_at.in_bounds(u) || block_at.at(u) != 0) continue;
          if (ins_code(code.at(u)) && step(u, dir_opposite(code_dir(code.at(u)))) == t)
            pickers[flat(t)].push_back(flat(u));
        }
        std::sort(pickers[flat(t)].begin(), pickers[flat(t)].end());
        for (int p : pickers[flat(t)]) add_edge(flat(t), p);
        if (t != dest) {  // the destination belt hands items out of the system
          const GridCoord u = step(t, code_dir(c));
          if (block_at.in_bounds(u) && block_at.at(u) == 0 && conv_code(code.at(u)))
            add_edge(flat(t), flat(u));
        }
      } else {
        const Dir dd = code_dir(c);
        const GridCoord u = step(t, dd), v = step(t, dir_opposite(dd));
        if (block_at.in_bounds(u)) {
          if (block_at.at(u) != 0) {
            add_edge(flat(t), tile_nodes + block_at.at(u));
          } else if (conv_code(code.at(u))) {
            add_edge(flat(t), flat(u));
          } else if (ins_code(code.at(u)) && code_dir(code.at(u)) == dd) {
            add_edge(flat(t), flat(u));
          }
        }
        if (block_at.in_bounds(v) && block_at.at(v) != 0) {
          add_edge(tile_nodes + block_at.at(v), flat(t));
          out_takes[block_at.at(v) - 1].push_back(flat(t));
        }
      }
    }
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    exists[tile_nodes + 1 + b] = 1;
    std::sort(out_takes[b].begin(), out_takes[b].end());
  }

  const Rate belt_cap(inst.conveyor_capacity);
  const Rate arm_cap(inst.inserter_rate);
  std::deque<int> queue;
  for (int n = 1; n < node_count; ++n)
    if (exists[n] && indeg[n] == 0) queue.push_back(n);

  std::vector<Rate> asm_rate(blocks.size(), Rate(0));
  std::vector<std::map<int, Rate>> asm_supply(blocks.size());

  while (!queue.empty()) {
    const int n = queue.front();
    queue.pop_front();
    if (n <= tile_nodes) {
      const GridCoord t = block_at.from_flat(n);
      const int c = code.at(t);
      if (conv_code(c)) {
        Rate carried = std::min(inflow[n], belt_cap);
        rep.tile_rate.at(t) = carried;
        for (int p : pickers[n]) {
          const Rate share = std::min(carried, arm_cap);
          avail[p] = share;
          carried -= share;
        }
        if (t == dest) {
          rep.delivered_rate = carried;
        } else {
          const GridCoord u = step(t, code_dir(c));
          if (block_at.in_bounds(u) && block_at.at(u) == 0 && conv_code(code.at(u)))
            inflow[flat(u)] += carried;
        }
      } else {
        const Dir dd = code_dir(c);
        const Rate moved = std::min(avail[n], arm_cap);
        rep.tile_rate.at(t) = moved;
        if (moved == Rate(0)) rep.starved.push_back(t);
        const GridCoord u = step(t, dd);
        if (block_at.in_bounds(u)) {
          if (block_at.at(u) != 0) {
            const int b = block_at.at(u) - 1;
            asm_supply[b][labels.carrying.at(t)] += moved;
          } else if (conv_code(code.at(u))) {
            inflow[flat(u)] += moved;
          } else if (ins_code(code.at(u)) && code_dir(code.at(u)) == dd) {
            avail[flat(u)] = moved;
          }
        }
      }
    } else {
      const std::size_t b = n - tile_nodes - 1;
      const int rid = bp.assemblers[b].recipe;
      Rate produced(0);
      if (rid >= 1 && rid <= static_cast<int>(inst.recipes.size())) {
        const Recipe& r = inst.recipes[rid - 1];
        produced = Rate(r.rate);
        for (const auto& [item, qty] : r.ingredients) {
          const Rate supplied = asm_supply[b].count(item) ? asm_supply[b][item] : Rate(0);
          produced = std::min(produced, supplied * Rate(r.qty_produced, qty));
        }
        if (r.rate > 0) rep.utilization[b] = produced / Rate(r.rate);
      }
      asm_rate[b] = produced;
      for (int dy = 0; dy < 3; ++dy)
        for (int dx = 0; dx < 3; ++dx) {
          const GridCoord cell{blocks[b].anchor.x + dx, blocks[b].anchor.y + dy};
          if (rep.tile_rate.in_bounds(cell)) rep.tile_rate.at(cell) = produced;
        }
      Rate remaining = produced;
      for (int p : out_takes[b]) {
        const Rate share = std::min(remaining, arm_cap);
        avail[p] = share;
        remaining -= share;
      }
    }
    for (int s : succ[n])
      if (--indeg[s] == 0) queue.push_back(s);
  }

  std::sort(rep.starved.begin(), rep.starved.end(),
            [&](GridCoord a, GridCoord b) { return flat(a) < flat(b); });
  return rep;
}

std::string FlowReport::to_text() const {
  std::ostringstream os;
  os << "delivered_rate: " << rate_str(delivered_rate) << "\n";
  for (std::size_t i = 0; i < utilization.size(); ++i)
    os << "assembler " << i << ": utilization " << rate_str(utilization[i]) << "\n";
  os << "starved:";
  if (starved.empty()) os << " none";
  for (const GridCoord& c : starved) os << " " << tile_str(c);
  os << "\n";
  for (int y = 1; y <= tile_rate.height(); ++y)
    for (int x = 1; x <= tile_rate.width(); ++x)
      if (tile_rate.at(x, y) != Rate(0))
        os << "tile " << tile_str({x, y}) << ": " << rate_str(tile_rate.at(x, y)) << "\n";
  return os.str();
}

namespace {

// Depth-first enumeration of object grids for the tiny-instance oracle.
// Static per-tile code menus plus local neighbour rules prune the tree;
// every surviving leaf is re-checked with validate_structure, so the
// pruning only needs to be sound, never complete.
class LayoutEnumerator {
 public:
  LayoutEnumerator(const ProblemInstance& inst, long long cp, long long ip)
      : inst_(inst), cp_(cp), ip_(ip), src_(inst.width, inst.height) {
    for (const SourceSpec& s : inst.sources) src_.at(s.pos) = s.item;
  }

  void run(const std::vector<BlueprintAssembler>& asms) {
    asms_ = asms;
    block_at_ = Grid<int>(inst_.width, inst_.height);
    deliver_ = false;
    for (const SourceSpec& s : inst_.sources)
      if (s.item == inst_.out_item) deliver_ = true;
    for (std::size_t i = 0; i < asms_.size(); ++i) {
      if (inst_.recipes[asms_[i].recipe - 1].product == inst_.out_item) deliver_ = true;
      for (int dy = 0; dy < 3; ++dy)
        for (int dx = 0; dx < 3; ++dx)
          block_at_.at(asms_[i].anchor.x + dx, asms_[i].anchor.y + dy) =
              static_cast<int>(i) + 1;
    }
    code_ = Grid<int>(inst_.width, inst_.height);
    build_tiles();
    dfs(0, 0);
  }

  long long best() const { return best_; }

 private:
  void build_tiles() {
    frees_.clear();
    allowed_.clear();
    Grid<int> index(inst_.width, inst_.height, -1);
    for (int y = 1; y <= inst_.height; ++y)
      for (int x = 1; x <= inst_.width; ++x)
        if (block_at_.at(x, y) == 0) {
          index.at(x, y) = static_cast<int>(frees_.size());
          frees_.push_back({x, y});
        }
    const GridCoord dest = inst_.destination;
    for (const GridCoord& t : frees_) {
      std::vector<int> codes;
      auto conv_fine = [&](Dir d) {
        if (t == dest) return true;  // destination direction is exempt
        const GridCoord u = step(t, d);
        if (!block_at_.in_bounds(u)) return false;
        if (src_.at(u) != 0) return false;
        if (u == dest && !deliver_) return false;
        return true;
      };
      auto ins_fine = [&](Dir d) {
        const GridCoord v = step(t, dir_opposite(d)), u = step(t, d);
        if (!block_at_.in_bounds(v) || !block_at_.in_bounds(u)) return false;
        if (v == dest) return false;
        if (src_.at(u) != 0) return false;
        if (u == dest && !deliver_) return false;
        return true;
      };
      if (src_.at(t) != 0) {
        for (Dir d : kAllDirs)
          if (conv_fine(d)) codes.push_back(static_cast<int>(d));
      } else if (t == dest) {
        if (deliver_) {
          for (Dir d : kAllDirs) codes.push_back(static_cast<int>(d));
        } else {
          codes.push_back(0);
        }
      } else {
        codes.push_back(0);
        for (Dir d : kAllDirs) {
          if (conv_fine(d)) codes.push_back(static_cast<int>(d));
          if (ins_fine(d)) codes.push_back(4 + static_cast<int>(d));
        }
      }
      allowed_.push_back(codes);
    }
    complete_after_.assign(frees_.size(), {});
    for (std::size_t i = 0; i < frees_.size(); ++i) {
      int trigger = static_cast<int>(i);
      for (Dir d : kAllDirs) {
        const GridCoord u = step(frees_[i], d);
        if (block_at_.in_bounds(u) && block_at_.at(u) == 0)
          trigger = std::max(trigger, index.at(u));
      }
      complete_after_[trigger].push_back(i);
    }
  }

  // One side of a decided neighbour pair: does t tolerate u next to it?
  bool half_ok(GridCoord t, GridCoord u) const {
    const int ct = code_.at(t);
    if (ct == 0 || t == inst_.destination) return true;
    Dir d;
    if (u.x == t.x + 1) {
      d = Dir::East;
    } else if (u.x == t.x - 1) {
      d = Dir::West;
    } else if (u.y == t.y + 1) {
      d = Dir::South;
    } else {
      d = Dir::North;
    }
    const int cu = code_.at(u);
    if (conv_code(ct)) {
      if (step(t, code_dir(ct)) != u) return true;
      if (cu == 0) return false;  // belt pointing at nothing
      if (conv_code(cu)) return u == inst_.destination || step(u, code_dir(cu)) != t;
      return code_dir(cu) == d;  // only a picker may face away
    }
    const Dir dt = code_dir(ct);
    if (step(t, dt) == u) {
      if (cu == 0) return false;  // arm dropping onto nothing
      if (ins_code(cu)) return code_dir(cu) == dt;
      return true;
    }
    if (step(t, dir_opposite(dt)) == u) {
      if (cu == 0) return false;  // arm picking from nothing
      if (ins_code(cu)) return code_dir(cu) == dt;
      return true;
    }
    return true;
  }

  bool neighbors_ok(GridCoord t) const {
    for (Dir d : {Dir::North, Dir::West}) {
      const GridCoord u = step(t, d);
      if (!block_at_.in_bounds(u) || block_at_.at(u) != 0) continue;
      if (!half_ok(t, u) || !half_ok(u, t)) return false;
    }
    return true;
  }

  // Once every neighbour of a conveyor is decided, it must have a feeder
  // (unless it is a source) and a consumer (unless it is the destination).
  bool tile_complete_ok(GridCoord c) const {
    const int cc = code_.at(c);
    if (!conv_code(cc)) return true;
    if (src_.at(c) == 0) {
      bool fed = false;
      for (Dir dd : kAllDirs) {
        const GridCoord a = step(c, dd);
        if (!block_at_.in_bounds(a) || block_at_.at(a) != 0) continue;
        const int ca = code_.at(a);
        if (ca == 0 || a == inst_.destination) continue;
        if (step(a, code_dir(ca)) == c) {
          fed = true;
          break;
        }
      }
      if (!fed) return false;
    }
    if (c == inst_.destination) return true;
    const GridCoord tgt = step(c, code_dir(cc));
    if (block_at_.in_bounds(tgt) && block_at_.at(tgt) == 0 && conv_code(code_.at(tgt)))
      return true;
    for (Dir dd : kAllDirs) {
      const GridCoord a = step(c, dd);
      if (!block_at_.in_bounds(a) || block_at_.at(a) != 0) continue;
      if (ins_code(code_.at(a)) && step(a, dir_opposite(code_dir(code_.at(a)))) == c)
        return true;
    }
    return false;
  }

  void dfs(std::size_t i, long long cost) {
    if (best_ >= 0 && cost >= best_) return;
    if (i == frees_.size()) {
      finish(cost);
      return;
    }
    const GridCoord t = frees_[i];
    for (int c : allowed_[i]) {
      code_.at(t) = c;
      if (!neighbors_ok(t)) continue;
      bool complete_ok = true;
      for (std::size_t k : complete_after_[i]) {
        if (!tile_complete_ok(frees_[k])) {
          complete_ok = false;
          break;
        }
      }
      if (!complete_ok) continue;
      dfs(i + 1, cost + (c == 0 ? 0 : (conv_code(c) ? cp_ : ip_)));
    }
    code_.at(t) = 0;
  }

  void finish(long long cost) {
    Blueprint bp(inst_.width, inst_.height);
    for (const GridCoord& t : frees_) {
      const int c = code_.at(t);
      if (conv_code(c)) bp.conveyors.at(t) = c;
      if (ins_code(c)) bp.inserters.at(t) = c - 4;
    }
    bp.assemblers = asms_;
    if (!validate_structure(bp, inst_).empty()) return;
    if (best_ < 0 || cost < best_) best_ = cost;
  }

  const ProblemInstance& inst_;
  long long cp_, ip_;
  Grid<int> src_;
  Grid<int> block_at_{0, 0};
  Grid<int> code_{0, 0};
  std::vector<BlueprintAssembler> asms_;
  bool deliver_ = false;
  std::vector<GridCoord> frees_;
  std::vector<std::vector<int>> allowed_;
  std::vector<std::vector<std::size_t>> complete_after_;
  long long best_ = -1;
};

}  // namespace

LayoutOracleResult brute_force_layout_oracle(const ProblemInstance& inst,
                                             long long conveyor_penalty,
                                             long long inserter_penalty) {
  if (inst.width * inst.height > 12 || inst.num_items > 2)
    throw std::invalid_argument(
        "layout oracle needs w*h <= 12 and at most 2 items");
  LayoutEnumerator e(inst, conveyor_penalty, inserter_penalty);
  e.run({});
  Grid<int> reserved(inst.width, inst.height);
  for (const SourceSpec& s : inst.sources) reserved.at(s.pos) = 1;
  if (reserved.in_bounds(inst.destination)) reserved.at(inst.destination) = 1;
  for (int r = 1; r <= static_cast<int>(inst.recipes.size()); ++r) {
    for (int ay = 1; ay + 2 <= inst.height; ++ay) {
      for (int ax = 1; ax + 2 <= inst.width; ++ax) {
        bool bad = false;
        for (int dy = 0; dy < 3 && !bad; ++dy)
          for (int dx = 0; dx < 3 && !bad; ++dx)
            if (reserved.at(ax + dx, ay + dy) != 0) bad = true;
        if (!bad) e.run({{{ax, ay}, r}});
      }
    }
  }
  LayoutOracleResult res;
  res.feasible = e.best() >= 0;
  res.objective = res.feasible ? e.best() : 0;
  return res;
}

}  // namespace factopt
