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
#include "doctest.h"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "factopt/fdsolver.hpp"

using namespace factopt::fd;

namespace {

using Assignment = std::vector<int>;

// Collects every solution the solver reports in Enumerate mode.
std::set<Assignment> enumerate_all(Model& m) {
  std::set<Assignment> found;
  SearchConfig cfg;
  cfg.mode = SearchConfig::Mode::Enumerate;
  cfg.on_solution = [&](const Assignment& a) {
    found.insert(a);
    return true;
  };
  m.solve(cfg);
  return found;
}

// Brute-force oracle: walks the full cross product of the root domains and
// keeps assignments accepted by the ground checker. Only usable on models
// whose root domains are small and hole-free at var creation time.
std::set<Assignment> brute_force(Model& m, const std::vector<int>& los,
                                 const std::vector<int>& his) {
  std::set<Assignment> found;
  int n = int(los.size());
  Assignment a(n);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      if (m.check_assignment(a)) found.insert(a);
      return;
    }
    for (int v = los[i]; v <= his[i]; ++v) {
      a[i] = v;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return found;
}

}  // namespace

TEST_CASE("bounds propagation on a two-variable ordering") {
  Model m;
  VarId x = m.new_var(2, 3);
  VarId y = m.new_var(2, 3);
  m.post_linear_le({{1, x}, {-1, y}}, -1);  // x < y
  // Root propagation alone pins both variables.
  CHECK(m.dom_min(x) == 2);
  CHECK(m.dom_max(x) == 2);
  CHECK(m.dom_min(y) == 3);
  CHECK(m.dom_max(y) == 3);
  Outcome out = m.solve({});
  REQUIRE(out.status == SolveStatus::Sat);
  CHECK(out.assignment == Assignment{2, 3});
}

TEST_CASE("linear equality prunes both sides") {
  Model m;
  VarId x = m.new_var(0, 10);
  VarId y = m.new_var(0, 10);
  m.post_linear_eq({{2, x}, {3, y}}, 12);
  CHECK(m.dom_max(x) == 6);
  CHECK(m.dom_max(y) == 4);
  auto sols = enumerate_all(m);
  CHECK(sols == std::set<Assignment>{{0, 4}, {3, 2}, {6, 0}});
}

TEST_CASE("posting a violated ground constraint fails at the root") {
  Model m;
  VarId x = m.new_var(1, 1);
  VarId y = m.new_var(0, 0);
  m.post_lex_less({x, y}, {1, 0});  // [1,0] <lex [1,0] is false
  Outcome out = m.solve({});
  CHECK(out.status == SolveStatus::Unsat);
  CHECK_FALSE(out.has_solution);
}

TEST_CASE("strict lexicographic order against a constant vector") {
  Model m;
  VarId x = m.new_var(0, 2);
  VarId y = m.new_var(0, 2);
  m.post_lex_less({x, y}, {1, 1});
  auto sols = enumerate_all(m);
  // x=0 with any y, or x=1 and y=0.
  CHECK(sols == std::set<Assignment>{{0, 0}, {0, 1}, {0, 2}, {1, 0}});

  Model m2;
  VarId a = m2.new_var(0, 2);
  VarId b = m2.new_var(0, 2);
  m2.post_lex_greater({a, b}, {1, 1});
  auto sols2 = enumerate_all(m2);
  CHECK(sols2 == std::set<Assignment>{{1, 2}, {2, 0}, {2, 1}, {2, 2}});
}

TEST_CASE("element channels an index through a constant array") {
  Model m;
  std::vector<int> table = {3, 1, 4, 1, 5};
  VarId x = m.new_var(0, 4);
  VarId z = m.new_var(0, 3);
  m.post_element(z, table, x);
  CHECK(m.dom_max(z) == 3);  // entries 4 and 5 fall outside z's domain
  auto sols = enumerate_all(m);
  CHECK(sols == std::set<Assignment>{{0, 3}, {1, 1}, {3, 1}});
}

TEST_CASE("table constraint enumerates exactly its allowed tuples") {
  Model m;
  VarId x = m.new_var(1, 3);
  VarId y = m.new_var(1, 3);
  m.post_table({x, y}, {{1, 2}, {2, 3}, {3, 1}});
  auto sols = enumerate_all(m);
  CHECK(sols == std::set<Assignment>{{1, 2}, {2, 3}, {3, 1}});
}

TEST_CASE("alldiff-except-zero permits repeated zeros only") {
  Model m;
  VarId a = m.new_var(0, 2);
  VarId b = m.new_var(0, 2);
  VarId c = m.new_var(0, 2);
  m.post_alldiff_except_0({a, b, c});
  auto sols = enumerate_all(m);
  std::set<Assignment> expect;
  for (int va = 0; va <= 2; ++va)
    for (int vb = 0; vb <= 2; ++vb)
      for (int vc = 0; vc <= 2; ++vc) {
        bool ok = !(va != 0 && va == vb) && !(va != 0 && va == vc) &&
                  !(vb != 0 && vb == vc);
        if (ok) expect.insert({va, vb, vc});
      }
  CHECK(sols == expect);
}

TEST_CASE("reified equality and threshold tests match their definitions") {
  Model m;
  VarId x = m.new_var(0, 3);
  [[maybe_unused]] VarId beq = m.reified_eq_const(x, 2);
  [[maybe_unused]] VarId bgt = m.reified_gt_const(x, 1);
  auto sols = enumerate_all(m);
  std::set<Assignment> expect;
  for (int v = 0; v <= 3; ++v)
    expect.insert({v, v == 2 ? 1 : 0, v > 1 ? 1 : 0});
  CHECK(sols == expect);
}

TEST_CASE("implication over 0/1 variables") {
  Model m;
  VarId p = m.new_bool();
  VarId q = m.new_bool();
  m.post_implies(p, q);
  auto sols = enumerate_all(m);
  CHECK(sols == std::set<Assignment>{{0, 0}, {0, 1}, {1, 1}});
}

TEST_CASE("vector disequality blocks exactly one point") {
  Model m;
  VarId x = m.new_var(0, 1);
  VarId y = m.new_var(0, 1);
  m.post_vec_neq({x, y}, {1, 0});
  auto sols = enumerate_all(m);
  CHECK(sols == std::set<Assignment>{{0, 0}, {0, 1}, {1, 1}});
}

TEST_CASE("guarded linear inequality activates with its guard") {
  Model m;
  VarId b = m.new_bool();
  VarId x = m.new_var(0, 5);
  VarId y = m.new_var(0, 5);
  m.post_implies_le(b, {{1, x}, {1, y}}, 3);
  auto sols = enumerate_all(m);
  std::set<Assignment> expect;
  for (int vb = 0; vb <= 1; ++vb)
    for (int vx = 0; vx <= 5; ++vx)
      for (int vy = 0; vy <= 5; ++vy)
        if (vb == 0 || vx + vy <= 3) expect.insert({vb, vx, vy});
  CHECK(sols == expect);
}

TEST_CASE("interior removals on wide domains converge through bounds") {
  Model m;
  VarId x = m.new_var(0, 200);  // beyond the mask width, bounds-only
  m.post_table({x}, {{5}});
  Outcome out = m.solve({});
  REQUIRE(out.status == SolveStatus::Sat);
  CHECK(out.assignment == Assignment{5});
}

TEST_CASE("empty model is satisfiable") {
  Model m;
  Outcome out = m.solve({});
  CHECK(out.status == SolveStatus::Sat);
  CHECK(out.has_solution);
  CHECK(out.assignment.empty());
}

TEST_CASE("node limit reports a truncated search") {
  Model m;
  for (int i = 0; i < 6; ++i) m.new_var(0, 4);
  SearchConfig cfg;
  cfg.mode = SearchConfig::Mode::Enumerate;
  cfg.node_limit = 3;
  Outcome out = m.solve(cfg);
  CHECK(out.status == SolveStatus::LimitReached);
  CHECK(out.nodes <= 3);
}

TEST_CASE("optimization returns the proven optimum") {
  Model m;
  VarId x = m.new_var(0, 9);
  VarId y = m.new_var(0, 9);
  VarId obj = m.new_var(0, 200);
  m.post_linear_le({{1, x}, {1, y}}, 9);
  m.post_linear_eq({{7, x}, {3, y}, {-1, obj}}, 0);
  SearchConfig cfg;
  cfg.mode = SearchConfig::Mode::Maximize;
  cfg.objective = obj;
  Outcome out = m.solve(cfg);
  REQUIRE(out.status == SolveStatus::Sat);
  CHECK(out.objective == 63);  // x=9, y=0
  CHECK(out.assignment[x] == 9);
  CHECK(out.assignment[y] == 0);
}

// ---------------------------------------------------------------------------
// Randomized cross-checks: solver vs. ground-checker brute force
// ---------------------------------------------------------------------------

namespace {

struct RandomModel {
  Model model;
  std::vector<int> los, his;
};

// Builds a model over `nvars` base variables with a few random catalog
// constraints. The catalog here deliberately excludes helpers that mint
// auxiliary variables so the brute-force oracle can sweep the cross
// product of base domains.
void build_random(RandomModel& rm, std::mt19937& rng, int nvars) {
  std::uniform_int_distribution<int> dom_lo(0, 1);
  std::uniform_int_distribution<int> dom_span(1, 3);
  for (int i = 0; i < nvars; ++i) {
    int lo = dom_lo(rng);
    int hi = lo + dom_span(rng);
    rm.los.push_back(lo);
    rm.his.push_back(hi);
    rm.model.new_var(lo, hi);
  }
  std::uniform_int_distribution<int> n_cons(2, 4);
  std::uniform_int_distribution<int> kind(0, 6);
  std::uniform_int_distribution<int> coef(-2, 2);
  std::uniform_int_distribution<int> var_pick(0, nvars - 1);
  std::uniform_int_distribution<int> small(-1, 4);
  int cons = n_cons(rng);
  for (int k = 0; k < cons; ++k) {
    switch (kind(rng)) {
      case 0: {  // linear <=
        std::vector<Term> t;
        for (int i = 0; i < nvars; ++i) {
          int c = coef(rng);
          if (c != 0) t.push_back({c, i});
        }
        if (t.empty()) t.push_back({1, var_pick(rng)});
        rm.model.post_linear_le(t, small(rng) + 2);
        break;
      }
      case 1: {  // linear ==
        VarId a = var_pick(rng), b = var_pick(rng);
        rm.model.post_linear_eq({{1, a}, {-1, b}}, small(rng) - 1);
        break;
      }
      case 2: {  // element z = arr[x]
        VarId x = var_pick(rng), z = var_pick(rng);
        if (x == z) break;
        std::vector<int> arr;
        for (int i = 0; i < 6; ++i) arr.push_back(small(rng) + 1);
        rm.model.post_element(z, arr, x);
        break;
      }
      case 3: {  // table on two vars
        VarId a = var_pick(rng), b = var_pick(rng);
        if (a == b) break;
        std::vector<std::vector<int>> tuples;
        std::uniform_int_distribution<int> tv(0, 4);
        for (int i = 0; i < 5; ++i) tuples.push_back({tv(rng), tv(rng)});
        rm.model.post_table({a, b}, tuples);
        break;
      }
      case 4: {  // lexicographic vs constants
        std::vector<VarId> xs = {0, var_pick(rng)};
        std::vector<int> cs = {small(rng) + 1, small(rng) + 1};
        if (k % 2)
          rm.model.post_lex_less(xs, cs);
        else
          rm.model.post_lex_greater(xs, cs);
        break;
      }
      case 5: {  // vector disequality
        std::vector<VarId> xs;
        std::vector<int> cs;
        for (int i = 0; i < nvars; i += 2) {
          xs.push_back(i);
          cs.push_back(small(rng) + 1);
        }
        rm.model.post_vec_neq(xs, cs);
        break;
      }
      default: {  // alldiff-except-0 over all vars
        std::vector<VarId> xs(nvars);
        for (int i = 0; i < nvars; ++i) xs[i] = i;
        rm.model.post_alldiff_except_0(xs);
        break;
      }
    }
  }
}

}  // namespace

TEST_CASE("random models: solver solutions equal brute-force solutions") {
  for (unsigned seed = 1; seed <= 60; ++seed) {
    std::mt19937 rng(seed);
    RandomModel rm;
    build_random(rm, rng, 4);
    auto got = enumerate_all(rm.model);
    auto want = brute_force(rm.model, rm.los, rm.his);
    CAPTURE(seed);
    CHECK(got == want);
  }
}

TEST_CASE("random models: branch-and-bound matches brute-force optima") {
  for (unsigned seed = 100; seed <= 140; ++seed) {
    std::mt19937 rng(seed);
    RandomModel rm;
    build_random(rm, rng, 3);
    // Attach an objective var equal to a fixed linear form.
    std::vector<Term> form;
    long long lo_sum = 0, hi_sum = 0;
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int i = 0; i < 3; ++i) {
      int c = coef(rng);
      form.push_back({c, i});
      lo_sum += c * (c > 0 ? rm.los[i] : rm.his[i]);
      hi_sum += c * (c > 0 ? rm.his[i] : rm.los[i]);
    }
    VarId obj = rm.model.new_var(int(lo_sum), int(hi_sum));
    form.push_back({-1, obj});
    rm.model.post_linear_eq(form, 0);

    // Sweep base domains; the objective var's value is implied by the form.
    std::set<Assignment> sat;
    for (int v0 = rm.los[0]; v0 <= rm.his[0]; ++v0)
      for (int v1 = rm.los[1]; v1 <= rm.his[1]; ++v1)
        for (int v2 = rm.los[2]; v2 <= rm.his[2]; ++v2) {
          long long o = 0;
          Assignment a = {v0, v1, v2, 0};
          for (int i = 0; i < 3; ++i) o += form[i].coef * a[i];
          a[3] = int(o);
          if (rm.model.check_assignment(a)) sat.insert(a);
        }

    SearchConfig cfg;
    cfg.objective = obj;
    cfg.mode = SearchConfig::Mode::Maximize;
    Outcome up = rm.model.solve(cfg);
    cfg.mode = SearchConfig::Mode::Minimize;
    Outcome down = rm.model.solve(cfg);

    CAPTURE(seed);
    if (sat.empty()) {
      CHECK(up.status == SolveStatus::Unsat);
      CHECK(down.status == SolveStatus::Unsat);
    } else {
      long long best_hi = std::numeric_limits<long long>::min();
      long long best_lo = std::numeric_limits<long long>::max();
      for (const Assignment& a : sat) {
        best_hi = std::max<long long>(best_hi, a[3]);
        best_lo = std::min<long long>(best_lo, a[3]);
      }
      REQUIRE(up.status == SolveStatus::Sat);
      REQUIRE(down.status == SolveStatus::Sat);
      CHECK(up.objective == best_hi);
      CHECK(down.objective == best_lo);
      CHECK(rm.model.check_assignment(up.assignment));
      CHECK(rm.model.check_assignment(down.assignment));
    }
  }
}

TEST_CASE("identical models search identically") {
  for (unsigned seed = 200; seed <= 210; ++seed) {
    std::mt19937 rng_a(seed), rng_b(seed);
    RandomModel a, b;
    build_random(a, rng_a, 4);
    build_random(b, rng_b, 4);
    SearchConfig cfg;
    cfg.mode = SearchConfig::Mode::Enumerate;
    int count_a = 0, count_b = 0;
    cfg.on_solution = [&](const Assignment&) {
      ++count_a;
      return true;
    };
    Outcome oa = a.model.solve(cfg);
    cfg.on_solution = [&](const Assignment&) {
      ++count_b;
      return true;
    };
    Outcome ob = b.model.solve(cfg);
    CAPTURE(seed);
    CHECK(oa.status == ob.status);
    CHECK(oa.nodes == ob.nodes);
    CHECK(count_a == count_b);
    CHECK(oa.assignment == ob.assignment);
  }
}

TEST_CASE("solutions reported by the solver always pass the ground checker") {
  for (unsigned seed = 300; seed <= 330; ++seed) {
    std::mt19937 rng(seed);
    RandomModel rm;
    build_random(rm, rng, 4);
    SearchConfig cfg;
    cfg.mode = SearchConfig::Mode::Enumerate;
    bool all_ok = true;
    cfg.on_solution = [&](const Assignment& a) {
      all_ok = all_ok && rm.model.check_assignment(a);
      return true;
    };
    rm.model.solve(cfg);
    CAPTURE(seed);
    CHECK(all_ok);
  }
}
