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

#ifndef FACTOPT_FDSOLVER_HPP
#define FACTOPT_FDSOLVER_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace factopt::fd {

using VarId = int;

struct Term {
  long long coef;
  VarId var;
};

// Integer domain: a contiguous interval plus, for ranges of up to 128
// values, a value mask so interior removals stick. Wider domains fall back
// to bounds-only reasoning; interior removal requests on them are deferred,
// which every propagator tolerates by re-checking once its vars are
// assigned.
struct Dom {
  int lo = 0;
  int hi = 0;
  int base = 0;
  int count = 0;
  bool masked = false;
  std::array<std::uint64_t, 2> mask{0, 0};
};

enum class SolveStatus { Sat, Unsat, LimitReached };

struct Outcome {
  SolveStatus status = SolveStatus::Unsat;
  bool has_solution = false;       // true for Sat, or LimitReached with an
                                   // incumbent found before the cutoff
  std::vector<int> assignment;     // indexed by VarId
  long long objective = 0;         // meaningful when an objective was set
  long long nodes = 0;             // branch attempts, deterministic per model
};

struct SearchConfig {
  enum class Mode { First, Maximize, Minimize, Enumerate };
  Mode mode = Mode::First;
  VarId objective = -1;            // required for Maximize/Minimize
  long long node_limit = 0;        // 0 = unlimited
  double time_limit_s = 0.0;       // 0 = unlimited; avoid where run-to-run
                                   // reproducibility of outcomes matters
  // Enumerate mode: return false to stop the search.
  std::function<bool(const std::vector<int>&)> on_solution;
};

class Model;

// Base class for propagators. propagate() prunes domains and reports
// failure; holds() evaluates the constraint on a full assignment with no
// solver machinery, which doubles as the ground checker used in tests.
class Constraint {
 public:
  virtual ~Constraint() = default;
  virtual bool propagate(Model& m) = 0;
  virtual bool holds(const std::vector<int>& a) const = 0;
  std::vector<VarId> vars;  // watched variables
};

// A constraint store plus chronological-backtracking search.
//
// Search is deterministic: variables are branched in registration order,
// values in ascending order, and optimization is branch-and-bound where
// every improving solution posts a strictly better objective bound. Two
// solves of an identical model yield identical outcomes and node counts.
class Model {
 public:
  Model();
  ~Model();
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  VarId new_var(int lo, int hi);  // throws std::invalid_argument if lo > hi
  VarId new_bool() { return new_var(0, 1); }
  int num_vars() const { return int(doms_.size()); }

  // Domain introspection (current, post-propagation at the root).
  int dom_min(VarId v) const;
  int dom_max(VarId v) const;
  int dom_size(VarId v) const;
  bool dom_contains(VarId v, int val) const;
  bool assigned(VarId v) const { return dom_size(v) == 1; }

  // Constraint posting. Each post propagates immediately; posting an
  // already-violated ground constraint marks the model unsatisfiable.
  void post_linear_le(std::vector<Term> terms, long long rhs);
  void post_linear_eq(std::vector<Term> terms, long long rhs);
  // b <-> (x == c)
  void post_reif_eq_const(VarId b, VarId x, int c);
  // b <-> (x > c)
  void post_reif_gt_const(VarId b, VarId x, int c);
  // antecedent -> consequent over 0/1 vars
  void post_implies(VarId antecedent, VarId consequent);
  // z = a[x], x indexes a 0-based constant array
  void post_element(VarId z, std::vector<int> a, VarId x);
  void post_lex_less(std::vector<VarId> xs, std::vector<int> consts);
  void post_lex_greater(std::vector<VarId> xs, std::vector<int> consts);
  // xs != consts in at least one position (the lex-less-or-greater pair)
  void post_vec_neq(std::vector<VarId> xs, std::vector<int> consts);
  void post_alldiff_except_0(std::vector<VarId> xs);
  // Allowed combinations; arity of every tuple must match xs
  void post_table(std::vector<VarId> xs,
                  std::vector<std::vector<int>> tuples);

  // Convenience: fresh 0/1 var b with b <-> (x == c) / b <-> (x > c).
  VarId reified_eq_const(VarId x, int c);
  VarId reified_gt_const(VarId x, int c);
  // b -> (sum terms <= rhs), linearized with an automatically derived big-M.
  void post_implies_le(VarId b, std::vector<Term> terms, long long rhs);

  Outcome solve(const SearchConfig& config);

  // Ground check of every posted constraint against a full assignment.
  bool check_assignment(const std::vector<int>& a) const;
  const std::vector<std::unique_ptr<Constraint>>& constraints() const {
    return constraints_;
  }

  // --- used by propagators ---
  bool set_lo(VarId v, int val);
  bool set_hi(VarId v, int val);
  bool assign_val(VarId v, int val);
  bool remove_val(VarId v, int val);  // may defer on unmasked interior values
  int value(VarId v) const;           // requires assigned(v)
  long long dom_min_sum(const std::vector<Term>& terms) const;
  long long dom_max_sum(const std::vector<Term>& terms) const;

 private:
  friend class Search;
  void register_constraint(std::unique_ptr<Constraint> c);
  void enqueue_watchers(VarId v);
  bool propagate_fixpoint();
  void push_level();
  void pop_level();
  void save_dom(VarId v);
  int next_value(VarId v, int from) const;  // smallest domain value >= from

  std::vector<Dom> doms_;
  std::vector<std::vector<int>> watchers_;
  std::vector<std::unique_ptr<Constraint>> constraints_;
  std::vector<int> queue_;
  std::vector<char> in_queue_;
  std::vector<std::pair<VarId, Dom>> trail_;
  std::vector<std::size_t> level_marks_;
  std::vector<int> last_saved_;
  bool root_failed_ = false;

  // Branch-and-bound state, applied at the top of every fixpoint.
  bool bound_active_ = false;
  bool bound_is_lower_ = false;  // maximize: objective >= bound
  long long bound_value_ = 0;
  VarId objective_var_ = -1;
};

}  // namespace factopt::fd

#endif  // FACTOPT_FDSOLVER_HPP
