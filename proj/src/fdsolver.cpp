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

#include "factopt/fdsolver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <limits>
#include <stdexcept>

namespace factopt::fd {

namespace {

constexpr int kNoValue = std::numeric_limits<int>::min();
constexpr int kMaskableRange = 128;

long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

long long ceil_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) == (b < 0))) ? q + 1 : q;
}

int mask_popcount(const Dom& d) {
  return std::popcount(d.mask[0]) + std::popcount(d.mask[1]);
}

bool mask_bit(const Dom& d, int val) {
  int i = val - d.base;
  return (d.mask[i >> 6] >> (i & 63)) & 1;
}

void mask_clear(Dom& d, int val) {
  int i = val - d.base;
  d.mask[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
}

// Lowest present value >= from, or kNoValue.
int mask_next(const Dom& d, int from) {
  if (from < d.lo) from = d.lo;
  for (int v = from; v <= d.hi; ++v)
    if (mask_bit(d, v)) return v;
  return kNoValue;
}

int mask_prev(const Dom& d, int from) {
  if (from > d.hi) from = d.hi;
  for (int v = from; v >= d.lo; --v)
    if (mask_bit(d, v)) return v;
  return kNoValue;
}

}  // namespace

Model::Model() = default;
Model::~Model() = default;

VarId Model::new_var(int lo, int hi) {
  if (lo > hi)
    throw std::invalid_argument("new_var: empty initial domain");
  Dom d;
  d.lo = lo;
  d.hi = hi;
  d.base = lo;
  d.count = hi - lo + 1;
  if (d.count <= kMaskableRange) {
    d.masked = true;
    for (int v = lo; v <= hi; ++v) {
      int i = v - lo;
      d.mask[i >> 6] |= std::uint64_t(1) << (i & 63);
    }
  }
  doms_.push_back(d);
  watchers_.emplace_back();
  last_saved_.push_back(-2);
  return VarId(doms_.size() - 1);
}

int Model::dom_min(VarId v) const { return doms_[v].lo; }
int Model::dom_max(VarId v) const { return doms_[v].hi; }
int Model::dom_size(VarId v) const { return doms_[v].count; }

bool Model::dom_contains(VarId v, int val) const {
  const Dom& d = doms_[v];
  if (val < d.lo || val > d.hi) return false;
  return d.masked ? mask_bit(d, val) : true;
}

int Model::value(VarId v) const { return doms_[v].lo; }

void Model::save_dom(VarId v) {
  int level = int(level_marks_.size()) - 1;
  if (level < 0) return;  // root changes are permanent
  if (last_saved_[v] == level) return;
  trail_.emplace_back(v, doms_[v]);
  last_saved_[v] = level;
}

void Model::push_level() { level_marks_.push_back(trail_.size()); }

void Model::pop_level() {
  std::size_t mark = level_marks_.back();
  level_marks_.pop_back();
  while (trail_.size() > mark) {
    auto& [v, d] = trail_.back();
    doms_[v] = d;
    last_saved_[v] = -2;
    trail_.pop_back();
  }
}

void Model::enqueue_watchers(VarId v) {
  for (int c : watchers_[v]) {
    if (!in_queue_[c]) {
      in_queue_[c] = 1;
      queue_.push_back(c);
    }
  }
}

bool Model::set_lo(VarId v, int val) {
  Dom& d = doms_[v];
  if (val <= d.lo) return true;
  if (val > d.hi) return false;
  save_dom(v);
  d.lo = val;
  if (d.masked) {
    for (int i = 0; i < val - d.base && i < kMaskableRange; ++i)
      d.mask[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
    int nv = mask_next(d, val);
    if (nv == kNoValue) return false;
    d.lo = nv;
    d.count = mask_popcount(d);
  } else {
    d.count = d.hi - d.lo + 1;
  }
  enqueue_watchers(v);
  return true;
}

bool Model::set_hi(VarId v, int val) {
  Dom& d = doms_[v];
  if (val >= d.hi) return true;
  if (val < d.lo) return false;
  save_dom(v);
  d.hi = val;
  if (d.masked) {
    for (int i = val - d.base + 1; i < kMaskableRange; ++i)
      d.mask[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
    int pv = mask_prev(d, val);
    if (pv == kNoValue) return false;
    d.hi = pv;
    d.count = mask_popcount(d);
  } else {
    d.count = d.hi - d.lo + 1;
  }
  enqueue_watchers(v);
  return true;
}

bool Model::assign_val(VarId v, int val) {
  if (!dom_contains(v, val)) return false;
  Dom& d = doms_[v];
  if (d.count == 1) return true;
  save_dom(v);
  d.lo = d.hi = val;
  d.count = 1;
  if (d.masked) {
    d.mask = {0, 0};
    int i = val - d.base;
    d.mask[i >> 6] |= std::uint64_t(1) << (i & 63);
  }
  enqueue_watchers(v);
  return true;
}

bool Model::remove_val(VarId v, int val) {
  Dom& d = doms_[v];
  if (val < d.lo || val > d.hi) return true;
  if (d.count == 1) return false;  // would empty a singleton
  if (!d.masked) {
    if (val == d.lo) return set_lo(v, val + 1);
    if (val == d.hi) return set_hi(v, val - 1);
    return true;  // deferred interior removal on a wide domain
  }
  if (!mask_bit(d, val)) return true;
  save_dom(v);
  mask_clear(d, val);
  d.count--;
  if (d.count == 0) return false;
  if (val == d.lo) d.lo = mask_next(d, val + 1);
  if (val == d.hi) d.hi = mask_prev(d, val - 1);
  enqueue_watchers(v);
  return true;
}

int Model::next_value(VarId v, int from) const {
  const Dom& d = doms_[v];
  if (from < d.lo) from = d.lo;
  if (from > d.hi) return kNoValue;
  return d.masked ? mask_next(d, from) : from;
}

long long Model::dom_min_sum(const std::vector<Term>& terms) const {
  long long s = 0;
  for (const Term& t : terms)
    s += t.coef * (t.coef > 0 ? dom_min(t.var) : dom_max(t.var));
  return s;
}

long long Model::dom_max_sum(const std::vector<Term>& terms) const {
  long long s = 0;
  for (const Term& t : terms)
    s += t.coef * (t.coef > 0 ? dom_max(t.var) : dom_min(t.var));
  return s;
}

// ---------------------------------------------------------------------------
// Propagators
// ---------------------------------------------------------------------------

namespace {

long long eval_sum(const std::vector<Term>& terms,
                   const std::vector<int>& a) {
  long long s = 0;
  for (const Term& t : terms) s += t.coef * a[t.var];
  return s;
}

class LinearLE : public Constraint {
 public:
  LinearLE(std::vector<Term> terms, long long rhs)
      : terms_(std::move(terms)), rhs_(rhs) {
    for (const Term& t : terms_) vars.push_back(t.var);
  }

  bool propagate(Model& m) override {
    long long min_sum = m.dom_min_sum(terms_);
    if (min_sum > rhs_) return false;
    long long slack = rhs_ - min_sum;
    for (const Term& t : terms_) {
      if (t.coef > 0) {
        long long cap = m.dom_min(t.var) + floor_div(slack, t.coef);
        if (cap < m.dom_max(t.var) && !m.set_hi(t.var, int(cap))) return false;
      } else if (t.coef < 0) {
        long long cap = m.dom_max(t.var) + ceil_div(slack, t.coef);
        if (cap > m.dom_min(t.var) && !m.set_lo(t.var, int(cap))) return false;
      }
    }
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    return eval_sum(terms_, a) <= rhs_;
  }

 private:
  std::vector<Term> terms_;
  long long rhs_;
};

class LinearEQ : public Constraint {
 public:
  LinearEQ(std::vector<Term> terms, long long rhs)
      : terms_(std::move(terms)), rhs_(rhs) {
    for (const Term& t : terms_) vars.push_back(t.var);
  }

  bool propagate(Model& m) override {
    long long min_sum = m.dom_min_sum(terms_);
    long long max_sum = m.dom_max_sum(terms_);
    if (min_sum > rhs_ || max_sum < rhs_) return false;
    long long up_slack = rhs_ - min_sum;    // room above the minimum
    long long down_slack = max_sum - rhs_;  // room below the maximum
    for (const Term& t : terms_) {
      int lo = m.dom_min(t.var), hi = m.dom_max(t.var);
      if (t.coef > 0) {
        long long cap = lo + floor_div(up_slack, t.coef);
        long long floor_v = hi - floor_div(down_slack, t.coef);
        if (cap < hi && !m.set_hi(t.var, int(cap))) return false;
        if (floor_v > lo && !m.set_lo(t.var, int(floor_v))) return false;
      } else if (t.coef < 0) {
        long long floor_v = hi + ceil_div(up_slack, t.coef);
        long long cap = lo - ceil_div(down_slack, t.coef);
        if (floor_v > lo && !m.set_lo(t.var, int(floor_v))) return false;
        if (cap < hi && !m.set_hi(t.var, int(cap))) return false;
      }
    }
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    return eval_sum(terms_, a) == rhs_;
  }

 private:
  std::vector<Term> terms_;
  long long rhs_;
};

class ReifEqConst : public Constraint {
 public:
  ReifEqConst(VarId b, VarId x, int c) : b_(b), x_(x), c_(c) {
    vars = {b, x};
  }

  bool propagate(Model& m) override {
    if (!m.dom_contains(x_, c_)) return m.assign_val(b_, 0);
    if (m.assigned(x_)) return m.assign_val(b_, m.value(x_) == c_ ? 1 : 0);
    if (m.assigned(b_)) {
      if (m.value(b_) == 1) return m.assign_val(x_, c_);
      return m.remove_val(x_, c_);
    }
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    return (a[b_] == 1) == (a[x_] == c_);
  }

 private:
  VarId b_, x_;
  int c_;
};

class ReifGtConst : public Constraint {
 public:
  ReifGtConst(VarId b, VarId x, int c) : b_(b), x_(x), c_(c) {
    vars = {b, x};
  }

  bool propagate(Model& m) override {
    if (m.dom_min(x_) > c_) return m.assign_val(b_, 1);
    if (m.dom_max(x_) <= c_) return m.assign_val(b_, 0);
    if (m.assigned(b_)) {
      if (m.value(b_) == 1) return m.set_lo(x_, c_ + 1);
      return m.set_hi(x_, c_);
    }
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    return (a[b_] == 1) == (a[x_] > c_);
  }

 private:
  VarId b_, x_;
  int c_;
};

class Implication : public Constraint {
 public:
  Implication(VarId p, VarId q) : p_(p), q_(q) { vars = {p, q}; }

  bool propagate(Model& m) override {
    if (m.assigned(p_) && m.value(p_) == 1) return m.assign_val(q_, 1);
    if (m.assigned(q_) && m.value(q_) == 0) return m.assign_val(p_, 0);
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    return a[p_] == 0 || a[q_] == 1;
  }

 private:
  VarId p_, q_;
};

class Element : public Constraint {
 public:
  Element(VarId z, std::vector<int> a, VarId x)
      : z_(z), a_(std::move(a)), x_(x) {
    vars = {z, x};
  }

  bool propagate(Model& m) override {
    // Prune the index to positions whose entry remains possible.
    int n = int(a_.size());
    if (!m.set_lo(x_, 0) || !m.set_hi(x_, n - 1)) return false;
    int zmin = std::numeric_limits<int>::max();
    int zmax = std::numeric_limits<int>::min();
    for (int v = m.dom_min(x_); v != kNoValue && v <= m.dom_max(x_);
         v = next_dom_val(m, x_, v)) {
      if (!m.dom_contains(z_, a_[v])) {
        if (!m.remove_val(x_, v)) return false;
      } else {
        zmin = std::min(zmin, a_[v]);
        zmax = std::max(zmax, a_[v]);
      }
    }
    if (zmin > zmax) return false;
    if (!m.set_lo(z_, zmin) || !m.set_hi(z_, zmax)) return false;
    // Value-level support for z; bounds-only when its domain is wide.
    if (m.dom_size(z_) <= 256) {
      for (int w = m.dom_min(z_); w != kNoValue && w <= m.dom_max(z_);
           w = next_dom_val(m, z_, w)) {
        bool supported = false;
        for (int v = m.dom_min(x_); v != kNoValue && v <= m.dom_max(x_);
             v = next_dom_val(m, x_, v))
          if (a_[v] == w) {
            supported = true;
            break;
          }
        if (!supported && !m.remove_val(z_, w)) return false;
      }
    }
    if (m.assigned(x_)) return m.assign_val(z_, a_[m.value(x_)]);
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    int x = a[x_];
    return x >= 0 && x < int(a_.size()) && a_[x] == a[z_];
  }

 private:
  static int next_dom_val(Model& m, VarId v, int cur) {
    // Advance through possibly-holed domains; sentinel on exhaustion.
    for (int w = cur + 1; w <= m.dom_max(v); ++w)
      if (m.dom_contains(v, w)) return w;
    return kNoValue;
  }

  VarId z_;
  std::vector<int> a_;
  VarId x_;
};

// xs <lex consts (or >lex when flipped).
class LexOrder : public Constraint {
 public:
  LexOrder(std::vector<VarId> xs, std::vector<int> consts, bool less)
      : xs_(std::move(xs)), consts_(std::move(consts)), less_(less) {
    vars = xs_;
  }

  bool propagate(Model& m) override {
    std::size_t i = 0;
    while (i < xs_.size()) {
      VarId x = xs_[i];
      int c = consts_[i];
      if (m.assigned(x)) {
        int v = m.value(x);
        if (less_ ? v < c : v > c) return true;   // decided at this position
        if (less_ ? v > c : v < c) return false;  // prefix already loses
        ++i;
        continue;
      }
      // Prefix equal so far: this position may not exceed (fall below) c.
      if (less_ ? !m.set_hi(x, c) : !m.set_lo(x, c)) return false;
      if (m.assigned(x) && m.value(x) == c) {
        ++i;
        continue;
      }
      return true;
    }
    return false;  // vectors equal, strict order violated
  }

  bool holds(const std::vector<int>& a) const override {
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (a[xs_[i]] != consts_[i])
        return less_ ? a[xs_[i]] < consts_[i] : a[xs_[i]] > consts_[i];
    }
    return false;
  }

 private:
  std::vector<VarId> xs_;
  std::vector<int> consts_;
  bool less_;
};

class VecNeq : public Constraint {
 public:
  VecNeq(std::vector<VarId> xs, std::vector<int> consts)
      : xs_(std::move(xs)), consts_(std::move(consts)) {
    vars = xs_;
  }

  bool propagate(Model& m) override {
    int open = -1;
    int undecided = 0;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!m.dom_contains(xs_[i], consts_[i])) return true;  // differs here
      if (m.assigned(xs_[i])) continue;  // assigned and equal to consts_[i]
      ++undecided;
      open = int(i);
    }
    if (undecided == 0) return false;  // every position matches
    if (undecided == 1) return m.remove_val(xs_[open], consts_[open]);
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    for (std::size_t i = 0; i < xs_.size(); ++i)
      if (a[xs_[i]] != consts_[i]) return true;
    return false;
  }

 private:
  std::vector<VarId> xs_;
  std::vector<int> consts_;
};

class AllDiffExcept0 : public Constraint {
 public:
  explicit AllDiffExcept0(std::vector<VarId> xs) : xs_(std::move(xs)) {
    vars = xs_;
  }

  bool propagate(Model& m) override {
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!m.assigned(xs_[i])) continue;
      int v = m.value(xs_[i]);
      if (v == 0) continue;
      for (std::size_t j = 0; j < xs_.size(); ++j) {
        if (j == i) continue;
        if (m.assigned(xs_[j]) && m.value(xs_[j]) == v) return false;
        if (!m.remove_val(xs_[j], v)) return false;
      }
    }
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    for (std::size_t i = 0; i < xs_.size(); ++i)
      for (std::size_t j = i + 1; j < xs_.size(); ++j)
        if (a[xs_[i]] != 0 && a[xs_[i]] == a[xs_[j]]) return false;
    return true;
  }

 private:
  std::vector<VarId> xs_;
};

class Table : public Constraint {
 public:
  Table(std::vector<VarId> xs, std::vector<std::vector<int>> tuples)
      : xs_(std::move(xs)), tuples_(std::move(tuples)) {
    vars = xs_;
  }

  bool propagate(Model& m) override {
    std::size_t arity = xs_.size();
    bool any = false;
    supported_.assign(arity, {});
    for (const auto& t : tuples_) {
      bool valid = true;
      for (std::size_t i = 0; i < arity; ++i)
        if (!m.dom_contains(xs_[i], t[i])) {
          valid = false;
          break;
        }
      if (!valid) continue;
      any = true;
      for (std::size_t i = 0; i < arity; ++i) supported_[i].push_back(t[i]);
    }
    if (!any) return false;
    for (std::size_t i = 0; i < arity; ++i) {
      for (int v = m.dom_min(xs_[i]); v <= m.dom_max(xs_[i]); ++v) {
        if (!m.dom_contains(xs_[i], v)) continue;
        if (std::find(supported_[i].begin(), supported_[i].end(), v) ==
            supported_[i].end()) {
          if (!m.remove_val(xs_[i], v)) return false;
        }
      }
    }
    return true;
  }

  bool holds(const std::vector<int>& a) const override {
    for (const auto& t : tuples_) {
      bool match = true;
      for (std::size_t i = 0; i < xs_.size(); ++i)
        if (a[xs_[i]] != t[i]) {
          match = false;
          break;
        }
      if (match) return true;
    }
    return false;
  }

 private:
  std::vector<VarId> xs_;
  std::vector<std::vector<int>> tuples_;
  std::vector<std::vector<int>> supported_;  // reused scratch
};

}  // namespace

// ---------------------------------------------------------------------------
// Posting
// ---------------------------------------------------------------------------

void Model::register_constraint(std::unique_ptr<Constraint> c) {
  int id = int(constraints_.size());
  for (VarId v : c->vars) {
    if (v < 0 || v >= num_vars())
      throw std::out_of_range("constraint references unknown variable");
    watchers_[v].push_back(id);
  }
  constraints_.push_back(std::move(c));
  in_queue_.push_back(0);
  if (root_failed_) return;
  in_queue_[id] = 1;
  queue_.push_back(id);
  if (!propagate_fixpoint()) root_failed_ = true;
}

void Model::post_linear_le(std::vector<Term> terms, long long rhs) {
  register_constraint(std::make_unique<LinearLE>(std::move(terms), rhs));
}

void Model::post_linear_eq(std::vector<Term> terms, long long rhs) {
  register_constraint(std::make_unique<LinearEQ>(std::move(terms), rhs));
}

void Model::post_reif_eq_const(VarId b, VarId x, int c) {
  register_constraint(std::make_unique<ReifEqConst>(b, x, c));
}

void Model::post_reif_gt_const(VarId b, VarId x, int c) {
  register_constraint(std::make_unique<ReifGtConst>(b, x, c));
}

void Model::post_implies(VarId antecedent, VarId consequent) {
  register_constraint(std::make_unique<Implication>(antecedent, consequent));
}

void Model::post_element(VarId z, std::vector<int> a, VarId x) {
  if (a.empty()) throw std::invalid_argument("element: empty array");
  register_constraint(std::make_unique<Element>(z, std::move(a), x));
}

void Model::post_lex_less(std::vector<VarId> xs, std::vector<int> consts) {
  if (xs.size() != consts.size())
    throw std::invalid_argument("lex_less: length mismatch");
  register_constraint(
      std::make_unique<LexOrder>(std::move(xs), std::move(consts), true));
}

void Model::post_lex_greater(std::vector<VarId> xs, std::vector<int> consts) {
  if (xs.size() != consts.size())
    throw std::invalid_argument("lex_greater: length mismatch");
  register_constraint(
      std::make_unique<LexOrder>(std::move(xs), std::move(consts), false));
}

void Model::post_vec_neq(std::vector<VarId> xs, std::vector<int> consts) {
  if (xs.size() != consts.size())
    throw std::invalid_argument("vec_neq: length mismatch");
  register_constraint(
      std::make_unique<VecNeq>(std::move(xs), std::move(consts)));
}

void Model::post_alldiff_except_0(std::vector<VarId> xs) {
  register_constraint(std::make_unique<AllDiffExcept0>(std::move(xs)));
}

void Model::post_table(std::vector<VarId> xs,
                       std::vector<std::vector<int>> tuples) {
  for (const auto& t : tuples)
    if (t.size() != xs.size())
      throw std::invalid_argument("table: tuple arity mismatch");
  register_constraint(
      std::make_unique<Table>(std::move(xs), std::move(tuples)));
}

VarId Model::reified_eq_const(VarId x, int c) {
  VarId b = new_bool();
  post_reif_eq_const(b, x, c);
  return b;
}

VarId Model::reified_gt_const(VarId x, int c) {
  VarId b = new_bool();
  post_reif_gt_const(b, x, c);
  return b;
}

void Model::post_implies_le(VarId b, std::vector<Term> terms, long long rhs) {
  long long big_m = dom_max_sum(terms) - rhs;
  if (big_m <= 0) return;  // holds regardless of b
  terms.push_back({big_m, b});
  post_linear_le(std::move(terms), rhs + big_m);
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

bool Model::propagate_fixpoint() {
  if (bound_active_ && objective_var_ >= 0) {
    bool ok = bound_is_lower_
                  ? set_lo(objective_var_, int(bound_value_))
                  : set_hi(objective_var_, int(bound_value_));
    if (!ok) {
      for (int c : queue_) in_queue_[c] = 0;
      queue_.clear();
      return false;
    }
  }
  std::size_t head = 0;
  while (head < queue_.size()) {
    int c = queue_[head++];
    in_queue_[c] = 0;
    if (!constraints_[c]->propagate(*this)) {
      for (std::size_t i = head; i < queue_.size(); ++i)
        in_queue_[queue_[i]] = 0;
      queue_.clear();
      return false;
    }
  }
  queue_.clear();
  return true;
}

Outcome Model::solve(const SearchConfig& config) {
  using Mode = SearchConfig::Mode;
  Outcome out;
  bound_active_ = false;
  objective_var_ = config.objective;
  if ((config.mode == Mode::Maximize || config.mode == Mode::Minimize) &&
      config.objective < 0)
    throw std::invalid_argument("solve: optimization requires an objective");

  if (root_failed_) return out;

  // Root fixpoint over every constraint.
  for (int c = 0; c < int(constraints_.size()); ++c)
    if (!in_queue_[c]) {
      in_queue_[c] = 1;
      queue_.push_back(c);
    }
  if (!propagate_fixpoint()) {
    root_failed_ = true;
    return out;
  }

  int n = num_vars();
  bool found = false, stop = false, limit_hit = false;
  std::vector<int> best;
  long long best_obj = 0;
  auto t0 = std::chrono::steady_clock::now();

  auto over_limits = [&]() {
    if (config.node_limit > 0 && out.nodes >= config.node_limit) return true;
    if (config.time_limit_s > 0 && (out.nodes & 1023) == 0) {
      std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (dt.count() > config.time_limit_s) return true;
    }
    return false;
  };

  std::function<void(int)> descend = [&](int from) {
    int vi = from;
    while (vi < n && assigned(vi)) ++vi;
    if (vi == n) {
      std::vector<int> a(n);
      for (int i = 0; i < n; ++i) a[i] = value(i);
      found = true;
      switch (config.mode) {
        case Mode::First:
          best = std::move(a);
          stop = true;
          break;
        case Mode::Enumerate:
          best = a;
          if (config.on_solution && !config.on_solution(a)) stop = true;
          break;
        case Mode::Maximize:
          best_obj = a[config.objective];
          best = std::move(a);
          bound_active_ = true;
          bound_is_lower_ = true;
          bound_value_ = best_obj + 1;
          break;
        case Mode::Minimize:
          best_obj = a[config.objective];
          best = std::move(a);
          bound_active_ = true;
          bound_is_lower_ = false;
          bound_value_ = best_obj - 1;
          break;
      }
      return;
    }
    for (int v = next_value(vi, dom_min(vi)); v != kNoValue;
         v = next_value(vi, v + 1)) {
      if (stop) return;
      if (over_limits()) {
        limit_hit = true;
        stop = true;
        return;
      }
      ++out.nodes;
      push_level();
      bool ok = assign_val(vi, v) && propagate_fixpoint();
      if (ok) descend(vi + 1);
      pop_level();
      if (stop) return;
    }
  };

  descend(0);
  bound_active_ = false;

  if (limit_hit) {
    out.status = SolveStatus::LimitReached;
    out.has_solution = found;
  } else if (found) {
    out.status = SolveStatus::Sat;
    out.has_solution = true;
  } else {
    out.status = SolveStatus::Unsat;
  }
  if (found) {
    out.assignment = std::move(best);
    if (config.objective >= 0) out.objective = out.assignment[config.objective];
  }
  return out;
}

bool Model::check_assignment(const std::vector<int>& a) const {
  if (int(a.size()) != num_vars()) return false;
  for (const auto& c : constraints_)
    if (!c->holds(a)) return false;
  return true;
}

}  // namespace factopt::fd
