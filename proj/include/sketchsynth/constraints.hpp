// Copyright 2026 The sketchsynth Authors. All rights reserved.
//
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

#ifndef SKETCHSYNTH_CONSTRAINTS_HPP
#define SKETCHSYNTH_CONSTRAINTS_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sketchsynth/cgen.hpp"
#include "sketchsynth/sketch.hpp"

namespace synth {

struct Counters {
  long long candidates = 0;
  long long concepts_cached = 0;
  long long tuples_materialized = 0;
  long long clauses_learned = 0;
  long long full_check_rejections = 0;
  long long partial_check_backtracks = 0;
};

// "At least one listed hole must be filled differently." Scoped to the
// sketch-body selection it was learned under; clauses never transfer
// between scopes. An empty literal set means every completion of the scope
// fails the originating counterexample.
struct Clause {
  struct Lit {
    int hole;
    ExprPtr concept_expr;
    std::string printed;
  };
  std::vector<size_t> scope;
  std::vector<Lit> literals; // sorted by hole id

  std::string key() const {
    std::string k;
    for (auto &l : literals)
      k += std::to_string(l.hole) + "=" + l.printed + ";";
    return k;
  }
  std::string str() const {
    if (literals.empty())
      return "{unsat}";
    std::string s = "{";
    for (size_t i = 0; i < literals.size(); ++i) {
      if (i)
        s += " or ";
      s += "?" + std::to_string(literals[i].hole) + " != " + literals[i].printed;
    }
    return s + "}";
  }
};

// Builds the blocking clause for a counterexample found on `cand`:
// contract/measure violations constrain the involved holes (violating call
// plus guarding if-conditions); property, test, and budget violations
// constrain every hole in the merged trace.
inline std::vector<Clause> generalize(const Counterexample &cex, const Candidate &cand) {
  std::map<int, ExprPtr> filled;
  for (auto &[h, e] : cand.merged_emergent())
    filled[h] = e;
  Clause c;
  c.scope = cand.scope;
  for (int h : cex.holes) {
    auto it = filled.find(h);
    assert(it != filled.end() && "violation hole outside the candidate's emergent");
    c.literals.push_back({h, it->second, expr_str(it->second)});
  }
  return {c};
}

// Per-scope clause sets with duplicate elimination and subsumption. For
// prefix checks, clauses are bucketed by the position (in the scope's hole
// order) of their last hole, so each clause is tested exactly once — at the
// first prefix that covers it.
class ConstraintStore {
public:
  void register_scope(const std::vector<size_t> &scope, const std::vector<int> &hole_order) {
    ScopeData &sd = scopes_[scope];
    sd.hole_order = hole_order;
    for (size_t i = 0; i < hole_order.size(); ++i)
      sd.hole_pos[hole_order[i]] = i;
    sd.buckets.assign(hole_order.size() + 1, {});
  }

  bool dead(const std::vector<size_t> &scope) const {
    auto it = scopes_.find(scope);
    return it != scopes_.end() && it->second.dead;
  }

  std::uint64_t version() const { return version_; }
  long long size() const { return live_; }

  // Inserts with dedup and subsumption; returns true when the store changed.
  // The empty clause marks the scope dead.
  bool insert(const Clause &c) {
    ScopeData &sd = scopes_[c.scope];
    if (sd.dead)
      return false;
    if (c.literals.empty()) {
      sd.dead = true;
      ++version_;
      return true;
    }
    std::string key = c.key();
    if (sd.keys.count(key))
      return false;
    std::set<std::string> lits;
    for (auto &l : c.literals)
      lits.insert(std::to_string(l.hole) + "=" + l.printed);
    for (size_t i = 0; i < sd.clauses.size(); ++i) {
      if (sd.erased[i])
        continue;
      // an existing clause with a literal subset is at least as strong
      if (subset(sd.lit_sets[i], lits))
        return false;
    }
    for (size_t i = 0; i < sd.clauses.size(); ++i) {
      if (!sd.erased[i] && subset(lits, sd.lit_sets[i])) {
        sd.erased[i] = true;
        --live_;
      }
    }
    size_t pos = 0;
    for (auto &l : c.literals) {
      auto it = sd.hole_pos.find(l.hole);
      assert(it != sd.hole_pos.end() && "clause hole outside its scope");
      pos = std::max(pos, it->second);
    }
    sd.clauses.push_back(c);
    sd.erased.push_back(false);
    sd.lit_sets.push_back(std::move(lits));
    sd.keys.insert(key);
    sd.buckets[pos].push_back(sd.clauses.size() - 1);
    ++live_;
    ++version_;
    return true;
  }

  // Complete-emergent check: the first violated clause, or nullptr.
  const Clause *check_full(const std::vector<size_t> &scope, const Emergent &em) const {
    auto it = scopes_.find(scope);
    if (it == scopes_.end())
      return nullptr;
    const ScopeData &sd = it->second;
    if (sd.dead)
      return &kEmpty;
    std::map<int, std::string> assigned;
    for (auto &[h, e] : em)
      assigned[h] = expr_str(e);
    auto get = [&](int h) -> const std::string * {
      auto a = assigned.find(h);
      return a == assigned.end() ? nullptr : &a->second;
    };
    for (size_t i = 0; i < sd.clauses.size(); ++i)
      if (!sd.erased[i] && matches(sd.clauses[i], get))
        return &sd.clauses[i];
    return nullptr;
  }

  // Checks only the clauses whose last hole sits at position `pos` of the
  // scope's hole order. `assigned` maps a hole id to its concept's printed
  // form (null = unassigned).
  template <class Assigned>
  const Clause *check_bucket(const std::vector<size_t> &scope, size_t pos,
                             const Assigned &assigned) const {
    auto it = scopes_.find(scope);
    if (it == scopes_.end())
      return nullptr;
    const ScopeData &sd = it->second;
    if (sd.dead)
      return &kEmpty;
    if (pos >= sd.buckets.size())
      return nullptr;
    for (size_t ci : sd.buckets[pos])
      if (!sd.erased[ci] && matches(sd.clauses[ci], assigned))
        return &sd.clauses[ci];
    return nullptr;
  }

  // Partial-prefix check: fails iff some clause is fully contained in the
  // assigned prefix and all its literals match. Clauses touching unassigned
  // holes are not judged.
  template <class Assigned>
  const Clause *check_partial(const std::vector<size_t> &scope, size_t prefix_len,
                              const Assigned &assigned) const {
    for (size_t pos = 0; pos < prefix_len; ++pos)
      if (const Clause *c = check_bucket(scope, pos, assigned))
        return c;
    return nullptr;
  }

  const std::vector<int> *hole_order(const std::vector<size_t> &scope) const {
    auto it = scopes_.find(scope);
    return it == scopes_.end() ? nullptr : &it->second.hole_order;
  }

private:
  template <class Assigned>
  static bool matches(const Clause &c, const Assigned &assigned) {
    for (auto &l : c.literals) {
      const std::string *got = assigned(l.hole);
      if (!got || *got != l.printed)
        return false;
    }
    return true;
  }

  static bool subset(const std::set<std::string> &a, const std::set<std::string> &b) {
    if (a.size() > b.size())
      return false;
    for (auto &x : a)
      if (!b.count(x))
        return false;
    return true;
  }

  struct ScopeData {
    std::vector<int> hole_order;
    std::map<int, size_t> hole_pos;
    std::vector<Clause> clauses;
    std::vector<std::set<std::string>> lit_sets;
    std::vector<bool> erased;
    std::set<std::string> keys;
    std::vector<std::vector<size_t>> buckets;
    bool dead = false;
  };

  inline static const Clause kEmpty{};
  std::map<std::vector<size_t>, ScopeData> scopes_;
  std::uint64_t version_ = 0;
  long long live_ = 0;
};

// Inserts learned clauses into the store.
inline void prune(ConstraintStore &store, const std::vector<Clause> &clauses,
                  Counters *counters = nullptr) {
  for (auto &c : clauses)
    if (store.insert(c) && counters)
      ++counters->clauses_learned;
}

} // namespace synth

#endif // SKETCHSYNTH_CONSTRAINTS_HPP
