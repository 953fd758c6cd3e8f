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

#ifndef SKETCHSYNTH_ENUMERATE_HPP
#define SKETCHSYNTH_ENUMERATE_HPP

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sketchsynth/constraints.hpp"
#include "sketchsynth/property.hpp"

namespace synth {

enum class Variant { NoGen, Retro, Proph };

inline const char *variant_name(Variant v) {
  switch (v) {
  case Variant::NoGen:
    return "nogen";
  case Variant::Retro:
    return "retro";
  case Variant::Proph:
    return "proph";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(const std::string &s) {
  if (s == "nogen")
    return Variant::NoGen;
  if (s == "retro")
    return Variant::Retro;
  if (s == "proph")
    return Variant::Proph;
  return std::nullopt;
}

// One element of the chained product decomposition: a frozen index range per
// position, some pinned to a single newly arrived concept. Yields tuples in
// row-major order, leftmost position slowest.
class LazyProduct {
public:
  struct Range {
    size_t lo = 0, hi = 0;
  };

  explicit LazyProduct(std::vector<Range> ranges) : ranges_(std::move(ranges)) {
    off_.resize(ranges_.size());
    for (auto &r : ranges_)
      if (r.lo >= r.hi) {
        done_ = true;
        break;
      }
  }

  bool exhausted() const { return done_; }

  bool next(std::vector<size_t> &out) {
    if (done_)
      return false;
    size_t k = ranges_.size();
    if (!started_) {
      started_ = true;
      for (size_t i = 0; i < k; ++i)
        off_[i] = ranges_[i].lo;
      if (k == 0)
        done_ = true;
      out = off_;
      return true;
    }
    if (k == 0)
      return false;
    long long p = (long long)k - 1;
    for (;;) {
      ++off_[p];
      if (off_[p] < ranges_[p].hi)
        break;
      off_[p] = ranges_[p].lo;
      if (--p < 0) {
        done_ = true;
        return false;
      }
    }
    out = off_;
    return true;
  }

  // Backtracking enumeration. `prefix_ok(j)` judges the partial assignment
  // at positions 0..j (reading the cursor); a failed prefix skips every
  // tuple extending it. `revalidate` re-checks the standing prefix first —
  // used after the constraint store changed between queries.
  template <class PrefixOk>
  bool next_checked(const PrefixOk &prefix_ok, bool revalidate, std::vector<size_t> &out,
                    long long &backtracks) {
    if (done_)
      return false;
    size_t k = ranges_.size();
    if (k == 0) {
      if (started_)
        return false;
      started_ = true;
      done_ = true;
      out.clear();
      return true;
    }
    size_t j;
    if (!started_) {
      started_ = true;
      j = 0;
      off_[0] = ranges_[0].lo;
      goto validate;
    }
    if (revalidate) {
      for (size_t p = 0; p < k; ++p) {
        if (!prefix_ok(p)) {
          ++backtracks;
          j = p;
          goto bump;
        }
      }
    }
    j = k - 1;
  bump:
    for (;;) {
      ++off_[j];
      if (off_[j] >= ranges_[j].hi) {
        if (j == 0) {
          done_ = true;
          return false;
        }
        --j;
        continue;
      }
      goto validate;
    }
  validate:
    for (;;) {
      if (!prefix_ok(j)) {
        ++backtracks;
        goto bump;
      }
      if (j == k - 1) {
        out = off_;
        return true;
      }
      ++j;
      off_[j] = ranges_[j].lo;
    }
  }

  const std::vector<size_t> &cursor() const { return off_; }

private:
  std::vector<Range> ranges_;
  std::vector<size_t> off_;
  bool started_ = false;
  bool done_ = false;
};

// (concept index, non-terminals it just became available under)
struct ConceptEvent {
  size_t index;
  std::set<std::string> nts;
};

// Duplicate-free concept enumeration over the grammar. Terminal rules drain
// first, in declaration order; afterwards a FIFO chain of lazy products over
// the application rules produces candidates, caching each new concept with
// the non-terminal(s) that generate it. A tuple whose application is already
// cached only unions the rule's non-terminal into the cached entry; that
// growth is reported as an event so emergent spaces can pick the concept up
// for newly matching holes.
class ConceptSpace {
public:
  struct Entry {
    ExprPtr expr;
    std::string printed;
    long long size = 1;
    std::set<std::string> nts;
  };

  ConceptSpace(const Grammar &g, long long size_bound, Counters *counters)
      : grammar_(g), bound_(size_bound), counters_(counters) {
    for (size_t i = 0; i < g.rules.size(); ++i)
      if (g.rules[i].kind == Rule::Kind::Terminal)
        terminal_rules_.push_back(i);
      else
        app_rules_.push_back(i);
  }
  ConceptSpace(Grammar &&, long long, Counters *) = delete; // holds a reference

  const Entry &entry(size_t i) const { return cache_[i]; }
  size_t cache_size() const { return cache_.size(); }
  const std::vector<size_t> *members(const std::string &nt) const {
    auto it = nt_members_.find(nt);
    return it == nt_members_.end() ? nullptr : &it->second;
  }

  // Produces the next new concept. Growth events observed along the way are
  // appended to `events` in occurrence order; on success the final event is
  // the new concept itself. Returns false when no rule can produce a new
  // in-bound concept (events may still carry growths discovered meanwhile).
  bool next(std::vector<ConceptEvent> &events) {
    while (term_pos_ < terminal_rules_.size()) {
      const Rule &r = grammar_.rules[terminal_rules_[term_pos_++]];
      if (absorb(r.atom, expr_str(r.atom), 1, r.nt, events))
        return true;
    }
    while (!chain_.empty()) {
      ChainItem &item = chain_.front();
      std::vector<size_t> tuple;
      if (!item.prod.next(tuple)) {
        chain_.pop_front();
        continue;
      }
      const Rule &r = grammar_.rules[item.rule];
      long long sz = 1;
      std::vector<ExprPtr> args(tuple.size());
      for (size_t i = 0; i < tuple.size(); ++i) {
        size_t ci = nt_members_.at(r.rhs[i])[tuple[i]];
        sz += cache_[ci].size;
        args[i] = cache_[ci].expr;
      }
      if (sz > bound_)
        continue;
      ExprPtr e = Expr::call(r.fn, std::move(args));
      std::string printed;
      {
        printed.reserve(16);
        printed += "(" + r.fn;
        for (size_t i = 0; i < tuple.size(); ++i) {
          printed += " ";
          printed += cache_[nt_members_.at(r.rhs[i])[tuple[i]]].printed;
        }
        printed += ")";
      }
      if (absorb(e, printed, sz, r.nt, events))
        return true;
    }
    return false;
  }

private:
  struct ChainItem {
    size_t rule;
    LazyProduct prod;
  };

  // Caches a new concept or grows an existing entry's non-terminal set.
  // Returns true when a new concept was cached.
  bool absorb(const ExprPtr &e, const std::string &printed, long long sz, const std::string &nt,
              std::vector<ConceptEvent> &events) {
    auto it = dedup_.find(printed);
    if (it != dedup_.end()) {
      size_t idx = it->second;
      if (cache_[idx].nts.insert(nt).second) {
        append_member(nt, idx);
        spawn_products(idx, {nt});
        events.push_back({idx, {nt}});
      }
      return false;
    }
    size_t idx = cache_.size();
    cache_.push_back({e, printed, sz, {nt}});
    dedup_[printed] = idx;
    if (counters_)
      ++counters_->concepts_cached;
    append_member(nt, idx);
    spawn_products(idx, {nt});
    events.push_back({idx, {nt}});
    return true;
  }

  void append_member(const std::string &nt, size_t idx) { nt_members_[nt].push_back(idx); }

  // Extends the chain for a concept newly available under `delta` — one
  // product per application rule and argument position the concept now
  // fits. Positions left of the pin draw only concepts cached before this
  // event; positions to the right also draw the new one.
  void spawn_products(size_t idx, const std::set<std::string> &delta) {
    for (size_t ri : app_rules_) {
      const Rule &r = grammar_.rules[ri];
      for (size_t j = r.rhs.size(); j-- > 0;) {
        if (!delta.count(r.rhs[j]))
          continue;
        std::vector<LazyProduct::Range> ranges(r.rhs.size());
        bool viable = true;
        for (size_t p = 0; p < r.rhs.size(); ++p) {
          auto mit = nt_members_.find(r.rhs[p]);
          size_t len = mit == nt_members_.end() ? 0 : mit->second.size();
          if (p == j) {
            ranges[p] = {len - 1, len}; // the just-appended entry
          } else if (p < j) {
            ranges[p] = {0, len - (delta.count(r.rhs[p]) ? 1 : 0)};
          } else {
            ranges[p] = {0, len};
          }
          if (ranges[p].lo >= ranges[p].hi)
            viable = false;
        }
        if (viable)
          chain_.push_back({ri, LazyProduct(std::move(ranges))});
      }
    }
  }

  const Grammar &grammar_;
  long long bound_;
  Counters *counters_;
  std::vector<size_t> terminal_rules_, app_rules_;
  size_t term_pos_ = 0;
  std::vector<Entry> cache_;
  std::unordered_map<std::string, size_t> dedup_;
  std::map<std::string, std::vector<size_t>> nt_members_;
  std::deque<ChainItem> chain_;
};

// Emergent enumeration for one sketch-body selection: per-hole concept
// lists feeding a FIFO chain of lazy products, with the pruning behaviour
// chosen by the variant. Holes of every function are concatenated in
// declaration order; the scope is the body index per function.
class EmergentSpace {
public:
  struct FnSlice {
    std::string fn;
    size_t body_index;
    size_t hole_begin, hole_end; // positions into holes_
  };

  EmergentSpace(std::vector<size_t> scope, std::vector<Hole> holes, std::vector<FnSlice> slices,
                const ConceptSpace *concepts, Counters *counters)
      : scope_(std::move(scope)), holes_(std::move(holes)), slices_(std::move(slices)),
        concepts_(concepts), counters_(counters) {
    lists_.resize(holes_.size());
    members_.resize(holes_.size());
    if (holes_.empty())
      chain_.emplace_back(std::vector<LazyProduct::Range>{});
  }

  const std::vector<size_t> &scope() const { return scope_; }
  const std::vector<Hole> &holes() const { return holes_; }
  const std::vector<FnSlice> &slices() const { return slices_; }

  std::vector<int> hole_order() const {
    std::vector<int> order;
    for (auto &h : holes_)
      order.push_back(h.id);
    return order;
  }

  // Registers a concept for every hole it now fits, then extends the chain
  // with products pinning each such hole to it (left of the pin: lists as
  // they were before this event; right: including it).
  void add_concept(const ConceptEvent &ev) {
    std::vector<size_t> affected;
    std::vector<size_t> before(lists_.size());
    for (size_t j = 0; j < holes_.size(); ++j)
      before[j] = lists_[j].size();
    for (size_t j = 0; j < holes_.size(); ++j) {
      if (members_[j].count(ev.index))
        continue;
      bool fits = false;
      for (auto &n : holes_[j].nts)
        if (ev.nts.count(n)) {
          fits = true;
          break;
        }
      if (!fits)
        continue;
      lists_[j].push_back(ev.index);
      members_[j].insert(ev.index);
      affected.push_back(j);
    }
    for (size_t a = affected.size(); a-- > 0;) {
      size_t j = affected[a];
      std::vector<LazyProduct::Range> ranges(holes_.size());
      bool viable = true;
      for (size_t p = 0; p < holes_.size(); ++p) {
        if (p == j)
          ranges[p] = {lists_[p].size() - 1, lists_[p].size()};
        else if (p < j)
          ranges[p] = {0, before[p]};
        else
          ranges[p] = {0, lists_[p].size()};
        if (ranges[p].lo >= ranges[p].hi)
          viable = false;
      }
      if (viable)
        chain_.emplace_back(std::move(ranges));
    }
  }

  // Next emergent under the variant's pruning rule, or nullopt when the
  // chain is drained under the current concepts.
  std::optional<Emergent> next(Variant variant, const ConstraintStore *store) {
    if (variant != Variant::NoGen && store && store->dead(scope_))
      return std::nullopt;
    while (!chain_.empty()) {
      LazyProduct &prod = chain_.front();
      std::vector<size_t> tuple;
      if (variant == Variant::Proph && store) {
        bool revalidate = store->version() != seen_version_;
        seen_version_ = store->version();
        auto prefix_ok = [&](size_t j) {
          auto assigned = [&](int hole) -> const std::string * {
            auto pit = pos_.find(hole);
            if (pit == pos_.end() || pit->second > j)
              return nullptr;
            size_t ci = lists_[pit->second][prod.cursor()[pit->second]];
            return &concepts_->entry(ci).printed;
          };
          return store->check_bucket(scope_, j, assigned) == nullptr;
        };
        if (pos_.empty())
          for (size_t j = 0; j < holes_.size(); ++j)
            pos_[holes_[j].id] = j;
        long long backtracks = 0;
        bool got = prod.next_checked(prefix_ok, revalidate, tuple, backtracks);
        if (counters_)
          counters_->partial_check_backtracks += backtracks;
        if (!got) {
          chain_.pop_front();
          continue;
        }
        if (counters_)
          ++counters_->tuples_materialized;
        return materialize(tuple);
      }
      if (!prod.next(tuple)) {
        chain_.pop_front();
        continue;
      }
      if (counters_)
        ++counters_->tuples_materialized;
      Emergent em = materialize(tuple);
      if (variant == Variant::Retro && store) {
        if (store->check_full(scope_, em)) {
          if (counters_)
            ++counters_->full_check_rejections;
          continue;
        }
      }
      return em;
    }
    return std::nullopt;
  }

private:
  Emergent materialize(const std::vector<size_t> &tuple) const {
    Emergent em;
    em.reserve(holes_.size());
    for (size_t j = 0; j < holes_.size(); ++j)
      em.emplace_back(holes_[j].id, concepts_->entry(lists_[j][tuple[j]]).expr);
    return em;
  }

  std::vector<size_t> scope_;
  std::vector<Hole> holes_;
  std::vector<FnSlice> slices_;
  const ConceptSpace *concepts_;
  Counters *counters_;
  std::vector<std::vector<size_t>> lists_;   // per hole: concept cache indices
  std::vector<std::set<size_t>> members_;
  std::map<int, size_t> pos_;
  std::deque<LazyProduct> chain_;
  std::uint64_t seen_version_ = ~0ull;
};

// The candidate space: one emergent space per element of the sketch-body
// product across functions, sharing one concept space. Each query rounds
// over the emergent spaces in order; when all are exhausted under the
// current concepts, one new concept is pulled and broadcast.
class CandidateSpace {
public:
  CandidateSpace(const SynthesisInstance &inst, Variant variant, ConstraintStore *store,
                 Counters *counters)
      : inst_(inst), variant_(variant), store_(store), counters_(counters),
        concepts_(inst.grammar, inst.size_bound, counters) {
    std::vector<size_t> combo(inst.functions.size(), 0);
    build_spaces(combo, 0);
  }
  CandidateSpace(SynthesisInstance &&, Variant, ConstraintStore *, Counters *) = delete;

  const ConceptSpace &concepts() const { return concepts_; }
  size_t space_count() const { return spaces_.size(); }

  std::optional<Candidate> next() {
    for (;;) {
      for (auto &es : spaces_) {
        if (auto em = es.next(variant_, store_))
          return materialize(es, *em);
      }
      std::vector<ConceptEvent> events;
      bool got = concepts_.next(events);
      for (auto &ev : events)
        for (auto &es : spaces_)
          es.add_concept(ev);
      if (!got && events.empty())
        return std::nullopt;
    }
  }

private:
  void build_spaces(std::vector<size_t> &combo, size_t fi) {
    if (fi == inst_.functions.size()) {
      std::vector<Hole> holes;
      std::vector<EmergentSpace::FnSlice> slices;
      for (size_t k = 0; k < inst_.functions.size(); ++k) {
        const SketchBody &body = inst_.functions[k].sketch.bodies[combo[k]];
        size_t begin = holes.size();
        holes.insert(holes.end(), body.holes.begin(), body.holes.end());
        slices.push_back({inst_.functions[k].name, combo[k], begin, holes.size()});
      }
      spaces_.emplace_back(combo, std::move(holes), std::move(slices), &concepts_, counters_);
      if (store_)
        store_->register_scope(combo, spaces_.back().hole_order());
      return;
    }
    for (size_t b = 0; b < inst_.functions[fi].sketch.bodies.size(); ++b) {
      combo[fi] = b;
      build_spaces(combo, fi + 1);
    }
  }

  Candidate materialize(const EmergentSpace &es, const Emergent &em) {
    Candidate cand;
    cand.scope = es.scope();
    for (auto &slice : es.slices()) {
      const SynthFun &f = *inst_.find_fn(slice.fn);
      CandidateFn cf;
      cf.fn = slice.fn;
      cf.body_index = slice.body_index;
      cf.emergent.assign(em.begin() + slice.hole_begin, em.begin() + slice.hole_end);
      Diags diags;
      auto def = complete(f.sketch.bodies[slice.body_index], cf.emergent, f.params, f.ret,
                          f.measure, diags);
      assert(def && "enumerated emergent failed to complete");
      cf.def = std::move(*def);
      cand.fns.push_back(std::move(cf));
    }
    return cand;
  }

  const SynthesisInstance &inst_;
  Variant variant_;
  ConstraintStore *store_;
  Counters *counters_;
  ConceptSpace concepts_;
  std::vector<EmergentSpace> spaces_;
};

} // namespace synth

#endif // SKETCHSYNTH_ENUMERATE_HPP
