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

#ifndef SKETCHSYNTH_TESTS_HELPERS_HPP
#define SKETCHSYNTH_TESTS_HELPERS_HPP

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sketchsynth/bench.hpp"

namespace testutil {

using namespace synth;

// Parses a single expression (no holes).
inline ExprPtr E(const std::string &text) {
  std::vector<Sexpr> items;
  Diags diags;
  SexprReader r(text);
  EXPECT_TRUE(r.read_all(items, diags)) << text;
  EXPECT_EQ(items.size(), 1u) << text;
  benchdetail::Parser p(diags);
  ExprPtr e = p.parse_expr(items[0], false);
  EXPECT_TRUE(e) << text;
  for (auto &d : diags)
    ADD_FAILURE() << d.str();
  return e;
}

inline BenchmarkFile parse_ok(const std::string &text) {
  Diags diags;
  auto bf = parse_benchmark(text, diags);
  EXPECT_TRUE(bf.has_value());
  for (auto &d : diags)
    ADD_FAILURE() << d.str();
  return bf ? *bf : BenchmarkFile{};
}

inline BenchmarkFile load_bench_file(const std::string &name) {
  std::ifstream in(std::string(SKETCHSYNTH_BENCH_DIR) + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ok(ss.str());
}

// The running insert example: sketch, grammar, membership properties and
// the unit test.
inline const char *kInsertBench = R"((name insert)
(size-bound 3)
(grammar
  (I :int x (head L))
  (L :int-list nil xs (cons I L) (tail L))
  (B :bool (endp L)))
(synth-fun insert ((x :int) (xs :int-list)) :int-list
  :measure (len xs)
  :sketch ((if ?h1 ?h2 (cons ?h3 (insert ?h4 ?h5))))
  :holes ((?h1 B) (?h2 L) (?h3 I) (?h4 I) (?h5 L)))
(property (forall ((x :int) (y :int) (xs :int-list))
  (=> (member y xs) (member y (insert x xs)))))
(property (forall ((x :int) (xs :int-list)) (member x (insert x xs))))
(test (= (insert 3 (list 1 2)) (list 1 2 3)))
)";

inline int hole_id(const SynthesisInstance &inst, const std::string &name) {
  for (auto &f : inst.functions)
    for (auto &b : f.sketch.bodies)
      for (auto &h : b.holes)
        if (h.name == name)
          return h.id;
  for (auto &p : inst.properties)
    for (auto &q : p.prefix)
      if (q.sketch)
        for (auto &b : q.sketch->bodies)
          for (auto &h : b.holes)
            if (h.name == name)
              return h.id;
  ADD_FAILURE() << "no hole " << name;
  return -1;
}

// Builds a candidate for the given sketch-body selection from concept
// strings listed in concatenated hole order.
inline Candidate make_candidate(const SynthesisInstance &inst, std::vector<size_t> scope,
                                const std::vector<std::string> &concepts) {
  Candidate cand;
  cand.scope = scope;
  size_t k = 0;
  for (size_t fi = 0; fi < inst.functions.size(); ++fi) {
    const SynthFun &f = inst.functions[fi];
    const SketchBody &body = f.sketch.bodies[scope[fi]];
    CandidateFn cf;
    cf.fn = f.name;
    cf.body_index = scope[fi];
    for (auto &h : body.holes) {
      EXPECT_LT(k, concepts.size());
      cf.emergent.emplace_back(h.id, E(concepts[k++]));
    }
    Diags diags;
    auto def = complete(body, cf.emergent, f.params, f.ret, f.measure, diags);
    EXPECT_TRUE(def.has_value());
    for (auto &d : diags)
      ADD_FAILURE() << d.str();
    if (def)
      cf.def = *def;
    cand.fns.push_back(std::move(cf));
  }
  EXPECT_EQ(k, concepts.size());
  return cand;
}

inline Candidate make_insert_candidate(const SynthesisInstance &inst, const std::string &h1,
                                       const std::string &h2, const std::string &h3,
                                       const std::string &h4, const std::string &h5) {
  return make_candidate(inst, {0}, {h1, h2, h3, h4, h5});
}

inline std::set<int> holes(std::initializer_list<int> ids) { return std::set<int>(ids); }

// ---------------------------------------------------------------------------
// Independent derivation oracle: all expressions of size <= bound derivable
// from a non-terminal, by direct recursion over the rules.
// ---------------------------------------------------------------------------

struct Derivation {
  std::string printed;
  long long size;
};

inline std::vector<Derivation> derive_all(const Grammar &g, const std::string &nt,
                                          long long bound) {
  std::vector<Derivation> out;
  std::set<std::string> seen;
  if (bound < 1)
    return out;
  for (const Rule &r : g.rules) {
    if (r.nt != nt)
      continue;
    if (r.kind == Rule::Kind::Terminal) {
      std::string s = expr_str(r.atom);
      if (seen.insert(s).second)
        out.push_back({s, 1});
      continue;
    }
    size_t arity = r.rhs.size();
    std::vector<Derivation> parts(arity);
    std::function<void(size_t, long long)> rec = [&](size_t pos, long long budget) {
      if (pos == arity) {
        std::string s = "(" + r.fn;
        long long sz = 1;
        for (auto &p : parts) {
          s += " " + p.printed;
          sz += p.size;
        }
        s += ")";
        if (seen.insert(s).second)
          out.push_back({s, sz});
        return;
      }
      long long reserve = (long long)(arity - pos - 1); // at least 1 per later argument
      for (auto &d : derive_all(g, r.rhs[pos], budget - reserve)) {
        parts[pos] = d;
        rec(pos + 1, budget - d.size);
      }
    };
    rec(0, bound - 1);
  }
  return out;
}

inline std::set<std::string> derive_set(const Grammar &g, const std::string &nt,
                                        long long bound) {
  std::set<std::string> out;
  for (auto &d : derive_all(g, nt, bound))
    out.insert(d.printed);
  return out;
}

// Brute-force semantic check of a universal-only instance against concrete
// definitions: every test and every property over every assignment in the
// given domain. Domains whose full product exceeds `cap` shrink their list
// alphabet, then list length, deterministically.
inline bool oracle_check(const SynthesisInstance &inst, const Defs &defs, long long int_bound,
                         long long list_len, std::string *why = nullptr,
                         long long cap = 2000000) {
  auto fail = [&](const std::string &m) {
    if (why)
      *why = m;
    return false;
  };
  for (size_t i = 0; i < inst.tests.size(); ++i) {
    EvalOutcome o = eval_matrix(inst.tests[i].expr, {}, defs, inst.theory);
    if (!o.ok() || !o.value.b)
      return fail("test " + std::to_string(i + 1) + " fails");
  }
  for (size_t pi = 0; pi < inst.properties.size(); ++pi) {
    const Property &p = inst.properties[pi];
    CgenConfig dom;
    dom.int_bound = int_bound;
    dom.list_len = list_len;
    auto domain_size = [&]() {
      double total = 1;
      for (auto &q : p.prefix)
        total *= (double)exhaustive_values(q.type, dom).size();
      return total;
    };
    while (domain_size() > (double)cap && dom.int_bound > 1)
      --dom.int_bound;
    while (domain_size() > (double)cap && dom.list_len > 2)
      --dom.list_len;
    std::vector<std::vector<Value>> pools;
    for (auto &q : p.prefix)
      pools.push_back(exhaustive_values(q.type, dom));
    std::vector<size_t> idx(pools.size(), 0);
    for (;;) {
      Env env;
      for (size_t i = 0; i < pools.size(); ++i)
        env[p.prefix[i].name] = pools[i][idx[i]];
      EvalOutcome o = eval_matrix(p.matrix, env, defs, inst.theory);
      if (!o.ok())
        return fail("property " + std::to_string(pi + 1) + " hits a " +
                    std::to_string((int)o.kind) + " violation");
      if (!o.value.b) {
        std::string m = "property " + std::to_string(pi + 1) + " is false at";
        for (auto &[k, v] : env)
          m += " " + k + "=" + v.str();
        return fail(m);
      }
      if (pools.empty())
        break;
      long long q = (long long)pools.size() - 1;
      while (q >= 0 && ++idx[q] == pools[q].size())
        idx[q--] = 0;
      if (q < 0)
        break;
    }
  }
  return true;
}

} // namespace testutil

#endif // SKETCHSYNTH_TESTS_HELPERS_HPP
