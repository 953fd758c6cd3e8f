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

#ifndef SKETCHSYNTH_SKOLEM_HPP
#define SKETCHSYNTH_SKOLEM_HPP

#include <set>
#include <string>
#include <vector>

#include "sketchsynth/property.hpp"

namespace synth {

struct SkolemOutput {
  Property property;               // existential-free
  std::vector<SynthFun> functions; // fresh witness-generating functions
};

namespace detail {

inline ExprPtr substitute_vars(const ExprPtr &e, const std::map<std::string, ExprPtr> &subst) {
  if (e->kind == Expr::Kind::Var) {
    auto it = subst.find(e->name);
    return it == subst.end() ? e : it->second;
  }
  if (e->args.empty())
    return e;
  auto c = std::make_shared<Expr>(*e);
  for (auto &a : c->args)
    a = substitute_vars(a, subst);
  return c;
}

inline ExprPtr rename_calls(const ExprPtr &e, const std::string &from, const std::string &to) {
  auto c = std::make_shared<Expr>(*e);
  if (c->kind == Expr::Kind::Call && c->name == from)
    c->name = to;
  for (auto &a : c->args)
    a = rename_calls(a, from, to);
  return c;
}

inline bool body_recurses(const ExprPtr &e, const std::string &fn) {
  if (e->kind == Expr::Kind::Call && e->name == fn)
    return true;
  for (auto &a : e->args)
    if (body_recurses(a, fn))
      return true;
  return false;
}

inline std::string fresh_name(const std::string &base, const std::set<std::string> &used) {
  if (!used.count(base))
    return base;
  for (int k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (!used.count(cand))
      return cand;
  }
}

} // namespace detail

// Eliminates each existential by a fresh witness function applied to the
// universals preceding it, in prefix order. The witness's parameters are
// those universals; its return type is the variable's type; its multi-sketch
// comes from the annotation. `used_names` collects every symbol already
// taken and receives the fresh ones.
inline std::optional<SkolemOutput> skolemize(const Property &p, std::set<std::string> &used_names,
                                             Diags &diags) {
  SkolemOutput out;
  std::vector<QuantVar> universals;
  std::map<std::string, ExprPtr> subst;
  for (const QuantVar &q : p.prefix) {
    if (q.quant == Quant::Forall) {
      universals.push_back(q);
      continue;
    }
    if (!q.sketch) {
      diags.push_back({"existential '" + q.name + "' has no :sketch annotation"});
      return std::nullopt;
    }
    std::string g = detail::fresh_name(q.name, used_names);
    used_names.insert(g);
    SynthFun fn;
    fn.name = g;
    for (auto &u : universals)
      fn.params.push_back({u.name, u.type});
    fn.ret = q.type;
    fn.sketch = *q.sketch;
    fn.sketch.owner = g;
    for (auto &body : fn.sketch.bodies) {
      body.owner = g;
      if (g != q.name)
        body.skeleton = detail::rename_calls(body.skeleton, q.name, g);
    }
    bool recursive = false;
    for (auto &body : fn.sketch.bodies)
      recursive = recursive || detail::body_recurses(body.skeleton, g);
    if (q.measure)
      fn.measure = q.measure;
    else if (recursive) {
      diags.push_back({"existential '" + q.name + "' has a recursive sketch but no :measure"});
      return std::nullopt;
    } else {
      fn.measure = Expr::int_const(0);
    }
    std::vector<ExprPtr> args;
    for (auto &u : universals)
      args.push_back(Expr::var(u.name));
    subst[q.name] = Expr::call(g, std::move(args));
    out.functions.push_back(std::move(fn));
  }
  out.property.prefix = std::move(universals);
  out.property.matrix = detail::substitute_vars(p.matrix, subst);
  return out;
}

// Reduces a mixed-quantifier instance to a universal-only one. Fresh witness
// functions are appended after the original functions, in property order.
// Universal properties and tests pass through unchanged.
inline std::optional<SynthesisInstance> reduce_instance(const SynthesisInstance &inst,
                                                        Diags &diags) {
  SynthesisInstance out = inst;
  out.properties.clear();
  std::set<std::string> used;
  for (auto &[n, f] : inst.theory.fns)
    used.insert(n);
  for (auto &f : inst.functions)
    used.insert(f.name);
  for (const Property &p : inst.properties) {
    if (p.universal_only()) {
      out.properties.push_back(p);
      continue;
    }
    auto sk = skolemize(p, used, diags);
    if (!sk)
      return std::nullopt;
    out.properties.push_back(std::move(sk->property));
    for (auto &f : sk->functions)
      out.functions.push_back(std::move(f));
  }
  return out;
}

} // namespace synth

#endif // SKETCHSYNTH_SKOLEM_HPP
