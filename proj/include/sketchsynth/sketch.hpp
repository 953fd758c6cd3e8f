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

#ifndef SKETCHSYNTH_SKETCH_HPP
#define SKETCHSYNTH_SKETCH_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sketchsynth/grammar.hpp"
#include "sketchsynth/lang.hpp"

namespace synth {

// A typed hole. Ids are globally unique across every function and sketch
// body of an instance. All attached non-terminals share one type.
struct Hole {
  int id = -1;
  std::string name; // surface name, e.g. "?h1"
  std::vector<std::string> nts;
  Type type = Type::Int;
};

// A partial function body. Each hole occurs exactly once in the skeleton;
// `holes` lists them in document order.
struct SketchBody {
  std::string owner;
  ExprPtr skeleton;
  std::vector<Hole> holes;

  const Hole *find_hole(int id) const {
    for (auto &h : holes)
      if (h.id == id)
        return &h;
    return nullptr;
  }
};

struct MultiSketch {
  std::string owner;
  std::vector<SketchBody> bodies;
};

// Association list mapping holes to concepts, in hole document order.
using Emergent = std::vector<std::pair<int, ExprPtr>>;

inline std::string emergent_str(const Emergent &em) {
  std::string s = "{";
  for (size_t i = 0; i < em.size(); ++i) {
    if (i)
      s += ", ";
    s += "?" + std::to_string(em[i].first) + " -> " + expr_str(em[i].second);
  }
  return s + "}";
}

inline long long emergent_size(const Emergent &em) {
  long long s = 0;
  for (auto &[h, e] : em)
    s += expr_size(e);
  return s;
}

// One synthesized function of a candidate: the chosen sketch body and the
// emergent slice that fills it.
struct CandidateFn {
  std::string fn;
  size_t body_index = 0;
  Emergent emergent;
  FnDef def;
};

struct Candidate {
  std::vector<CandidateFn> fns;
  std::vector<size_t> scope; // chosen body index per function, declaration order

  Defs defs() const {
    Defs d;
    for (auto &f : fns)
      d[f.fn] = f.def;
    return d;
  }
  Emergent merged_emergent() const {
    Emergent em;
    for (auto &f : fns)
      em.insert(em.end(), f.emergent.begin(), f.emergent.end());
    return em;
  }
};

namespace detail {
inline ExprPtr substitute_holes(const ExprPtr &e, const std::map<int, ExprPtr> &fill,
                                Diags &diags) {
  if (e->kind == Expr::Kind::Hole) {
    auto it = fill.find(e->hole_id);
    if (it == fill.end()) {
      diags.push_back({"no binding for hole ?" + std::to_string(e->hole_id)});
      return e;
    }
    return tag_with_hole(it->second, e->hole_id);
  }
  if (e->args.empty())
    return e;
  auto c = std::make_shared<Expr>(*e);
  for (auto &a : c->args)
    a = substitute_holes(a, fill, diags);
  return c;
}
} // namespace detail

// Substitutes an emergent into a sketch body. Every substituted node is
// tagged with its hole id. The emergent must cover exactly the body's holes.
inline std::optional<FnDef> complete(const SketchBody &body, const Emergent &emergent,
                                     const std::vector<Param> &params, Type ret,
                                     const ExprPtr &measure, Diags &diags) {
  std::map<int, ExprPtr> fill;
  for (auto &[h, e] : emergent) {
    if (!body.find_hole(h)) {
      diags.push_back({"emergent binds ?" + std::to_string(h) + ", not a hole of this sketch"});
      return std::nullopt;
    }
    fill[h] = e;
  }
  for (auto &h : body.holes)
    if (!fill.count(h.id)) {
      diags.push_back({"emergent misses hole " + h.name});
      return std::nullopt;
    }
  FnDef def;
  def.name = body.owner;
  def.params = params;
  def.ret = ret;
  def.measure = measure;
  def.body = detail::substitute_holes(body.skeleton, fill, diags);
  def.compute_measure_params();
  if (!diags.empty())
    return std::nullopt;
  return def;
}

// Recovers the emergent of a completed body from its provenance tags.
inline Emergent decompile(const SketchBody &body, const FnDef &def) {
  std::map<int, ExprPtr> found;
  // Walk skeleton and completed body in lockstep; a hole leaf in the
  // skeleton lines up with the substituted subtree.
  std::function<void(const ExprPtr &, const ExprPtr &)> walk = [&](const ExprPtr &sk,
                                                                   const ExprPtr &bd) {
    if (sk->kind == Expr::Kind::Hole) {
      found[sk->hole_id] = bd;
      return;
    }
    for (size_t i = 0; i < sk->args.size(); ++i)
      walk(sk->args[i], bd->args[i]);
  };
  walk(body.skeleton, def.body);
  Emergent em;
  for (auto &h : body.holes)
    em.emplace_back(h.id, found[h.id]);
  return em;
}

namespace detail {
// Terminals reachable from a non-terminal through the grammar's rules.
inline void reachable_terminals(const Grammar &g, const std::string &nt,
                                std::set<std::string> &seen_nts, std::set<std::string> &vars) {
  if (!seen_nts.insert(nt).second)
    return;
  for (const Rule &r : g.rules) {
    if (r.nt != nt)
      continue;
    if (r.kind == Rule::Kind::Terminal) {
      if (r.atom->kind == Expr::Kind::Var)
        vars.insert(r.atom->name);
    } else {
      for (auto &m : r.rhs)
        reachable_terminals(g, m, seen_nts, vars);
    }
  }
}
} // namespace detail

// Validates a multi-sketch against the grammar and theory: hole ids occur
// exactly once and in document order, hole non-terminals exist and agree on
// one type, every grammar variable reachable from a hole is a parameter of
// the owner, and the skeleton typechecks with holes at their types.
inline Diags validate_multisketch(const MultiSketch &ms, const Grammar &g, const Theory &theory,
                                  const SigMap &synth_sigs, const std::vector<Param> &params,
                                  Type ret) {
  Diags diags;
  TypeEnv env;
  for (auto &p : params)
    env[p.name] = p.type;
  std::set<std::string> param_names;
  for (auto &p : params)
    param_names.insert(p.name);

  for (size_t bi = 0; bi < ms.bodies.size(); ++bi) {
    const SketchBody &body = ms.bodies[bi];
    std::string where = ms.owner + " body " + std::to_string(bi + 1);
    std::map<int, Type> hole_types;
    for (auto &h : body.holes) {
      if (h.nts.empty()) {
        diags.push_back({where + ": hole " + h.name + " has no non-terminals"});
        continue;
      }
      std::optional<Type> t;
      for (auto &n : h.nts) {
        const NonTerminal *nt = g.find_nt(n);
        if (!nt) {
          diags.push_back({where + ": hole " + h.name + " names unknown non-terminal '" + n + "'"});
          continue;
        }
        if (!t)
          t = nt->type;
        else if (*t != nt->type)
          diags.push_back({where + ": hole " + h.name + " mixes non-terminal types"});
        std::set<std::string> seen, vars;
        detail::reachable_terminals(g, n, seen, vars);
        for (auto &v : vars)
          if (!param_names.count(v))
            diags.push_back({where + ": hole " + h.name + " can derive variable '" + v +
                             "' which is not a parameter of " + ms.owner});
      }
      if (t)
        hole_types[h.id] = *t;
    }
    std::vector<int> occ;
    collect_holes(body.skeleton, occ);
    std::set<int> occ_set(occ.begin(), occ.end());
    if (occ.size() != occ_set.size())
      diags.push_back({where + ": a hole occurs more than once in the skeleton"});
    if (occ.size() != body.holes.size())
      diags.push_back({where + ": skeleton references " + std::to_string(occ.size()) +
                       " holes, " + std::to_string(body.holes.size()) + " declared"});
    for (size_t i = 0; i < body.holes.size() && i < occ.size(); ++i)
      if (occ[i] != body.holes[i].id)
        diags.push_back({where + ": holes must be declared in document order (" +
                         body.holes[i].name + ")"});
    Diags tdiags;
    auto t = typecheck(body.skeleton, env, theory, synth_sigs, tdiags, &hole_types);
    for (auto &d : tdiags)
      diags.push_back({where + ": " + d.msg});
    if (t && *t != ret)
      diags.push_back({where + ": body has type " + std::string(type_name(*t)) +
                       ", expected " + std::string(type_name(ret))});
  }
  return diags;
}

} // namespace synth

#endif // SKETCHSYNTH_SKETCH_HPP
