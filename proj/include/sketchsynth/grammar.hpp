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

#ifndef SKETCHSYNTH_GRAMMAR_HPP
#define SKETCHSYNTH_GRAMMAR_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sketchsynth/lang.hpp"

namespace synth {

struct NonTerminal {
  std::string name;
  Type type = Type::Int;
};

// Normal-form rule: either a terminal production N -> atom (variable or
// constant) or an application N -> (f N1 ... Nk). Rule order is declaration
// order and is preserved by the enumerator.
struct Rule {
  enum class Kind { Terminal, App };
  Kind kind = Kind::Terminal;
  std::string nt;
  ExprPtr atom;                // Terminal
  std::string fn;              // App
  std::vector<std::string> rhs; // App: non-terminal names
};

struct Grammar {
  std::map<std::string, Type> terminals;     // typed variables
  std::map<std::string, NonTerminal> nonterminals;
  std::vector<Rule> rules;                   // declaration order

  const NonTerminal *find_nt(const std::string &n) const {
    auto it = nonterminals.find(n);
    return it == nonterminals.end() ? nullptr : &it->second;
  }
};

// Checks rule well-formedness against the theory: known symbols, matching
// arities and types, terminal atoms limited to variables of the declared
// terminal set and literals of the three types.
inline Diags validate(const Grammar &g, const Theory &theory) {
  Diags diags;
  auto err = [&](const std::string &m) { diags.push_back({m}); };
  for (size_t i = 0; i < g.rules.size(); ++i) {
    const Rule &r = g.rules[i];
    std::string where = "rule " + std::to_string(i + 1) + " (" + r.nt + ")";
    const NonTerminal *nt = g.find_nt(r.nt);
    if (!nt) {
      err(where + ": unknown non-terminal '" + r.nt + "'");
      continue;
    }
    if (r.kind == Rule::Kind::Terminal) {
      switch (r.atom->kind) {
      case Expr::Kind::Var: {
        auto it = g.terminals.find(r.atom->name);
        if (it == g.terminals.end()) {
          err(where + ": variable '" + r.atom->name + "' is not a grammar terminal");
        } else if (it->second != nt->type) {
          err(where + ": terminal '" + r.atom->name + "' has type " + type_name(it->second) +
              " but the non-terminal has type " + type_name(nt->type));
        }
        break;
      }
      case Expr::Kind::IntConst:
        if (nt->type != Type::Int)
          err(where + ": integer literal under a " + std::string(type_name(nt->type)) +
              " non-terminal");
        break;
      case Expr::Kind::BoolConst:
        if (nt->type != Type::Bool)
          err(where + ": boolean literal under a " + std::string(type_name(nt->type)) +
              " non-terminal");
        break;
      case Expr::Kind::NilConst:
        if (nt->type != Type::IntList)
          err(where + ": nil under a " + std::string(type_name(nt->type)) + " non-terminal");
        break;
      default:
        err(where + ": terminal productions take a variable or a literal");
      }
      continue;
    }
    const BackgroundFn *bf = theory.find(r.fn);
    if (!bf) {
      err(where + ": '" + r.fn + "' is not a background function");
      continue;
    }
    std::vector<Type> at;
    bool ok = true;
    for (auto &m : r.rhs) {
      const NonTerminal *a = g.find_nt(m);
      if (!a) {
        err(where + ": unknown non-terminal '" + m + "' on the right-hand side");
        ok = false;
        break;
      }
      at.push_back(a->type);
    }
    if (!ok)
      continue;
    if (bf->special == BackgroundFn::Special::Eq) {
      if (at.size() != 2 || at[0] != at[1]) {
        err(where + ": '=' takes two right-hand non-terminals of one type");
        continue;
      }
      if (nt->type != Type::Bool)
        err(where + ": '=' produces :bool, the non-terminal has type " +
            std::string(type_name(nt->type)));
      continue;
    }
    size_t want = bf->variadic ? at.size() : bf->arg_types.size();
    if (bf->variadic) {
      if (at.size() < 2) {
        err(where + ": '" + r.fn + "' takes at least 2 arguments");
        continue;
      }
      for (auto t : at)
        if (t != Type::Bool)
          err(where + ": '" + r.fn + "' arguments must be :bool");
    } else if (at.size() != want) {
      err(where + ": '" + r.fn + "' takes " + std::to_string(want) + " arguments, rule has " +
          std::to_string(at.size()));
      continue;
    } else {
      for (size_t k = 0; k < at.size(); ++k)
        if (at[k] != bf->arg_types[k])
          err(where + ": argument " + std::to_string(k + 1) + " of '" + r.fn +
              "' has the wrong type");
    }
    if (bf->ret != nt->type && !bf->variadic)
      err(where + ": '" + r.fn + "' returns " + std::string(type_name(bf->ret)) +
          " but the non-terminal has type " + std::string(type_name(nt->type)));
    if (bf->variadic && nt->type != Type::Bool)
      err(where + ": '" + r.fn + "' returns :bool");
  }
  return diags;
}

// True iff `e` is derivable from non-terminal `nt` under the inductive
// definition of generation.
inline bool generates(const Grammar &g, const std::string &nt, const ExprPtr &e) {
  for (const Rule &r : g.rules) {
    if (r.nt != nt)
      continue;
    if (r.kind == Rule::Kind::Terminal) {
      if (expr_equal(r.atom, e))
        return true;
      continue;
    }
    if (e->kind != Expr::Kind::Call || e->name != r.fn || e->args.size() != r.rhs.size())
      continue;
    bool all = true;
    for (size_t i = 0; i < r.rhs.size() && all; ++i)
      all = generates(g, r.rhs[i], e->args[i]);
    if (all)
      return true;
  }
  return false;
}

// Non-terminals from which `e` is derivable.
inline std::set<std::string> generating_nts(const Grammar &g, const ExprPtr &e) {
  std::set<std::string> out;
  for (auto &[name, nt] : g.nonterminals)
    if (generates(g, name, e))
      out.insert(name);
  return out;
}

} // namespace synth

#endif // SKETCHSYNTH_GRAMMAR_HPP
