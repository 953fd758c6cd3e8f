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

#ifndef SKETCHSYNTH_LANG_HPP
#define SKETCHSYNTH_LANG_HPP

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sketchsynth/sexpr.hpp"

namespace synth {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class Type { Int, Bool, IntList };

inline const char *type_name(Type t) {
  switch (t) {
  case Type::Int:
    return ":int";
  case Type::Bool:
    return ":bool";
  case Type::IntList:
    return ":int-list";
  }
  return "?";
}

inline std::optional<Type> parse_type(const std::string &s) {
  if (s == ":int")
    return Type::Int;
  if (s == ":bool")
    return Type::Bool;
  if (s == ":int-list")
    return Type::IntList;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Object-language expression. `if` is the only special form; every other
// composite node is a Call. Leaves of sketch skeletons may additionally be
// Hole references. `prov` tags a node with the hole it was substituted
// from when a sketch is completed (-1 when none).
struct Expr {
  enum class Kind { Var, IntConst, BoolConst, NilConst, If, Call, Hole };
  Kind kind;
  std::string name;          // Var name or Call function symbol
  long long ival = 0;        // IntConst
  bool bval = false;         // BoolConst
  std::vector<ExprPtr> args; // If: cond/then/else, Call: arguments
  int hole_id = -1;          // Hole leaves
  int prov = -1;

  static ExprPtr var(std::string n) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->name = std::move(n);
    return e;
  }
  static ExprPtr int_const(long long v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::IntConst;
    e->ival = v;
    return e;
  }
  static ExprPtr bool_const(bool b) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::BoolConst;
    e->bval = b;
    return e;
  }
  static ExprPtr nil() {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::NilConst;
    return e;
  }
  static ExprPtr mkif(ExprPtr c, ExprPtr t, ExprPtr f) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::If;
    e->args = {std::move(c), std::move(t), std::move(f)};
    return e;
  }
  static ExprPtr call(std::string fn, std::vector<ExprPtr> as) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Call;
    e->name = std::move(fn);
    e->args = std::move(as);
    return e;
  }
  static ExprPtr hole(int id) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Hole;
    e->hole_id = id;
    return e;
  }
};

// Structural equality; provenance tags are metadata and do not participate.
inline bool expr_equal(const ExprPtr &a, const ExprPtr &b) {
  if (a.get() == b.get())
    return true;
  if (a->kind != b->kind)
    return false;
  switch (a->kind) {
  case Expr::Kind::Var:
    return a->name == b->name;
  case Expr::Kind::IntConst:
    return a->ival == b->ival;
  case Expr::Kind::BoolConst:
    return a->bval == b->bval;
  case Expr::Kind::NilConst:
    return true;
  case Expr::Kind::Hole:
    return a->hole_id == b->hole_id;
  case Expr::Kind::If:
  case Expr::Kind::Call:
    if (a->name != b->name || a->args.size() != b->args.size())
      return false;
    for (size_t i = 0; i < a->args.size(); ++i)
      if (!expr_equal(a->args[i], b->args[i]))
        return false;
    return true;
  }
  return false;
}

inline void expr_print(std::ostream &os, const ExprPtr &e) {
  switch (e->kind) {
  case Expr::Kind::Var:
    os << e->name;
    return;
  case Expr::Kind::IntConst:
    os << e->ival;
    return;
  case Expr::Kind::BoolConst:
    os << (e->bval ? "true" : "false");
    return;
  case Expr::Kind::NilConst:
    os << "nil";
    return;
  case Expr::Kind::Hole:
    os << "?" << e->hole_id;
    return;
  case Expr::Kind::If:
    os << "(if";
    for (auto &a : e->args) {
      os << " ";
      expr_print(os, a);
    }
    os << ")";
    return;
  case Expr::Kind::Call:
    os << "(" << e->name;
    for (auto &a : e->args) {
      os << " ";
      expr_print(os, a);
    }
    os << ")";
    return;
  }
}

inline std::string expr_str(const ExprPtr &e) {
  std::ostringstream os;
  expr_print(os, e);
  return os.str();
}

// Expression size: 1 for a variable or constant, 1 + sum of argument sizes
// for an application; `if` counts as a 3-ary call.
inline long long expr_size(const ExprPtr &e) {
  switch (e->kind) {
  case Expr::Kind::Var:
  case Expr::Kind::IntConst:
  case Expr::Kind::BoolConst:
  case Expr::Kind::NilConst:
  case Expr::Kind::Hole:
    return 1;
  case Expr::Kind::If:
  case Expr::Kind::Call: {
    long long s = 1;
    for (auto &a : e->args)
      s += expr_size(a);
    return s;
  }
  }
  return 1;
}

inline void collect_free_vars(const ExprPtr &e, std::set<std::string> &out) {
  if (e->kind == Expr::Kind::Var)
    out.insert(e->name);
  for (auto &a : e->args)
    collect_free_vars(a, out);
}

inline void collect_holes(const ExprPtr &e, std::vector<int> &out) {
  if (e->kind == Expr::Kind::Hole)
    out.push_back(e->hole_id);
  for (auto &a : e->args)
    collect_holes(a, out);
}

// Clone of `e` with every node tagged as originating from hole `h`.
inline ExprPtr tag_with_hole(const ExprPtr &e, int h) {
  auto c = std::make_shared<Expr>(*e);
  c->prov = h;
  for (auto &a : c->args)
    a = tag_with_hole(a, h);
  return c;
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct Value {
  Type type = Type::Int;
  long long i = 0;
  bool b = false;
  std::vector<long long> list;

  static Value of_int(long long v) {
    Value x;
    x.type = Type::Int;
    x.i = v;
    return x;
  }
  static Value of_bool(bool v) {
    Value x;
    x.type = Type::Bool;
    x.b = v;
    return x;
  }
  static Value of_list(std::vector<long long> xs) {
    Value x;
    x.type = Type::IntList;
    x.list = std::move(xs);
    return x;
  }

  bool operator==(const Value &o) const {
    if (type != o.type)
      return false;
    switch (type) {
    case Type::Int:
      return i == o.i;
    case Type::Bool:
      return b == o.b;
    case Type::IntList:
      return list == o.list;
    }
    return false;
  }
  bool operator!=(const Value &o) const { return !(*this == o); }

  std::string str() const {
    std::ostringstream os;
    switch (type) {
    case Type::Int:
      os << i;
      break;
    case Type::Bool:
      os << (b ? "true" : "false");
      break;
    case Type::IntList:
      os << "(";
      for (size_t k = 0; k < list.size(); ++k)
        os << (k ? " " : "") << list[k];
      os << ")";
      break;
    }
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Background theory
// ---------------------------------------------------------------------------

// A background function with a fixed signature, an input contract, and a
// total implementation over contract-satisfying arguments. `and`/`or`/`=>`
// get short-circuit treatment in the evaluator; `=` is polymorphic over the
// three types (both arguments must share one type).
struct BackgroundFn {
  enum class Special { None, And, Or, Implies, Eq };
  std::string name;
  std::vector<Type> arg_types;
  Type ret = Type::Int;
  Special special = Special::None;
  bool variadic = false; // and/or accept 2 or more arguments
  std::function<bool(const std::vector<Value> &)> contract;   // null = tautology
  std::function<Value(const std::vector<Value> &)> impl;
};

struct Theory {
  std::map<std::string, BackgroundFn> fns;

  bool contains(const std::string &n) const { return fns.count(n) != 0; }
  const BackgroundFn *find(const std::string &n) const {
    auto it = fns.find(n);
    return it == fns.end() ? nullptr : &it->second;
  }
  void add(BackgroundFn f) { fns[f.name] = std::move(f); }
};

inline Theory standard_theory() {
  Theory th;
  auto fn = [&](std::string name, std::vector<Type> args, Type ret,
                std::function<Value(const std::vector<Value> &)> impl,
                std::function<bool(const std::vector<Value> &)> contract = nullptr) {
    BackgroundFn f;
    f.name = name;
    f.arg_types = std::move(args);
    f.ret = ret;
    f.impl = std::move(impl);
    f.contract = std::move(contract);
    th.add(std::move(f));
  };

  fn("head", {Type::IntList}, Type::Int,
     [](const std::vector<Value> &a) { return Value::of_int(a[0].list.front()); },
     [](const std::vector<Value> &a) { return !a[0].list.empty(); });
  fn("tail", {Type::IntList}, Type::IntList,
     [](const std::vector<Value> &a) {
       return Value::of_list({a[0].list.begin() + 1, a[0].list.end()});
     },
     [](const std::vector<Value> &a) { return !a[0].list.empty(); });
  fn("cons", {Type::Int, Type::IntList}, Type::IntList, [](const std::vector<Value> &a) {
    std::vector<long long> xs;
    xs.reserve(a[1].list.size() + 1);
    xs.push_back(a[0].i);
    xs.insert(xs.end(), a[1].list.begin(), a[1].list.end());
    return Value::of_list(std::move(xs));
  });
  fn("endp", {Type::IntList}, Type::Bool,
     [](const std::vector<Value> &a) { return Value::of_bool(a[0].list.empty()); });
  fn("member", {Type::Int, Type::IntList}, Type::Bool, [](const std::vector<Value> &a) {
    return Value::of_bool(std::find(a[1].list.begin(), a[1].list.end(), a[0].i) !=
                          a[1].list.end());
  });
  fn("len", {Type::IntList}, Type::Int,
     [](const std::vector<Value> &a) { return Value::of_int((long long)a[0].list.size()); });
  fn("length", {Type::IntList}, Type::Int,
     [](const std::vector<Value> &a) { return Value::of_int((long long)a[0].list.size()); });
  fn("append", {Type::IntList, Type::IntList}, Type::IntList,
     [](const std::vector<Value> &a) {
       std::vector<long long> xs = a[0].list;
       xs.insert(xs.end(), a[1].list.begin(), a[1].list.end());
       return Value::of_list(std::move(xs));
     });
  fn("nil", {}, Type::IntList, [](const std::vector<Value> &) { return Value::of_list({}); });
  fn("+", {Type::Int, Type::Int}, Type::Int,
     [](const std::vector<Value> &a) { return Value::of_int(a[0].i + a[1].i); });
  fn("-", {Type::Int, Type::Int}, Type::Int,
     [](const std::vector<Value> &a) { return Value::of_int(a[0].i - a[1].i); });
  fn("min", {Type::Int, Type::Int}, Type::Int,
     [](const std::vector<Value> &a) { return Value::of_int(std::min(a[0].i, a[1].i)); });
  fn("<", {Type::Int, Type::Int}, Type::Bool,
     [](const std::vector<Value> &a) { return Value::of_bool(a[0].i < a[1].i); });
  fn("<=", {Type::Int, Type::Int}, Type::Bool,
     [](const std::vector<Value> &a) { return Value::of_bool(a[0].i <= a[1].i); });
  fn("not", {Type::Bool}, Type::Bool,
     [](const std::vector<Value> &a) { return Value::of_bool(!a[0].b); });
  fn("nth", {Type::Int, Type::IntList}, Type::Int,
     [](const std::vector<Value> &a) { return Value::of_int(a[1].list[(size_t)a[0].i]); },
     [](const std::vector<Value> &a) {
       return a[0].i >= 0 && a[0].i < (long long)a[1].list.size();
     });
  fn("sortedb", {Type::IntList}, Type::Bool, [](const std::vector<Value> &a) {
    return Value::of_bool(std::is_sorted(a[0].list.begin(), a[0].list.end()));
  });
  fn("zerosl", {Type::IntList}, Type::Bool, [](const std::vector<Value> &a) {
    return Value::of_bool(std::all_of(a[0].list.begin(), a[0].list.end(),
                                      [](long long v) { return v == 0; }));
  });
  fn("onesl", {Type::IntList}, Type::Bool, [](const std::vector<Value> &a) {
    return Value::of_bool(std::all_of(a[0].list.begin(), a[0].list.end(),
                                      [](long long v) { return v == 1; }));
  });

  BackgroundFn band;
  band.name = "and";
  band.arg_types = {Type::Bool, Type::Bool};
  band.ret = Type::Bool;
  band.special = BackgroundFn::Special::And;
  band.variadic = true;
  th.add(band);

  BackgroundFn bor = band;
  bor.name = "or";
  bor.special = BackgroundFn::Special::Or;
  th.add(bor);

  BackgroundFn imp;
  imp.name = "=>";
  imp.arg_types = {Type::Bool, Type::Bool};
  imp.ret = Type::Bool;
  imp.special = BackgroundFn::Special::Implies;
  th.add(imp);

  BackgroundFn eq;
  eq.name = "=";
  eq.arg_types = {Type::Int, Type::Int}; // placeholder; both sides share one type
  eq.ret = Type::Bool;
  eq.special = BackgroundFn::Special::Eq;
  eq.impl = [](const std::vector<Value> &a) { return Value::of_bool(a[0] == a[1]); };
  th.add(eq);

  return th;
}

// ---------------------------------------------------------------------------
// Function definitions
// ---------------------------------------------------------------------------

struct Param {
  std::string name;
  Type type;
};

// A defined (synthesized) function. `measure` is an :int expression over
// the parameters, read as a natural-number measure; `measure_params` caches
// the parameter positions the measure actually mentions.
struct FnDef {
  std::string name;
  std::vector<Param> params;
  Type ret = Type::Int;
  ExprPtr body;
  ExprPtr measure;
  std::vector<size_t> measure_params;

  void compute_measure_params() {
    measure_params.clear();
    if (!measure)
      return;
    std::set<std::string> fv;
    collect_free_vars(measure, fv);
    for (size_t i = 0; i < params.size(); ++i)
      if (fv.count(params[i].name))
        measure_params.push_back(i);
  }
};

using Defs = std::map<std::string, FnDef>;

struct FnSig {
  std::vector<Type> arg_types;
  Type ret = Type::Int;
};

using SigMap = std::map<std::string, FnSig>;

// ---------------------------------------------------------------------------
// Type checking
// ---------------------------------------------------------------------------

using TypeEnv = std::map<std::string, Type>;

// Returns the unique type of `e`, or nullopt with a located diagnostic.
// `hole_types` supplies types for Hole leaves (sketch skeletons only).
inline std::optional<Type> typecheck(const ExprPtr &e, const TypeEnv &env, const Theory &theory,
                                     const SigMap &synth_sigs, Diags &diags,
                                     const std::map<int, Type> *hole_types = nullptr) {
  auto err = [&](const std::string &m) -> std::optional<Type> {
    diags.push_back({m + " in " + expr_str(e)});
    return std::nullopt;
  };
  switch (e->kind) {
  case Expr::Kind::Var: {
    auto it = env.find(e->name);
    if (it == env.end())
      return err("unknown variable '" + e->name + "'");
    return it->second;
  }
  case Expr::Kind::IntConst:
    return Type::Int;
  case Expr::Kind::BoolConst:
    return Type::Bool;
  case Expr::Kind::NilConst:
    return Type::IntList;
  case Expr::Kind::Hole: {
    if (!hole_types)
      return err("hole reference outside a sketch skeleton");
    auto it = hole_types->find(e->hole_id);
    if (it == hole_types->end())
      return err("unknown hole ?" + std::to_string(e->hole_id));
    return it->second;
  }
  case Expr::Kind::If: {
    auto c = typecheck(e->args[0], env, theory, synth_sigs, diags, hole_types);
    auto t = typecheck(e->args[1], env, theory, synth_sigs, diags, hole_types);
    auto f = typecheck(e->args[2], env, theory, synth_sigs, diags, hole_types);
    if (!c || !t || !f)
      return std::nullopt;
    if (*c != Type::Bool)
      return err("if condition must be :bool");
    if (*t != *f)
      return err("if branches have different types");
    return *t;
  }
  case Expr::Kind::Call: {
    std::vector<Type> at;
    at.reserve(e->args.size());
    for (auto &a : e->args) {
      auto t = typecheck(a, env, theory, synth_sigs, diags, hole_types);
      if (!t)
        return std::nullopt;
      at.push_back(*t);
    }
    if (const BackgroundFn *bf = theory.find(e->name)) {
      if (bf->special == BackgroundFn::Special::Eq) {
        if (at.size() != 2)
          return err("'=' expects 2 arguments");
        if (at[0] != at[1])
          return err("'=' arguments must share one type");
        return Type::Bool;
      }
      if (bf->variadic) {
        if (at.size() < 2)
          return err("'" + e->name + "' expects at least 2 arguments");
        for (auto t : at)
          if (t != Type::Bool)
            return err("'" + e->name + "' arguments must be :bool");
        return Type::Bool;
      }
      if (at.size() != bf->arg_types.size())
        return err("'" + e->name + "' expects " + std::to_string(bf->arg_types.size()) +
                   " arguments, got " + std::to_string(at.size()));
      for (size_t i = 0; i < at.size(); ++i)
        if (at[i] != bf->arg_types[i])
          return err("argument " + std::to_string(i + 1) + " of '" + e->name +
                     "' has the wrong type");
      return bf->ret;
    }
    auto it = synth_sigs.find(e->name);
    if (it == synth_sigs.end())
      return err("unknown function '" + e->name + "'");
    const FnSig &sig = it->second;
    if (at.size() != sig.arg_types.size())
      return err("'" + e->name + "' expects " + std::to_string(sig.arg_types.size()) +
                 " arguments, got " + std::to_string(at.size()));
    for (size_t i = 0; i < at.size(); ++i)
      if (at[i] != sig.arg_types[i])
        return err("argument " + std::to_string(i + 1) + " of '" + e->name +
                   "' has the wrong type");
    return sig.ret;
  }
  }
  return std::nullopt;
}

} // namespace synth

#endif // SKETCHSYNTH_LANG_HPP
