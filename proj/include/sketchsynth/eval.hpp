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

#ifndef SKETCHSYNTH_EVAL_HPP
#define SKETCHSYNTH_EVAL_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sketchsynth/lang.hpp"

namespace synth {

using Env = std::map<std::string, Value>;

// Snapshot of the violation site, enough to re-check the violated obligation
// against sibling candidates that agree on the involved holes: the innermost
// frame's bindings, the if-conditions taken inside that frame, and the
// offending call.
struct ViolationCtx {
  std::string fn; // enclosing defined function; empty for the base frame
  Env env;
  std::vector<std::pair<ExprPtr, bool>> guards;
  ExprPtr call;
  std::string callee;             // measure violations: the called function
  bool measure_self = false;      // decrease check (vs. negative measure)
  long long entry_measure = 0;
};

struct EvalOutcome {
  enum class Kind { Ok, Contract, Measure, Budget };
  Kind kind = Kind::Ok;
  Value value;
  std::set<int> guard_holes; // Contract/Measure: if-conditions on the path
  std::set<int> site_holes;  // Contract: the violating call; Measure: measure-read args
  std::set<int> trace;       // every hole entered during evaluation
  long long steps = 0;
  ViolationCtx ctx;

  bool ok() const { return kind == Kind::Ok; }
  std::set<int> violation_holes() const {
    std::set<int> h = guard_holes;
    h.insert(site_holes.begin(), site_holes.end());
    return h;
  }
};

constexpr long long kDefaultBudget = 100000;

// Tracing evaluator. Enforces background-function contracts and per-function
// self-recursion measure decrease dynamically; counts every AST node entered
// against the budget. Deterministic for fixed inputs.
class Evaluator {
public:
  Evaluator(const Defs &defs, const Theory &theory, long long budget = kDefaultBudget)
      : defs_(defs), theory_(theory), budget_(budget) {}

  // Evaluates a call to a defined function on argument values.
  EvalOutcome eval_call(const std::string &fn, const std::vector<Value> &args) {
    reset();
    EvalOutcome out;
    auto it = defs_.find(fn);
    assert(it != defs_.end());
    const FnDef &def = it->second;
    assert(args.size() == def.params.size());
    Env base;
    for (size_t i = 0; i < def.params.size(); ++i)
      base[def.params[i].name] = args[i];
    frames_.push_back(Frame{nullptr, std::move(base), 0, 0, false});
    try {
      out.value = invoke(def, args);
      out.kind = EvalOutcome::Kind::Ok;
    } catch (const Abort &) {
      out.kind = pending_.kind;
      out.guard_holes = pending_.guard_holes;
      out.site_holes = pending_.site_holes;
      out.ctx = pending_.ctx;
    }
    frames_.clear();
    out.trace = trace_set_;
    out.steps = steps_;
    return out;
  }

  // Evaluates an arbitrary expression under variable bindings (property
  // matrices, tests, measures).
  EvalOutcome eval_expr(const ExprPtr &e, const Env &env) {
    reset();
    EvalOutcome out;
    frames_.push_back(Frame{nullptr, env, 0, 0, false});
    try {
      out.value = ev(e);
      out.kind = EvalOutcome::Kind::Ok;
    } catch (const Abort &) {
      out.kind = pending_.kind;
      out.guard_holes = pending_.guard_holes;
      out.site_holes = pending_.site_holes;
      out.ctx = pending_.ctx;
    }
    frames_.clear();
    out.trace = trace_set_;
    out.steps = steps_;
    return out;
  }

private:
  struct Abort {};

  struct Frame {
    const FnDef *def;
    Env env;
    long long entry_measure;
    size_t guard_base; // index into guards_ where this frame's guards start
    bool synthetic;    // true for measure-evaluation frames
  };

  struct Guard {
    size_t frame;
    ExprPtr cond;
    bool taken;
    std::set<int> holes;
  };

  struct Pending {
    EvalOutcome::Kind kind;
    std::set<int> guard_holes, site_holes;
    ViolationCtx ctx;
  };

  void reset() {
    trace_set_.clear();
    trace_log_.clear();
    guards_.clear();
    frames_.clear();
    steps_ = 0;
  }

  void enter(const ExprPtr &e) {
    ++steps_;
    if (budget_ >= 0 && steps_ > budget_) {
      pending_ = Pending{EvalOutcome::Kind::Budget, {}, {}, {}};
      throw Abort{};
    }
    if (e->prov >= 0) {
      trace_set_.insert(e->prov);
      trace_log_.push_back(e->prov);
    }
  }

  std::set<int> holes_since(size_t log_mark) const {
    return {trace_log_.begin() + log_mark, trace_log_.end()};
  }

  std::set<int> all_guard_holes() const {
    std::set<int> h;
    for (auto &g : guards_)
      h.insert(g.holes.begin(), g.holes.end());
    return h;
  }

  ViolationCtx make_ctx(const ExprPtr &call) const {
    ViolationCtx ctx;
    const Frame &f = frames_.back();
    ctx.fn = f.def ? f.def->name : "";
    ctx.env = f.env;
    for (size_t i = f.guard_base; i < guards_.size(); ++i)
      ctx.guards.emplace_back(guards_[i].cond, guards_[i].taken);
    ctx.call = call;
    return ctx;
  }

  [[noreturn]] void abort_contract(const ExprPtr &call, std::set<int> site) {
    pending_ =
        Pending{EvalOutcome::Kind::Contract, all_guard_holes(), std::move(site), make_ctx(call)};
    throw Abort{};
  }

  [[noreturn]] void abort_measure(const ExprPtr &call, const std::string &callee,
                                  std::set<int> site, bool self, long long entry_measure) {
    Pending p{EvalOutcome::Kind::Measure, all_guard_holes(), std::move(site), make_ctx(call)};
    p.ctx.callee = callee;
    p.ctx.measure_self = self;
    p.ctx.entry_measure = entry_measure;
    pending_ = std::move(p);
    throw Abort{};
  }

  Value lookup(const std::string &name) {
    const Env &env = frames_.back().env;
    auto it = env.find(name);
    assert(it != env.end());
    return it->second;
  }

  // Evaluates `def`'s measure over already-evaluated parameter values.
  // Failures while evaluating the measure surface as measure violations at
  // the call: the measure reads exactly the values reported in `site`.
  long long measure_value(const FnDef &def, const Env &partial, const ExprPtr &call,
                          std::set<int> &site) {
    if (!def.measure)
      return 0;
    size_t gbase = guards_.size();
    frames_.push_back(Frame{nullptr, partial, 0, gbase, true});
    Value v;
    try {
      v = ev(def.measure);
    } catch (const Abort &) {
      guards_.resize(gbase);
      frames_.pop_back();
      if (pending_.kind == EvalOutcome::Kind::Budget)
        throw;
      abort_measure(call, def.name, site, false, 0);
    }
    guards_.resize(gbase);
    frames_.pop_back();
    return v.i;
  }

  Value invoke(const FnDef &def, const std::vector<Value> &args) {
    Env env;
    for (size_t i = 0; i < def.params.size(); ++i)
      env[def.params[i].name] = args[i];
    std::set<int> none;
    long long mu = entry_measure_checked(def, env, nullptr, none, false, 0);
    frames_.push_back(Frame{&def, std::move(env), mu, guards_.size(), false});
    Value v = ev(def.body);
    guards_.resize(frames_.back().guard_base);
    frames_.pop_back();
    return v;
  }

  // Computes the measure at a call to `def` and checks non-negativity, plus
  // strict decrease when the call is self-recursive.
  long long entry_measure_checked(const FnDef &def, const Env &param_env, const ExprPtr &call,
                                  std::set<int> &site, bool self, long long outer_measure) {
    ExprPtr at = call ? call : Expr::call(def.name, {});
    long long mu = measure_value(def, param_env, at, site);
    if (mu < 0)
      abort_measure(at, def.name, site, false, 0);
    if (self && !(mu < outer_measure))
      abort_measure(at, def.name, site, true, outer_measure);
    return mu;
  }

  Value ev(const ExprPtr &e) {
    enter(e);
    switch (e->kind) {
    case Expr::Kind::Var:
      return lookup(e->name);
    case Expr::Kind::IntConst:
      return Value::of_int(e->ival);
    case Expr::Kind::BoolConst:
      return Value::of_bool(e->bval);
    case Expr::Kind::NilConst:
      return Value::of_list({});
    case Expr::Kind::Hole:
      assert(false && "holes cannot be evaluated");
      return Value::of_int(0);
    case Expr::Kind::If: {
      size_t mark = trace_log_.size();
      Value c = ev(e->args[0]);
      guards_.push_back(Guard{frames_.size() - 1, e->args[0], c.b, holes_since(mark)});
      Value v = ev(c.b ? e->args[1] : e->args[2]);
      guards_.pop_back();
      return v;
    }
    case Expr::Kind::Call:
      return ev_call(e);
    }
    return Value::of_int(0);
  }

  // Short-circuit connectives are control flow: an operand that decides
  // whether later operands run guards them, exactly like an if-condition.
  Value ev_shortcircuit(const ExprPtr &e, bool stop_on) {
    size_t gbase = guards_.size();
    for (size_t i = 0; i < e->args.size(); ++i) {
      size_t mark = trace_log_.size();
      Value v = ev(e->args[i]);
      if (v.b == stop_on || i + 1 == e->args.size()) {
        guards_.resize(gbase);
        return v;
      }
      guards_.push_back(Guard{frames_.size() - 1, e->args[i], v.b, holes_since(mark)});
    }
    guards_.resize(gbase);
    return Value::of_bool(!stop_on);
  }

  Value ev_call(const ExprPtr &e) {
    if (const BackgroundFn *bf = theory_.find(e->name)) {
      switch (bf->special) {
      case BackgroundFn::Special::And:
        return ev_shortcircuit(e, false);
      case BackgroundFn::Special::Or:
        return ev_shortcircuit(e, true);
      case BackgroundFn::Special::Implies: {
        size_t mark = trace_log_.size();
        Value a = ev(e->args[0]);
        if (!a.b)
          return Value::of_bool(true);
        guards_.push_back(Guard{frames_.size() - 1, e->args[0], true, holes_since(mark)});
        Value b = ev(e->args[1]);
        guards_.pop_back();
        return b;
      }
      default:
        break;
      }
      size_t mark = trace_log_.size();
      std::vector<Value> vals;
      vals.reserve(e->args.size());
      for (auto &a : e->args)
        vals.push_back(ev(a));
      if (bf->contract && !bf->contract(vals)) {
        std::set<int> site = holes_since(mark);
        if (e->prov >= 0)
          site.insert(e->prov);
        abort_contract(e, std::move(site));
      }
      return bf->impl(vals);
    }

    auto it = defs_.find(e->name);
    assert(it != defs_.end() && "symbol is neither background nor defined");
    const FnDef &callee = it->second;
    assert(e->args.size() == callee.params.size());

    // Arguments the measure reads come first, so the measure checks below
    // depend only on the holes those arguments contain.
    std::vector<bool> relevant(e->args.size(), false);
    for (size_t i : callee.measure_params)
      relevant[i] = true;
    std::vector<Value> vals(e->args.size());
    std::set<int> site;
    Env partial;
    for (size_t i = 0; i < e->args.size(); ++i) {
      if (!relevant[i])
        continue;
      size_t mark = trace_log_.size();
      vals[i] = ev(e->args[i]);
      auto delta = holes_since(mark);
      site.insert(delta.begin(), delta.end());
      partial[callee.params[i].name] = vals[i];
    }
    const Frame &cur = frames_.back();
    bool self = cur.def && cur.def->name == callee.name;
    long long mu = entry_measure_checked(callee, partial, e, site, self, cur.entry_measure);
    for (size_t i = 0; i < e->args.size(); ++i)
      if (!relevant[i])
        vals[i] = ev(e->args[i]);

    Env env;
    for (size_t i = 0; i < callee.params.size(); ++i)
      env[callee.params[i].name] = vals[i];
    frames_.push_back(Frame{&callee, std::move(env), mu, guards_.size(), false});
    Value v = ev(callee.body);
    guards_.resize(frames_.back().guard_base);
    frames_.pop_back();
    return v;
  }

  const Defs &defs_;
  const Theory &theory_;
  long long budget_;
  long long steps_ = 0;
  std::set<int> trace_set_;
  std::vector<int> trace_log_;
  std::vector<Guard> guards_;
  std::vector<Frame> frames_;
  Pending pending_;
};

inline EvalOutcome eval_call(const std::string &fn, const std::vector<Value> &args,
                             const Defs &defs, const Theory &theory,
                             long long budget = kDefaultBudget) {
  return Evaluator(defs, theory, budget).eval_call(fn, args);
}

inline EvalOutcome eval_expr(const ExprPtr &e, const Env &env, const Defs &defs,
                             const Theory &theory, long long budget = kDefaultBudget) {
  return Evaluator(defs, theory, budget).eval_expr(e, env);
}

// Re-checks a recorded contract/measure violation against definitions that
// agree with the originating candidate on the violation's holes: replays the
// recorded if-conditions and the offending call under the recorded frame
// bindings. Returns true when the same obligation fails again.
inline bool replay_violation(const EvalOutcome &o, const Defs &defs, const Theory &theory,
                             long long budget = kDefaultBudget) {
  if (o.kind != EvalOutcome::Kind::Contract && o.kind != EvalOutcome::Kind::Measure)
    return false;
  const ViolationCtx &ctx = o.ctx;
  for (auto &[cond, taken] : ctx.guards) {
    EvalOutcome g = eval_expr(cond, ctx.env, defs, theory, budget);
    if (!g.ok() || g.value.b != taken)
      return false;
  }
  if (o.kind == EvalOutcome::Kind::Contract) {
    EvalOutcome c = eval_expr(ctx.call, ctx.env, defs, theory, budget);
    return c.kind == EvalOutcome::Kind::Contract;
  }
  auto it = defs.find(ctx.callee);
  if (it == defs.end())
    return false;
  const FnDef &callee = it->second;
  Env menv;
  for (size_t i : callee.measure_params) {
    if (ctx.call->args.empty()) { // violation at an entry call: env has the values
      menv = ctx.env;
      break;
    }
    EvalOutcome a = eval_expr(ctx.call->args[i], ctx.env, defs, theory, budget);
    if (!a.ok())
      return false;
    menv[callee.params[i].name] = a.value;
  }
  if (!callee.measure)
    return false;
  EvalOutcome m = eval_expr(callee.measure, menv, defs, theory, budget);
  if (!m.ok())
    return true; // the measure itself fails on these inputs again
  long long mu = m.value.i;
  if (mu < 0)
    return true;
  return ctx.measure_self && !(mu < ctx.entry_measure);
}

} // namespace synth

#endif // SKETCHSYNTH_EVAL_HPP
