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

#ifndef SKETCHSYNTH_CGEN_HPP
#define SKETCHSYNTH_CGEN_HPP

#include <cstdint>
#include <optional>
#include <random>

#include "sketchsynth/property.hpp"

namespace synth {

// Testing-based counterexample search: bounded-exhaustive typed inputs,
// smallest first, then seeded random ones. Deterministic given the seed.
struct CgenConfig {
  long long int_bound = 4; // ints in [-int_bound, int_bound]
  long long list_len = 4;  // lists of length <= list_len over that range
  int random_samples = 200;
  std::uint64_t seed = 1;
  long long budget = kDefaultBudget;
};

struct Counterexample {
  enum class Kind { Contract, Measure, Property, Test, Budget };
  enum class Origin { Admissibility, Test, Property };
  Kind kind = Kind::Property;
  Origin origin = Origin::Property;
  std::string fn;   // Admissibility: the violating function
  int index = -1;   // Test/Property: index into the instance
  Env assignment;
  std::set<int> holes; // contract/measure provenance, or the merged trace
  EvalOutcome outcome;

  std::string kind_name() const {
    switch (kind) {
    case Kind::Contract:
      return "contract";
    case Kind::Measure:
      return "measure";
    case Kind::Property:
      return "property";
    case Kind::Test:
      return "test";
    case Kind::Budget:
      return "budget";
    }
    return "?";
  }
};

// ---------------------------------------------------------------------------
// Deterministic value generation
// ---------------------------------------------------------------------------

// Smallest-first integers: 0, 1, -1, 2, -2, ...
inline std::vector<long long> exhaustive_ints(long long bound) {
  std::vector<long long> out{0};
  for (long long v = 1; v <= bound; ++v) {
    out.push_back(v);
    out.push_back(-v);
  }
  return out;
}

// Exhaustive values of a type: ints as above; bools false then true; lists
// by length, then lexicographically over the integer order.
inline std::vector<Value> exhaustive_values(Type t, const CgenConfig &cfg) {
  std::vector<Value> out;
  switch (t) {
  case Type::Int:
    for (long long v : exhaustive_ints(cfg.int_bound))
      out.push_back(Value::of_int(v));
    break;
  case Type::Bool:
    out.push_back(Value::of_bool(false));
    out.push_back(Value::of_bool(true));
    break;
  case Type::IntList: {
    std::vector<long long> alpha = exhaustive_ints(cfg.int_bound);
    for (long long len = 0; len <= cfg.list_len; ++len) {
      std::vector<size_t> idx(len, 0);
      for (;;) {
        std::vector<long long> xs(len);
        for (long long i = 0; i < len; ++i)
          xs[i] = alpha[idx[i]];
        out.push_back(Value::of_list(std::move(xs)));
        long long p = len - 1;
        while (p >= 0 && ++idx[p] == alpha.size())
          idx[p--] = 0;
        if (p < 0)
          break;
      }
    }
    break;
  }
  }
  return out;
}

// Random values reach a little beyond the exhaustive bounds. Drawn with
// explicit modulo so streams are identical across platforms.
inline Value random_value(Type t, const CgenConfig &cfg, std::mt19937_64 &rng) {
  long long span = cfg.int_bound + 2;
  auto rint = [&]() { return (long long)(rng() % (2 * span + 1)) - span; };
  switch (t) {
  case Type::Int:
    return Value::of_int(rint());
  case Type::Bool:
    return Value::of_bool(rng() % 2 == 1);
  case Type::IntList: {
    long long len = (long long)(rng() % (std::uint64_t)(cfg.list_len + 3));
    std::vector<long long> xs(len);
    for (auto &x : xs)
      x = rint();
    return Value::of_list(std::move(xs));
  }
  }
  return Value::of_int(0);
}

// The generated stream for one type: the exhaustive prefix followed by
// endless seeded-random values.
class ValueStream {
public:
  ValueStream(Type t, const CgenConfig &cfg, std::uint64_t salt = 0)
      : type_(t), cfg_(cfg), exhaustive_(exhaustive_values(t, cfg)),
        rng_(cfg.seed * 0x9E3779B97F4A7C15ull ^ salt) {}

  Value next() {
    if (pos_ < exhaustive_.size())
      return exhaustive_[pos_++];
    return random_value(type_, cfg_, rng_);
  }

private:
  Type type_;
  CgenConfig cfg_;
  std::vector<Value> exhaustive_;
  size_t pos_ = 0;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Counterexample search
// ---------------------------------------------------------------------------

class Cgen {
public:
  Cgen(const SynthesisInstance &inst, const CgenConfig &cfg) : inst_(inst), cfg_(cfg) {
    for (Type t : {Type::Int, Type::Bool, Type::IntList})
      exhaustive_[(int)t] = exhaustive_values(t, cfg);
  }

  // Checks, in order: per-function admissibility on generated inputs, the
  // tests, then each property over exhaustive assignments followed by random
  // ones. Contract/measure violations met anywhere are admissibility
  // violations of the candidate and are reported immediately. Returns
  // nullopt when nothing in the configured budget falsifies anything —
  // which means "no counterexample found", not "correct".
  std::optional<Counterexample> find_cex(const Candidate &cand) {
    Defs defs = cand.defs();
    if (auto cex = check_admissibility(defs))
      return cex;
    for (size_t i = 0; i < inst_.tests.size(); ++i) {
      EvalOutcome o = eval_matrix(inst_.tests[i].expr, {}, defs, inst_.theory, cfg_.budget);
      if (auto cex = classify(o, defs, Counterexample::Origin::Test, (int)i, {}))
        return cex;
    }
    for (size_t i = 0; i < inst_.properties.size(); ++i) {
      if (auto cex = check_property(defs, (int)i))
        return cex;
    }
    return std::nullopt;
  }

  // True when re-running the counterexample's originating check against
  // `defs` produces the same violation kind.
  bool replay(const Counterexample &cex, const Defs &defs) const {
    switch (cex.origin) {
    case Counterexample::Origin::Admissibility: {
      auto it = defs.find(cex.fn);
      if (it == defs.end())
        return false;
      std::vector<Value> args;
      for (auto &p : it->second.params)
        args.push_back(cex.assignment.at(p.name));
      EvalOutcome o = eval_call(cex.fn, args, defs, inst_.theory, cfg_.budget);
      return same_kind(o, cex.kind);
    }
    case Counterexample::Origin::Test: {
      EvalOutcome o =
          eval_matrix(inst_.tests[cex.index].expr, {}, defs, inst_.theory, cfg_.budget);
      return same_kind(o, cex.kind);
    }
    case Counterexample::Origin::Property: {
      EvalOutcome o = eval_matrix(inst_.properties[cex.index].matrix, cex.assignment, defs,
                                  inst_.theory, cfg_.budget);
      return same_kind(o, cex.kind);
    }
    }
    return false;
  }

  const CgenConfig &config() const { return cfg_; }

private:
  static bool same_kind(const EvalOutcome &o, Counterexample::Kind k) {
    switch (o.kind) {
    case EvalOutcome::Kind::Contract:
      return k == Counterexample::Kind::Contract;
    case EvalOutcome::Kind::Measure:
      return k == Counterexample::Kind::Measure;
    case EvalOutcome::Kind::Budget:
      return k == Counterexample::Kind::Budget;
    case EvalOutcome::Kind::Ok:
      return (k == Counterexample::Kind::Property || k == Counterexample::Kind::Test) &&
             o.value.type == Type::Bool && !o.value.b;
    }
    return false;
  }

  const std::vector<Value> &pool(Type t) const { return exhaustive_[(int)t]; }

  // Contract/measure violations are re-derived at the innermost synthesized
  // frame so the reported assignment is over that function's parameters and
  // replaying it hits the violation directly.
  std::optional<Counterexample> classify(const EvalOutcome &o, const Defs &defs,
                                         Counterexample::Origin origin, int index,
                                         const Env &assignment) {
    switch (o.kind) {
    case EvalOutcome::Kind::Ok:
      if (o.value.type == Type::Bool && !o.value.b) {
        Counterexample cex;
        cex.kind = origin == Counterexample::Origin::Test ? Counterexample::Kind::Test
                                                          : Counterexample::Kind::Property;
        cex.origin = origin;
        cex.index = index;
        cex.assignment = assignment;
        cex.holes = o.trace;
        cex.outcome = o;
        return cex;
      }
      return std::nullopt;
    case EvalOutcome::Kind::Budget: {
      Counterexample cex;
      cex.kind = Counterexample::Kind::Budget;
      cex.origin = origin;
      cex.index = index;
      cex.assignment = assignment;
      cex.holes = o.trace;
      cex.outcome = o;
      return cex;
    }
    case EvalOutcome::Kind::Contract:
    case EvalOutcome::Kind::Measure: {
      Counterexample cex;
      cex.kind = o.kind == EvalOutcome::Kind::Contract ? Counterexample::Kind::Contract
                                                       : Counterexample::Kind::Measure;
      if (!o.ctx.fn.empty() && defs.count(o.ctx.fn)) {
        const FnDef &def = defs.at(o.ctx.fn);
        std::vector<Value> args;
        for (auto &p : def.params)
          args.push_back(o.ctx.env.at(p.name));
        EvalOutcome direct = eval_call(o.ctx.fn, args, defs, inst_.theory, cfg_.budget);
        cex.origin = Counterexample::Origin::Admissibility;
        cex.fn = o.ctx.fn;
        cex.index = -1;
        cex.assignment = o.ctx.env;
        cex.holes = direct.violation_holes();
        cex.outcome = direct;
        return cex;
      }
      cex.origin = origin;
      cex.index = index;
      cex.assignment = assignment;
      cex.holes = o.violation_holes();
      cex.outcome = o;
      return cex;
    }
    }
    return std::nullopt;
  }

  std::optional<Counterexample> check_admissibility(const Defs &defs) {
    for (size_t fi = 0; fi < inst_.functions.size(); ++fi) {
      const SynthFun &f = inst_.functions[fi];
      size_t n = f.params.size();
      std::vector<const std::vector<Value> *> pools(n);
      for (size_t i = 0; i < n; ++i)
        pools[i] = &pool(f.params[i].type);
      std::vector<size_t> idx(n, 0);
      bool more = true;
      if (n == 0)
        more = true;
      while (more) {
        std::vector<Value> args(n);
        for (size_t i = 0; i < n; ++i)
          args[i] = (*pools[i])[idx[i]];
        if (auto cex = run_entry(defs, f, args))
          return cex;
        if (n == 0)
          break;
        long long p = (long long)n - 1;
        while (p >= 0 && ++idx[p] == pools[p]->size())
          idx[p--] = 0;
        more = p >= 0;
      }
      std::mt19937_64 rng(cfg_.seed * 0x9E3779B97F4A7C15ull ^ (0xADull + fi));
      for (int s = 0; s < cfg_.random_samples; ++s) {
        std::vector<Value> args(n);
        for (size_t i = 0; i < n; ++i)
          args[i] = random_value(f.params[i].type, cfg_, rng);
        if (auto cex = run_entry(defs, f, args))
          return cex;
      }
    }
    return std::nullopt;
  }

  std::optional<Counterexample> run_entry(const Defs &defs, const SynthFun &f,
                                          const std::vector<Value> &args) {
    EvalOutcome o = eval_call(f.name, args, defs, inst_.theory, cfg_.budget);
    if (o.ok())
      return std::nullopt;
    Env assignment;
    for (size_t i = 0; i < f.params.size(); ++i)
      assignment[f.params[i].name] = args[i];
    auto cex = classify(o, defs, Counterexample::Origin::Admissibility, -1, assignment);
    if (cex && cex->fn.empty())
      cex->fn = f.name;
    return cex;
  }

  std::optional<Counterexample> check_property(const Defs &defs, int pi) {
    const Property &p = inst_.properties[pi];
    size_t n = p.prefix.size();
    std::vector<const std::vector<Value> *> pools(n);
    for (size_t i = 0; i < n; ++i)
      pools[i] = &pool(p.prefix[i].type);
    std::vector<size_t> idx(n, 0);
    for (;;) {
      Env assignment;
      for (size_t i = 0; i < n; ++i)
        assignment[p.prefix[i].name] = (*pools[i])[idx[i]];
      EvalOutcome o = eval_matrix(p.matrix, assignment, defs, inst_.theory, cfg_.budget);
      if (auto cex = classify(o, defs, Counterexample::Origin::Property, pi, assignment))
        return cex;
      if (n == 0)
        break;
      long long q = (long long)n - 1;
      while (q >= 0 && ++idx[q] == pools[q]->size())
        idx[q--] = 0;
      if (q < 0)
        break;
    }
    std::mt19937_64 rng(cfg_.seed * 0x9E3779B97F4A7C15ull ^ (0xBEEFull + (std::uint64_t)pi));
    for (int s = 0; s < cfg_.random_samples; ++s) {
      Env assignment;
      for (size_t i = 0; i < n; ++i)
        assignment[p.prefix[i].name] = random_value(p.prefix[i].type, cfg_, rng);
      EvalOutcome o = eval_matrix(p.matrix, assignment, defs, inst_.theory, cfg_.budget);
      if (auto cex = classify(o, defs, Counterexample::Origin::Property, pi, assignment))
        return cex;
    }
    return std::nullopt;
  }

  const SynthesisInstance &inst_;
  CgenConfig cfg_;
  std::vector<Value> exhaustive_[3];
};

inline std::optional<Counterexample> find_cex(const Candidate &cand,
                                              const SynthesisInstance &inst,
                                              const CgenConfig &cfg) {
  return Cgen(inst, cfg).find_cex(cand);
}

// Sibling replay: checks that definitions agreeing with the originating
// candidate on the counterexample's holes still exhibit the same violation
// kind. Property/test/budget violations re-run the originating check (their
// holes cover the whole trace); contract/measure violations re-check the
// recorded obligation.
inline bool replay_same_violation(const Counterexample &cex, const Defs &defs,
                                  const SynthesisInstance &inst, const CgenConfig &cfg) {
  switch (cex.kind) {
  case Counterexample::Kind::Contract:
  case Counterexample::Kind::Measure:
    return replay_violation(cex.outcome, defs, inst.theory, cfg.budget);
  default:
    return Cgen(inst, cfg).replay(cex, defs);
  }
}

} // namespace synth

#endif // SKETCHSYNTH_CGEN_HPP
