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

#ifndef SKETCHSYNTH_DRIVER_HPP
#define SKETCHSYNTH_DRIVER_HPP

#include <chrono>
#include <functional>
#include <optional>

#include "sketchsynth/enumerate.hpp"
#include "sketchsynth/skolem.hpp"

namespace synth {

struct SynthResult {
  enum class Outcome { Solution, Exhausted, TimedOut };
  Outcome outcome = Outcome::Exhausted;
  Candidate solution;
  Counters counters;
  double wall_seconds = 0;
  long long solution_size = 0; // sum of the hole expressions' sizes

  bool solved() const { return outcome == Outcome::Solution; }
};

inline const char *outcome_name(SynthResult::Outcome o) {
  switch (o) {
  case SynthResult::Outcome::Solution:
    return "solution";
  case SynthResult::Outcome::Exhausted:
    return "exhausted";
  case SynthResult::Outcome::TimedOut:
    return "timeout";
  }
  return "?";
}

// Test/diagnostic hook: reports every counterexample together with the
// candidate it was found on and the clauses learned from it (empty under
// NoGen, where counterexamples are discarded).
struct SynthObserver {
  std::function<void(const Candidate &, const Counterexample &, const std::vector<Clause> &)>
      on_counterexample;
};

// Structural validation of a universal-only instance: grammar, sketches,
// measures, properties and tests. Measures are additionally sampled over a
// small typed domain to confirm they evaluate cleanly.
inline Diags validate_instance(const SynthesisInstance &inst) {
  Diags diags;
  for (auto &d : validate(inst.grammar, inst.theory))
    diags.push_back(d);
  SigMap sigs = inst.synth_sigs();
  std::set<int> hole_ids;
  std::set<std::string> fn_names;
  for (const SynthFun &f : inst.functions) {
    if (!fn_names.insert(f.name).second)
      diags.push_back({"duplicate function under synthesis: " + f.name});
    if (inst.theory.contains(f.name))
      diags.push_back({"'" + f.name + "' collides with a background function"});
    if (f.sketch.bodies.empty())
      diags.push_back({"'" + f.name + "' has no sketch bodies"});
    for (auto &d : validate_multisketch(f.sketch, inst.grammar, inst.theory, sigs, f.params,
                                        f.ret))
      diags.push_back(d);
    for (auto &b : f.sketch.bodies)
      for (auto &h : b.holes)
        if (!hole_ids.insert(h.id).second)
          diags.push_back({"hole " + h.name + " of " + f.name + " reuses an id"});
    if (f.measure) {
      TypeEnv env;
      for (auto &p : f.params)
        env[p.name] = p.type;
      Diags mdiags;
      auto t = typecheck(f.measure, env, inst.theory, {}, mdiags);
      for (auto &d : mdiags)
        diags.push_back({"measure of " + f.name + ": " + d.msg});
      if (t && *t != Type::Int)
        diags.push_back({"measure of " + f.name + " must be :int"});
      // sample the measure over small typed inputs
      if (t && *t == Type::Int && mdiags.empty()) {
        CgenConfig small;
        small.int_bound = 2;
        small.list_len = 2;
        std::vector<std::vector<Value>> pools;
        for (auto &p : f.params)
          pools.push_back(exhaustive_values(p.type, small));
        std::vector<size_t> idx(pools.size(), 0);
        Defs none;
        for (;;) {
          Env env2;
          for (size_t i = 0; i < pools.size(); ++i)
            env2[f.params[i].name] = pools[i][idx[i]];
          EvalOutcome o = eval_expr(f.measure, env2, none, inst.theory);
          if (!o.ok()) {
            diags.push_back({"measure of " + f.name + " fails to evaluate on sampled inputs"});
            break;
          }
          if (pools.empty())
            break;
          long long p = (long long)pools.size() - 1;
          while (p >= 0 && ++idx[p] == pools[p].size())
            idx[p--] = 0;
          if (p < 0)
            break;
        }
      }
    } else {
      diags.push_back({"'" + f.name + "' has no measure"});
    }
  }
  for (size_t i = 0; i < inst.properties.size(); ++i) {
    const Property &p = inst.properties[i];
    std::string where = "property " + std::to_string(i + 1);
    if (!p.universal_only()) {
      diags.push_back({where + ": existential quantifier in a reduced instance"});
      continue;
    }
    TypeEnv env;
    for (auto &q : p.prefix) {
      if (env.count(q.name))
        diags.push_back({where + ": repeated prefix variable '" + q.name + "'"});
      env[q.name] = q.type;
    }
    Diags pdiags;
    auto t = typecheck(p.matrix, env, inst.theory, sigs, pdiags);
    for (auto &d : pdiags)
      diags.push_back({where + ": " + d.msg});
    if (t && *t != Type::Bool)
      diags.push_back({where + ": matrix must be :bool"});
  }
  for (size_t i = 0; i < inst.tests.size(); ++i) {
    Diags tdiags;
    auto t = typecheck(inst.tests[i].expr, {}, inst.theory, sigs, tdiags);
    for (auto &d : tdiags)
      diags.push_back({"test " + std::to_string(i + 1) + ": " + d.msg});
    if (t && *t != Type::Bool)
      diags.push_back({"test " + std::to_string(i + 1) + " must be :bool"});
  }
  return diags;
}

// The main loop over a universal-only instance: query the candidate space,
// check the candidate, and either return it, learn from the counterexample
// (Retro/Proph), or just move on (NoGen). Deterministic given the inputs.
inline SynthResult synthesize(const SynthesisInstance &inst, Variant variant, const CgenConfig &cfg,
                         double timeout_seconds, SynthObserver *observer = nullptr,
                         Diags *diags_out = nullptr) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  SynthResult res;
  auto finish = [&](SynthResult::Outcome o) {
    res.outcome = o;
    res.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return res;
  };

  Diags diags = validate_instance(inst);
  if (!diags.empty()) {
    if (diags_out)
      *diags_out = diags;
    return finish(SynthResult::Outcome::Exhausted);
  }

  ConstraintStore store;
  CandidateSpace space(inst, variant, &store, &res.counters);
  Cgen cgen(inst, cfg);

  for (;;) {
    if (std::chrono::duration<double>(clock::now() - t0).count() >= timeout_seconds)
      return finish(SynthResult::Outcome::TimedOut);
    auto cand = space.next();
    if (!cand)
      return finish(SynthResult::Outcome::Exhausted);
    ++res.counters.candidates;
    auto cex = cgen.find_cex(*cand);
    if (!cex) {
      res.solution = std::move(*cand);
      res.solution_size = emergent_size(res.solution.merged_emergent());
      return finish(SynthResult::Outcome::Solution);
    }
    assert(cgen.replay(*cex, cand->defs()) && "counterexample must replay");
    std::vector<Clause> clauses;
    if (variant != Variant::NoGen) {
      clauses = generalize(*cex, *cand);
      prune(store, clauses, &res.counters);
    }
    if (observer && observer->on_counterexample)
      observer->on_counterexample(*cand, *cex, clauses);
  }
}

// Mixed-quantifier entry point: Skolemizes the instance, then synthesizes
// the original functions together with the witness-generating ones.
inline SynthResult solve(const SynthesisInstance &inst, Variant variant, const CgenConfig &cfg,
                         double timeout_seconds, SynthObserver *observer = nullptr,
                         Diags *diags_out = nullptr) {
  Diags diags;
  auto reduced = reduce_instance(inst, diags);
  if (!reduced) {
    if (diags_out)
      *diags_out = diags;
    SynthResult res;
    res.outcome = SynthResult::Outcome::Exhausted;
    return res;
  }
  return synthesize(*reduced, variant, cfg, timeout_seconds, observer, diags_out);
}

} // namespace synth

#endif // SKETCHSYNTH_DRIVER_HPP
