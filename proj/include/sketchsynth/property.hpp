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

#ifndef SKETCHSYNTH_PROPERTY_HPP
#define SKETCHSYNTH_PROPERTY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sketchsynth/eval.hpp"
#include "sketchsynth/grammar.hpp"
#include "sketchsynth/sketch.hpp"

namespace synth {

enum class Quant { Forall, Exists };

// One prefix entry of a prenex formula. Existentials carry the multi-sketch
// (and measure, when any body recurses) for their witness function.
struct QuantVar {
  Quant quant = Quant::Forall;
  std::string name;
  Type type = Type::Int;
  std::optional<MultiSketch> sketch;
  ExprPtr measure; // witness measure; null = constant zero
};

struct Property {
  std::vector<QuantVar> prefix;
  ExprPtr matrix;

  bool universal_only() const {
    for (auto &q : prefix)
      if (q.quant == Quant::Exists)
        return false;
    return true;
  }
};

// A closed boolean sentence.
struct TestSentence {
  ExprPtr expr;
};

// One function under synthesis.
struct SynthFun {
  std::string name;
  std::vector<Param> params;
  Type ret = Type::Int;
  MultiSketch sketch;
  ExprPtr measure;

  FnSig sig() const {
    FnSig s;
    for (auto &p : params)
      s.arg_types.push_back(p.type);
    s.ret = ret;
    return s;
  }
};

struct SynthesisInstance {
  Theory theory;
  Grammar grammar;
  std::vector<SynthFun> functions;
  std::vector<Property> properties;
  std::vector<TestSentence> tests;
  long long size_bound = 3;

  SigMap synth_sigs() const {
    SigMap m;
    for (auto &f : functions)
      m[f.name] = f.sig();
    return m;
  }
  const SynthFun *find_fn(const std::string &n) const {
    for (auto &f : functions)
      if (f.name == n)
        return &f;
    return nullptr;
  }
  bool universal_only() const {
    for (auto &p : properties)
      if (!p.universal_only())
        return false;
    return true;
  }
};

// Evaluates a property matrix (or test sentence) under an assignment. All
// reached calls to functions under synthesis run with dynamic contract and
// measure checks; their traces merge into the outcome's trace. Left-to-right
// short-circuiting of and/or/=> decides which calls are reached.
inline EvalOutcome eval_matrix(const ExprPtr &matrix, const Env &assignment, const Defs &defs,
                               const Theory &theory, long long budget = kDefaultBudget) {
  return eval_expr(matrix, assignment, defs, theory, budget);
}

} // namespace synth

#endif // SKETCHSYNTH_PROPERTY_HPP
