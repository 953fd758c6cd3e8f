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

#include "helpers.hpp"

using namespace testutil;

namespace {

Grammar insert_grammar() { return parse_ok(kInsertBench).instance.grammar; }

TEST(GrammarValidate, InsertGrammarIsWellFormed) {
  Grammar g = insert_grammar();
  EXPECT_EQ(g.rules.size(), 7u);
  EXPECT_EQ(g.nonterminals.size(), 3u);
  EXPECT_TRUE(validate(g, standard_theory()).empty());
}

TEST(GrammarValidate, TypeMismatchedRule) {
  Grammar g = insert_grammar();
  Rule bad;
  bad.kind = Rule::Kind::App;
  bad.nt = "B";
  bad.fn = "cons";
  bad.rhs = {"I", "L"};
  g.rules.push_back(bad);
  Diags diags = validate(g, standard_theory());
  ASSERT_FALSE(diags.empty());
  EXPECT_NE(diags[0].msg.find("cons"), std::string::npos);
}

TEST(GrammarValidate, SymbolUnderSynthesisRejected) {
  Grammar g = insert_grammar();
  Rule bad;
  bad.kind = Rule::Kind::App;
  bad.nt = "L";
  bad.fn = "insert"; // under synthesis, not a background function
  bad.rhs = {"I", "L"};
  g.rules.push_back(bad);
  Diags diags = validate(g, standard_theory());
  ASSERT_FALSE(diags.empty());
  EXPECT_NE(diags[0].msg.find("insert"), std::string::npos);
}

TEST(GrammarValidate, ArityAndUnknownNT) {
  Grammar g = insert_grammar();
  Rule bad;
  bad.kind = Rule::Kind::App;
  bad.nt = "L";
  bad.fn = "cons";
  bad.rhs = {"I"};
  g.rules.push_back(bad);
  EXPECT_FALSE(validate(g, standard_theory()).empty());
  g = insert_grammar();
  bad.rhs = {"I", "Z"};
  g.rules.push_back(bad);
  EXPECT_FALSE(validate(g, standard_theory()).empty());
}

TEST(Generates, Examples) {
  Grammar g = insert_grammar();
  EXPECT_TRUE(generates(g, "B", E("(endp xs)")));
  EXPECT_TRUE(generates(g, "I", E("x")));
  EXPECT_FALSE(generates(g, "L", E("x")));
  EXPECT_TRUE(generates(g, "L", E("(cons x (tail xs))")));
  EXPECT_FALSE(generates(g, "B", E("(endp x)")));
  EXPECT_FALSE(generates(g, "I", E("(insert x xs)")));
}

// generates agrees with exhaustive derivation enumeration on small grammars.
TEST(Generates, AgreesWithDerivationOracle) {
  Grammar g = insert_grammar();
  for (auto &[name, nt] : g.nonterminals) {
    std::set<std::string> derived = derive_set(g, name, 7);
    EXPECT_GE(derived.size(), 3u);
    for (auto &s : derived)
      EXPECT_TRUE(generates(g, name, E(s))) << name << " " << s;
    // everything derivable from the other non-terminals but not this one
    for (auto &[other, nt2] : g.nonterminals) {
      if (other == name)
        continue;
      for (auto &s : derive_set(g, other, 5))
        EXPECT_EQ(generates(g, name, E(s)), derived.count(s) > 0) << name << " " << s;
    }
  }
}

TEST(Generates, TypeSoundness) {
  Grammar g = insert_grammar();
  Theory th = standard_theory();
  TypeEnv env{{"x", Type::Int}, {"xs", Type::IntList}};
  for (auto &[name, nt] : g.nonterminals) {
    for (auto &s : derive_set(g, name, 6)) {
      Diags diags;
      auto t = typecheck(E(s), env, th, {}, diags);
      ASSERT_TRUE(t.has_value()) << s;
      EXPECT_EQ(*t, nt.type) << s;
    }
  }
}

} // namespace
