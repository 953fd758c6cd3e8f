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

// End-to-end acceptance checks over the shipped benchmark suite. One test
// per criterion; each prints its own pass/fail line through the runner.

#include "helpers.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <random>
#include <thread>

#include "sketchsynth/enumerate.hpp"

using namespace testutil;
namespace fs = std::filesystem;

namespace {

constexpr double kRunTimeout = 120.0;

struct LearnEvent {
  Candidate candidate;
  Counterexample cex;
  Clause clause;
};

struct SuiteRun {
  std::string bench;
  Variant variant = Variant::Proph;
  std::uint64_t seed = 1;
  bool observe = false;
  SynthResult result;
  SynthesisInstance reduced; // the universal-only instance the run solved
  std::vector<LearnEvent> events;
};

std::vector<BenchmarkFile> &suite() {
  static std::vector<BenchmarkFile> files = [] {
    std::vector<BenchmarkFile> out;
    std::vector<std::string> paths;
    for (auto &entry : fs::directory_iterator(SKETCHSYNTH_BENCH_DIR))
      if (entry.path().extension() == ".bench")
        paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    for (auto &p : paths) {
      std::ifstream in(p);
      std::stringstream ss;
      ss << in.rdbuf();
      Diags diags;
      auto bf = parse_benchmark(ss.str(), diags);
      if (bf)
        out.push_back(*bf);
    }
    return out;
  }();
  return files;
}

void execute(SuiteRun &run) {
  const BenchmarkFile *bf = nullptr;
  for (auto &b : suite())
    if (b.name == run.bench)
      bf = &b;
  ASSERT_TRUE(bf) << run.bench;
  CgenConfig cfg = bf->cfg;
  cfg.seed = run.seed;
  Diags diags;
  auto reduced = reduce_instance(bf->instance, diags);
  ASSERT_TRUE(reduced.has_value()) << run.bench;
  run.reduced = *reduced;
  SynthObserver obs;
  obs.on_counterexample = [&](const Candidate &cand, const Counterexample &cex,
                              const std::vector<Clause> &clauses) {
    for (auto &c : clauses)
      run.events.push_back({cand, cex, c});
  };
  run.result = synthesize(run.reduced, run.variant, cfg, kRunTimeout,
                          run.observe ? &obs : nullptr, &diags);
  EXPECT_TRUE(diags.empty()) << run.bench << ": " << diags[0].str();
}

// The full run matrix, computed once and shared by the criteria below.
std::vector<SuiteRun> &all_runs() {
  static std::vector<SuiteRun> runs = [] {
    std::vector<SuiteRun> out;
    for (auto &bf : suite()) {
      for (std::uint64_t seed : {1, 2, 3})
        out.push_back({bf.name, Variant::Proph, seed, seed == 1});
      out.push_back({bf.name, Variant::Retro, 1, false});
      out.push_back({bf.name, Variant::NoGen, 1, false});
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= out.size())
          return;
        execute(out[i]);
      }
    };
    unsigned n = std::max(2u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
    return out;
  }();
  return runs;
}

const SuiteRun *find_run(const std::string &bench, Variant v, std::uint64_t seed = 1) {
  for (auto &r : all_runs())
    if (r.bench == bench && r.variant == v && r.seed == seed)
      return &r;
  return nullptr;
}

std::map<int, std::string> clause_map(const Clause &c) {
  std::map<int, std::string> m;
  for (auto &l : c.literals)
    m[l.hole] = l.printed;
  return m;
}

// --- Criterion 1: the running example's counterexamples and clauses -------

TEST(Acceptance, PaperExampleReplication) {
  BenchmarkFile bf = load_bench_file("insert.bench");
  const SynthesisInstance &inst = bf.instance;
  CgenConfig defaults; // stock configuration, not the benchmark's overrides
  int h1 = hole_id(inst, "?h1"), h2 = hole_id(inst, "?h2"), h5 = hole_id(inst, "?h5");
  using clock = std::chrono::steady_clock;

  {
    auto t0 = clock::now();
    Candidate cand =
        make_insert_candidate(inst, "(endp xs)", "(tail xs)", "(head xs)", "x", "xs");
    auto cex = find_cex(cand, inst, defaults);
    ASSERT_TRUE(cex.has_value());
    EXPECT_EQ(cex->kind, Counterexample::Kind::Contract);
    EXPECT_EQ(cex->assignment.at("x"), Value::of_int(0));
    EXPECT_EQ(cex->assignment.at("xs"), Value::of_list({}));
    auto clauses = generalize(*cex, cand);
    EXPECT_EQ(clause_map(clauses.at(0)),
              (std::map<int, std::string>{{h1, "(endp xs)"}, {h2, "(tail xs)"}}));
    EXPECT_LT(std::chrono::duration<double>(clock::now() - t0).count(), 1.0);
  }
  {
    auto t0 = clock::now();
    Candidate cand = make_insert_candidate(inst, "(endp xs)", "nil", "(head xs)", "x", "xs");
    auto cex = find_cex(cand, inst, defaults);
    ASSERT_TRUE(cex.has_value());
    EXPECT_EQ(cex->kind, Counterexample::Kind::Measure);
    EXPECT_EQ(cex->assignment.at("x"), Value::of_int(0));
    EXPECT_EQ(cex->assignment.at("xs"), Value::of_list({0}));
    auto clauses = generalize(*cex, cand);
    EXPECT_EQ(clause_map(clauses.at(0)),
              (std::map<int, std::string>{{h1, "(endp xs)"}, {h5, "xs"}}));
    EXPECT_LT(std::chrono::duration<double>(clock::now() - t0).count(), 1.0);
  }
  {
    // the property violation runs against the membership property alone
    BenchmarkFile member_only = parse_ok(R"((size-bound 3)
(grammar
  (I :int x (head L))
  (L :int-list nil xs (cons I L) (tail L))
  (B :bool (endp L)))
(synth-fun insert ((x :int) (xs :int-list)) :int-list
  :measure (len xs)
  :sketch ((if ?h1 ?h2 (cons ?h3 (insert ?h4 ?h5))))
  :holes ((?h1 B) (?h2 L) (?h3 I) (?h4 I) (?h5 L)))
(property (forall ((x :int) (xs :int-list)) (member x (insert x xs))))
)");
    const SynthesisInstance &mi = member_only.instance;
    auto t0 = clock::now();
    Candidate cand =
        make_insert_candidate(mi, "(endp xs)", "nil", "(head xs)", "x", "(tail xs)");
    auto cex = find_cex(cand, mi, defaults);
    ASSERT_TRUE(cex.has_value());
    EXPECT_EQ(cex->kind, Counterexample::Kind::Property);
    EXPECT_EQ(cex->assignment.at("x"), Value::of_int(0));
    EXPECT_EQ(cex->assignment.at("xs"), Value::of_list({}));
    auto clauses = generalize(*cex, cand);
    EXPECT_EQ(clause_map(clauses.at(0)),
              (std::map<int, std::string>{{hole_id(mi, "?h1"), "(endp xs)"},
                                          {hole_id(mi, "?h2"), "nil"}}));
    EXPECT_LT(std::chrono::duration<double>(clock::now() - t0).count(), 1.0);
  }
}

// --- Criterion 2: the suite solves end to end ------------------------------

TEST(Acceptance, EndToEndSuite) {
  ASSERT_GE(suite().size(), 12u);
  int solved = 0;
  for (auto &bf : suite()) {
    std::vector<const SuiteRun *> seeds;
    for (std::uint64_t s : {1, 2, 3})
      seeds.push_back(find_run(bf.name, Variant::Proph, s));
    bool all = true;
    for (auto *r : seeds)
      all = all && r && r->result.solved();
    if (!all) {
      ADD_FAILURE() << bf.name << " did not solve under every seed";
      continue;
    }
    ++solved;
    // seed stability: identical solutions
    for (size_t s = 1; s < seeds.size(); ++s)
      EXPECT_EQ(emergent_str(seeds[0]->result.solution.merged_emergent()),
                emergent_str(seeds[s]->result.solution.merged_emergent()))
          << bf.name << " differs between seeds";
    // independent semantic check of every returned solution
    for (auto *r : seeds) {
      std::string why;
      EXPECT_TRUE(oracle_check(r->reduced, r->result.solution.defs(), 4, 4, &why))
          << bf.name << ": " << why;
    }
    EXPECT_LT(seeds[0]->result.wall_seconds, kRunTimeout) << bf.name;
  }
  EXPECT_GE(solved, 11) << "proph must solve at least 11 of the shipped benchmarks";
}

// --- Criterion 3: variant ordering ------------------------------------------

TEST(Acceptance, VariantOrdering) {
  for (auto &bf : suite()) {
    const SuiteRun *nogen = find_run(bf.name, Variant::NoGen);
    const SuiteRun *retro = find_run(bf.name, Variant::Retro);
    const SuiteRun *proph = find_run(bf.name, Variant::Proph, 1);
    ASSERT_TRUE(nogen && retro && proph) << bf.name;
    // solved(NoGen) ⊆ solved(Retro) ⊆ solved(Proph)
    if (nogen->result.solved())
      EXPECT_TRUE(retro->result.solved()) << bf.name << ": nogen solved but retro did not";
    if (retro->result.solved())
      EXPECT_TRUE(proph->result.solved()) << bf.name << ": retro solved but proph did not";
    if (retro->result.solved() && proph->result.solved()) {
      EXPECT_EQ(proph->result.counters.candidates, retro->result.counters.candidates)
          << bf.name;
      EXPECT_LE(proph->result.counters.tuples_materialized,
                retro->result.counters.tuples_materialized)
          << bf.name;
    }
    if (retro->result.solved())
      EXPECT_LE(retro->result.counters.candidates, nogen->result.counters.candidates)
          << bf.name;
  }
}

// --- Criterion 4: enumeration equals the derivation oracle -----------------

Grammar acceptance_plus_grammar() {
  Grammar g;
  g.terminals["x"] = Type::Int;
  g.nonterminals["E"] = {"E", Type::Int};
  Rule t;
  t.kind = Rule::Kind::Terminal;
  t.nt = "E";
  t.atom = Expr::var("x");
  g.rules.push_back(t);
  Rule a;
  a.kind = Rule::Kind::App;
  a.nt = "E";
  a.fn = "+";
  a.rhs = {"E", "E"};
  g.rules.push_back(a);
  return g;
}

TEST(Acceptance, EnumerationOracleEquivalence) {
  auto t0 = std::chrono::steady_clock::now();
  {
    Counters counters;
    Grammar g = acceptance_plus_grammar();
    ConceptSpace cs(g, 7, &counters);
    std::vector<std::string> got;
    while (got.size() < 5) {
      std::vector<ConceptEvent> events;
      ASSERT_TRUE(cs.next(events));
      got.push_back(cs.entry(events.back().index).printed);
    }
    EXPECT_EQ(got, (std::vector<std::string>{"x", "(+ x x)", "(+ x (+ x x))", "(+ (+ x x) x)",
                                             "(+ (+ x x) (+ x x))"}));
  }
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    // random instance: up to 3 holes, up to 6 rules, bound up to 4
    struct Spec {
      const char *nt;
      const char *text;
    };
    static const std::vector<Spec> pool{
        {"I", "x"},          {"I", "0"},        {"I", "(head L)"}, {"I", "(+ I I)"},
        {"L", "xs"},         {"L", "nil"},      {"L", "(tail L)"}, {"L", "(cons I L)"},
        {"B", "(endp L)"},   {"B", "(<= I I)"}, {"B", "true"},     {"I", "(min I I)"},
    };
    Grammar g;
    g.terminals["x"] = Type::Int;
    g.terminals["xs"] = Type::IntList;
    g.nonterminals["I"] = {"I", Type::Int};
    g.nonterminals["L"] = {"L", Type::IntList};
    g.nonterminals["B"] = {"B", Type::Bool};
    std::set<size_t> chosen;
    size_t nrules = 2 + rng() % 5;
    while (chosen.size() < nrules)
      chosen.insert(rng() % pool.size());
    Diags diags;
    for (size_t i : chosen) {
      std::vector<Sexpr> items;
      SexprReader reader(pool[i].text);
      ASSERT_TRUE(reader.read_all(items, diags));
      Rule r;
      r.nt = pool[i].nt;
      if (items[0].is_list()) {
        r.kind = Rule::Kind::App;
        r.fn = items[0][0].sym;
        for (size_t a = 1; a < items[0].size(); ++a)
          r.rhs.push_back(items[0][a].sym);
      } else {
        r.kind = Rule::Kind::Terminal;
        benchdetail::Parser p(diags);
        r.atom = p.parse_expr(items[0], false);
      }
      g.rules.push_back(std::move(r));
    }
    std::vector<Hole> holes;
    size_t nholes = 1 + rng() % 3;
    static const char *nts[] = {"I", "L", "B"};
    for (size_t h = 0; h < nholes; ++h) {
      const char *nt = nts[rng() % 3];
      holes.push_back({(int)h, "?" + std::to_string(h), {nt},
                       g.nonterminals.at(nt).type});
    }
    long long bound = 2 + rng() % 3;

    Counters counters;
    ConceptSpace cs(g, bound, &counters);
    EmergentSpace es({0}, holes, {}, &cs, &counters);
    std::set<std::string> got;
    size_t yielded = 0;
    for (;;) {
      auto em = es.next(Variant::NoGen, nullptr);
      if (em) {
        ++yielded;
        got.insert(emergent_str(*em));
        continue;
      }
      std::vector<ConceptEvent> events;
      bool more = cs.next(events);
      for (auto &ev : events)
        es.add_concept(ev);
      if (!more && events.empty())
        break;
    }
    EXPECT_EQ(got.size(), yielded) << "duplicate emergents in trial " << trial;

    std::vector<std::vector<std::string>> per_hole;
    for (auto &h : holes) {
      auto d = derive_set(g, h.nts[0], bound);
      per_hole.emplace_back(d.begin(), d.end());
    }
    std::set<std::string> want;
    bool any_empty = false;
    for (auto &l : per_hole)
      any_empty = any_empty || l.empty();
    if (!any_empty) {
      std::vector<size_t> idx(per_hole.size(), 0);
      for (;;) {
        std::string key = "{";
        for (size_t i = 0; i < per_hole.size(); ++i) {
          if (i)
            key += ", ";
          key += "?" + std::to_string(holes[i].id) + " -> " + per_hole[i][idx[i]];
        }
        want.insert(key + "}");
        long long p = (long long)per_hole.size() - 1;
        while (p >= 0 && ++idx[p] == per_hole[p].size())
          idx[p--] = 0;
        if (p < 0)
          break;
      }
    }
    EXPECT_EQ(got, want) << "trial " << trial;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 30.0);
}

// --- Criterion 5: every learned clause replays on sampled siblings ---------

TEST(Acceptance, GeneralizationSoundnessReplay) {
  std::mt19937_64 rng(4242);
  long long clauses_checked = 0, replays = 0;
  for (auto &bf : suite()) {
    const SuiteRun *run = find_run(bf.name, Variant::Proph, 1);
    ASSERT_TRUE(run);
    const SynthesisInstance &inst = run->reduced;
    CgenConfig cfg = bf.cfg;

    // independent per-hole concept pools from the derivation oracle
    std::map<int, std::vector<ExprPtr>> pools;
    for (auto &f : inst.functions)
      for (auto &b : f.sketch.bodies)
        for (auto &h : b.holes) {
          std::set<std::string> s;
          for (auto &nt : h.nts) {
            auto d = derive_set(inst.grammar, nt, inst.size_bound);
            s.insert(d.begin(), d.end());
          }
          for (auto &text : s)
            pools[h.id].push_back(E(text));
        }

    for (const LearnEvent &ev : run->events) {
      if (ev.clause.literals.empty())
        continue; // dead scope: no siblings exist to sample
      ++clauses_checked;
      std::set<int> pinned;
      for (auto &l : ev.clause.literals)
        pinned.insert(l.hole);
      for (int trial = 0; trial < 20; ++trial) {
        Candidate sib = ev.candidate;
        for (auto &fn : sib.fns) {
          const SynthFun *sf = inst.find_fn(fn.fn);
          ASSERT_TRUE(sf);
          bool changed = false;
          for (auto &[hid, concept_expr] : fn.emergent) {
            if (pinned.count(hid) || pools[hid].size() < 2)
              continue;
            concept_expr = pools[hid][rng() % pools[hid].size()];
            changed = true;
          }
          if (changed) {
            Diags diags;
            auto def = complete(sf->sketch.bodies[fn.body_index], fn.emergent, sf->params,
                                sf->ret, sf->measure, diags);
            ASSERT_TRUE(def.has_value());
            fn.def = *def;
          }
        }
        ++replays;
        EXPECT_TRUE(replay_same_violation(ev.cex, sib.defs(), inst, cfg))
            << bf.name << ": " << ev.cex.kind_name() << " cex, clause "
            << ev.clause.str();
      }
    }
  }
  EXPECT_GT(clauses_checked, 100);
  EXPECT_GT(replays, 2000);
}

// --- Criterion 6: retro and proph sequences agree under injected stores ----

TEST(Acceptance, RetroProphSequenceEquivalence) {
  std::mt19937_64 rng(9001);
  for (int trial = 0; trial < 50; ++trial) {
    Grammar g = acceptance_plus_grammar();
    g.terminals["xs"] = Type::IntList;
    g.nonterminals["L"] = {"L", Type::IntList};
    Rule t;
    t.kind = Rule::Kind::Terminal;
    t.nt = "L";
    t.atom = Expr::var("xs");
    g.rules.push_back(t);
    Rule tl;
    tl.kind = Rule::Kind::App;
    tl.nt = "L";
    tl.fn = "tail";
    tl.rhs = {"L"};
    g.rules.push_back(tl);

    std::vector<Hole> holes;
    size_t nholes = 1 + rng() % 3;
    for (size_t h = 0; h < nholes; ++h) {
      bool list = rng() % 2 == 0;
      holes.push_back({(int)h, "?" + std::to_string(h),
                       {list ? "L" : "E"}, list ? Type::IntList : Type::Int});
    }
    long long bound = 2 + rng() % 3;

    std::vector<std::vector<std::string>> per_hole;
    for (auto &h : holes) {
      auto d = derive_set(g, h.nts[0], bound);
      per_hole.emplace_back(d.begin(), d.end());
    }
    ConstraintStore store;
    std::vector<int> order;
    for (auto &h : holes)
      order.push_back(h.id);
    store.register_scope({0}, order);
    size_t nclauses = rng() % 8;
    for (size_t c = 0; c < nclauses; ++c) {
      Clause cl;
      cl.scope = {0};
      std::set<int> used;
      for (size_t l = 0, n = 1 + rng() % holes.size(); l < n; ++l) {
        int h = (int)(rng() % holes.size());
        if (used.count(h) || per_hole[h].empty())
          continue;
        used.insert(h);
        const std::string &text = per_hole[h][rng() % per_hole[h].size()];
        cl.literals.push_back({h, E(text), text});
      }
      if (cl.literals.empty())
        continue;
      std::sort(cl.literals.begin(), cl.literals.end(),
                [](auto &a, auto &b) { return a.hole < b.hole; });
      store.insert(cl);
    }

    auto drain = [&](Variant v, Counters &counters) {
      ConceptSpace cs(g, bound, &counters);
      EmergentSpace es({0}, holes, {}, &cs, &counters);
      std::vector<std::string> out;
      for (;;) {
        if (auto em = es.next(v, &store)) {
          out.push_back(emergent_str(*em));
          continue;
        }
        std::vector<ConceptEvent> events;
        bool more = cs.next(events);
        for (auto &ev : events)
          es.add_concept(ev);
        if (!more && events.empty())
          return out;
      }
    };
    Counters retro_counters, proph_counters;
    auto r = drain(Variant::Retro, retro_counters);
    auto p = drain(Variant::Proph, proph_counters);
    EXPECT_EQ(r, p) << "trial " << trial;
    EXPECT_LE(proph_counters.tuples_materialized, retro_counters.tuples_materialized);
  }
}

// --- Criterion 7: the existential benchmarks and the witness check ---------

TEST(Acceptance, Skolemization) {
  for (auto name : {"prefixb", "monotonic", "prefixmin"}) {
    const SuiteRun *run = find_run(name, Variant::Proph, 1);
    ASSERT_TRUE(run);
    EXPECT_TRUE(run->result.solved()) << name;
  }
  const SuiteRun *pb = find_run("prefixb", Variant::Proph, 1);
  ASSERT_TRUE(pb && pb->result.solved());
  Defs defs = pb->result.solution.defs();
  ASSERT_TRUE(defs.count("prefixb"));
  ASSERT_TRUE(defs.count("suffix"));
  const BenchmarkFile *bf = nullptr;
  for (auto &b : suite())
    if (b.name == "prefixb")
      bf = &b;
  ASSERT_TRUE(bf);
  // exhaustive witness check over the benchmark's own search domain:
  // prefixb(xs, ys) implies ys = append(xs, suffix(xs, ys))
  ExprPtr matrix = E("(=> (prefixb xs ys) (= ys (append xs (suffix xs ys))))");
  auto lists = exhaustive_values(Type::IntList, bf->cfg);
  long long checked = 0;
  for (auto &xs : lists)
    for (auto &ys : lists) {
      Env env{{"xs", xs}, {"ys", ys}};
      EvalOutcome o = eval_matrix(matrix, env, defs, bf->instance.theory);
      ASSERT_TRUE(o.ok()) << xs.str() << " " << ys.str();
      EXPECT_TRUE(o.value.b) << xs.str() << " " << ys.str();
      ++checked;
    }
  EXPECT_EQ(checked, (long long)lists.size() * (long long)lists.size());
}

} // namespace
