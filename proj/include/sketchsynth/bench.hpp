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

#ifndef SKETCHSYNTH_BENCH_HPP
#define SKETCHSYNTH_BENCH_HPP

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sketchsynth/driver.hpp"

namespace synth {

// A parsed benchmark: the synthesis instance plus metadata (name, whether a
// solution is expected, and suggested counterexample-search overrides).
struct BenchmarkFile {
  std::string name;
  bool expected_solvable = true;
  CgenConfig cfg;
  SynthesisInstance instance;
};

namespace benchdetail {

struct Parser {
  Diags &diags;
  std::map<std::string, int> hole_ids;
  std::map<int, std::string> hole_names;
  int next_hole = 0;
  const Grammar *grammar = nullptr;

  explicit Parser(Diags &d) : diags(d) {}

  bool err(const Sexpr &at, const std::string &m) {
    diags.push_back({m, at.line, at.col});
    return false;
  }

  ExprPtr parse_expr(const Sexpr &s, bool allow_holes) {
    if (s.is_int())
      return Expr::int_const(s.num);
    if (s.is_sym()) {
      if (s.sym == "true")
        return Expr::bool_const(true);
      if (s.sym == "false")
        return Expr::bool_const(false);
      if (s.sym == "nil")
        return Expr::nil();
      if (!s.sym.empty() && s.sym[0] == '?') {
        if (!allow_holes) {
          err(s, "hole reference outside a sketch");
          return nullptr;
        }
        auto it = hole_ids.find(s.sym);
        if (it == hole_ids.end()) {
          err(s, "hole " + s.sym + " is not declared in :holes");
          return nullptr;
        }
        return Expr::hole(it->second);
      }
      return Expr::var(s.sym);
    }
    if (s.size() == 0) {
      err(s, "empty application");
      return nullptr;
    }
    if (!s[0].is_sym()) {
      err(s[0], "expected a function symbol");
      return nullptr;
    }
    const std::string &head = s[0].sym;
    if (head == "if") {
      if (s.size() != 4) {
        err(s, "if takes 3 arguments");
        return nullptr;
      }
      auto c = parse_expr(s[1], allow_holes);
      auto t = parse_expr(s[2], allow_holes);
      auto f = parse_expr(s[3], allow_holes);
      if (!c || !t || !f)
        return nullptr;
      return Expr::mkif(c, t, f);
    }
    if (head == "list") {
      ExprPtr acc = Expr::nil();
      for (size_t i = s.size(); i-- > 1;) {
        auto e = parse_expr(s[i], allow_holes);
        if (!e)
          return nullptr;
        acc = Expr::call("cons", {e, acc});
      }
      return acc;
    }
    std::vector<ExprPtr> args;
    for (size_t i = 1; i < s.size(); ++i) {
      auto a = parse_expr(s[i], allow_holes);
      if (!a)
        return nullptr;
      args.push_back(a);
    }
    return Expr::call(head, std::move(args));
  }

  bool parse_grammar(const Sexpr &s, Grammar &g) {
    for (size_t i = 1; i < s.size(); ++i) {
      const Sexpr &decl = s[i];
      if (!decl.is_list() || decl.size() < 2 || !decl[0].is_sym() || !decl[1].is_sym())
        return err(decl, "expected (NT :type production...)");
      auto t = parse_type(decl[1].sym);
      if (!t)
        return err(decl[1], "unknown type " + decl[1].sym);
      const std::string nt = decl[0].sym;
      if (g.nonterminals.count(nt))
        return err(decl[0], "duplicate non-terminal " + nt);
      g.nonterminals[nt] = {nt, *t};
      for (size_t p = 2; p < decl.size(); ++p) {
        const Sexpr &prod = decl[p];
        Rule r;
        r.nt = nt;
        if (prod.is_list()) {
          if (prod.size() == 0 || !prod[0].is_sym())
            return err(prod, "expected (fn NT...)");
          r.kind = Rule::Kind::App;
          r.fn = prod[0].sym;
          for (size_t a = 1; a < prod.size(); ++a) {
            if (!prod[a].is_sym())
              return err(prod[a], "expected a non-terminal name");
            r.rhs.push_back(prod[a].sym);
          }
        } else {
          r.kind = Rule::Kind::Terminal;
          auto atom = parse_expr(prod, false);
          if (!atom)
            return false;
          if (atom->kind == Expr::Kind::Var)
            g.terminals[atom->name] = *t; // typed by the producing non-terminal
          r.atom = atom;
        }
        g.rules.push_back(std::move(r));
      }
    }
    return true;
  }

  bool parse_params(const Sexpr &s, std::vector<Param> &out) {
    if (!s.is_list())
      return err(s, "expected a parameter list");
    for (size_t i = 0; i < s.size(); ++i) {
      const Sexpr &p = s[i];
      if (!p.is_list() || p.size() != 2 || !p[0].is_sym() || !p[1].is_sym())
        return err(p, "expected (name :type)");
      auto t = parse_type(p[1].sym);
      if (!t)
        return err(p[1], "unknown type " + p[1].sym);
      out.push_back({p[0].sym, *t});
    }
    return true;
  }

  bool parse_holes(const Sexpr &s, std::vector<Hole> &out) {
    if (!s.is_list())
      return err(s, "expected a hole list");
    for (size_t i = 0; i < s.size(); ++i) {
      const Sexpr &h = s[i];
      if (!h.is_list() || h.size() < 2 || !h[0].is_sym())
        return err(h, "expected (?hole NT...)");
      const std::string &hname = h[0].sym;
      if (hname.empty() || hname[0] != '?')
        return err(h[0], "hole names start with '?'");
      if (hole_ids.count(hname))
        return err(h[0], "hole " + hname + " is declared twice");
      Hole hole;
      hole.id = next_hole++;
      hole.name = hname;
      hole_ids[hname] = hole.id;
      hole_names[hole.id] = hname;
      for (size_t n = 1; n < h.size(); ++n) {
        if (!h[n].is_sym())
          return err(h[n], "expected a non-terminal name");
        hole.nts.push_back(h[n].sym);
      }
      if (grammar) {
        const NonTerminal *nt = grammar->find_nt(hole.nts[0]);
        if (!nt)
          return err(h[1], "unknown non-terminal " + hole.nts[0]);
        hole.type = nt->type;
      }
      out.push_back(std::move(hole));
    }
    return true;
  }

  // Collects keyword arguments (:kw value ...) starting at index `from`.
  bool parse_keywords(const Sexpr &s, size_t from, std::map<std::string, const Sexpr *> &out) {
    for (size_t i = from; i < s.size(); i += 2) {
      if (!s[i].is_sym() || s[i].sym.empty() || s[i].sym[0] != ':')
        return err(s[i], "expected a :keyword");
      if (i + 1 >= s.size())
        return err(s[i], s[i].sym + " needs a value");
      out[s[i].sym] = &s[i + 1];
    }
    return true;
  }

  // Builds sketch bodies from a :sketch value and the declared holes: each
  // body owns the declared holes that occur in it, in document order.
  bool build_bodies(const Sexpr &sketches, const std::vector<Hole> &declared,
                    const std::string &owner, std::vector<SketchBody> &out) {
    if (!sketches.is_list() || sketches.size() == 0)
      return err(sketches, ":sketch takes a non-empty list of bodies");
    std::map<int, const Hole *> by_id;
    for (auto &h : declared)
      by_id[h.id] = &h;
    std::set<int> used;
    for (size_t b = 0; b < sketches.size(); ++b) {
      auto skeleton = parse_expr(sketches[b], true);
      if (!skeleton)
        return false;
      SketchBody body;
      body.owner = owner;
      body.skeleton = skeleton;
      std::vector<int> occ;
      collect_holes(skeleton, occ);
      for (int id : occ) {
        auto it = by_id.find(id);
        if (it == by_id.end())
          return err(sketches[b], "hole ?" + std::to_string(id) + " is not declared here");
        body.holes.push_back(*it->second);
        used.insert(id);
      }
      out.push_back(std::move(body));
    }
    for (auto &h : declared)
      if (!used.count(h.id))
        return err(sketches, "declared hole " + h.name + " is unused");
    return true;
  }

  bool parse_synth_fun(const Sexpr &s, SynthFun &fn) {
    if (s.size() < 4 || !s[1].is_sym())
      return err(s, "expected (synth-fun name ((x :type)...) :ret ...)");
    fn.name = s[1].sym;
    if (!parse_params(s[2], fn.params))
      return false;
    if (!s[3].is_sym())
      return err(s[3], "expected a return type");
    auto rt = parse_type(s[3].sym);
    if (!rt)
      return err(s[3], "unknown type " + s[3].sym);
    fn.ret = *rt;
    std::map<std::string, const Sexpr *> kw;
    if (!parse_keywords(s, 4, kw))
      return false;
    if (!kw.count(":sketch") || !kw.count(":holes"))
      return err(s, "synth-fun needs :sketch and :holes");
    std::vector<Hole> declared;
    if (!parse_holes(*kw[":holes"], declared))
      return false;
    fn.sketch.owner = fn.name;
    if (!build_bodies(*kw[":sketch"], declared, fn.name, fn.sketch.bodies))
      return false;
    if (kw.count(":measure")) {
      fn.measure = parse_expr(*kw[":measure"], false);
      if (!fn.measure)
        return false;
    } else {
      return err(s, "synth-fun needs a :measure");
    }
    return true;
  }

  bool parse_formula(const Sexpr &s, Property &p) {
    if (s.is_list() && s.size() >= 1 && (s[0].is_sym("forall") || s[0].is_sym("exists"))) {
      if (s.size() != 3)
        return err(s, s[0].sym + " takes a binding list and a body");
      bool existential = s[0].is_sym("exists");
      const Sexpr &binds = s[1];
      if (!binds.is_list() || binds.size() == 0)
        return err(binds, "expected a non-empty binding list");
      for (size_t i = 0; i < binds.size(); ++i) {
        const Sexpr &b = binds[i];
        if (!b.is_list() || b.size() < 2 || !b[0].is_sym() || !b[1].is_sym())
          return err(b, "expected (name :type ...)");
        QuantVar q;
        q.quant = existential ? Quant::Exists : Quant::Forall;
        q.name = b[0].sym;
        auto t = parse_type(b[1].sym);
        if (!t)
          return err(b[1], "unknown type " + b[1].sym);
        q.type = *t;
        if (existential) {
          std::map<std::string, const Sexpr *> kw;
          if (!parse_keywords(b, 2, kw))
            return false;
          if (!kw.count(":sketch") || !kw.count(":holes"))
            return err(b, "existential '" + q.name + "' needs :sketch and :holes");
          std::vector<Hole> declared;
          if (!parse_holes(*kw[":holes"], declared))
            return false;
          MultiSketch ms;
          ms.owner = q.name;
          if (!build_bodies(*kw[":sketch"], declared, q.name, ms.bodies))
            return false;
          q.sketch = std::move(ms);
          if (kw.count(":measure")) {
            q.measure = parse_expr(*kw[":measure"], false);
            if (!q.measure)
              return false;
          }
        } else if (b.size() != 2) {
          return err(b, "universal bindings are (name :type)");
        }
        p.prefix.push_back(std::move(q));
      }
      return parse_formula(s[2], p);
    }
    p.matrix = parse_expr(s, false);
    if (!p.matrix)
      return false;
    std::vector<std::string> bad;
    std::function<void(const ExprPtr &)> scan = [&](const ExprPtr &e) {
      if (e->kind == Expr::Kind::Call && (e->name == "forall" || e->name == "exists"))
        bad.push_back(e->name);
      for (auto &a : e->args)
        scan(a);
    };
    scan(p.matrix);
    if (!bad.empty())
      return err(s, "properties must be in prenex form");
    return true;
  }
};

} // namespace benchdetail

inline std::optional<BenchmarkFile> parse_benchmark(const std::string &text, Diags &diags) {
  std::vector<Sexpr> items;
  SexprReader reader(text);
  if (!reader.read_all(items, diags))
    return std::nullopt;
  if (items.empty()) {
    diags.push_back({"empty benchmark file"});
    return std::nullopt;
  }
  BenchmarkFile out;
  out.instance.theory = standard_theory();
  benchdetail::Parser P(diags);

  // the grammar is shared by every sketch, so resolve it first
  const Sexpr *grammar_item = nullptr;
  for (auto &it : items)
    if (it.is_list() && it.size() >= 1 && it[0].is_sym("grammar")) {
      if (grammar_item) {
        diags.push_back({"more than one grammar", it.line, it.col});
        return std::nullopt;
      }
      grammar_item = &it;
    }
  if (!grammar_item) {
    diags.push_back({"benchmark has no grammar"});
    return std::nullopt;
  }
  if (!P.parse_grammar(*grammar_item, out.instance.grammar))
    return std::nullopt;
  P.grammar = &out.instance.grammar;

  for (const Sexpr &it : items) {
    if (!it.is_list() || it.size() == 0 || !it[0].is_sym()) {
      diags.push_back({"expected a top-level form", it.line, it.col});
      return std::nullopt;
    }
    const std::string &head = it[0].sym;
    if (head == "grammar")
      continue;
    if (head == "name") {
      if (it.size() != 2 || !it[1].is_sym()) {
        diags.push_back({"expected (name symbol)", it.line, it.col});
        return std::nullopt;
      }
      out.name = it[1].sym;
    } else if (head == "solvable") {
      if (it.size() != 2 || !it[1].is_sym()) {
        diags.push_back({"expected (solvable true|false)", it.line, it.col});
        return std::nullopt;
      }
      out.expected_solvable = it[1].sym == "true";
    } else if (head == "config") {
      for (size_t i = 1; i < it.size(); ++i) {
        const Sexpr &c = it[i];
        if (!c.is_list() || c.size() != 2 || !c[0].is_sym() || !c[1].is_int()) {
          diags.push_back({"expected (key N) config entries", c.line, c.col});
          return std::nullopt;
        }
        if (c[0].sym == "cex-int-bound")
          out.cfg.int_bound = c[1].num;
        else if (c[0].sym == "cex-list-len")
          out.cfg.list_len = c[1].num;
        else if (c[0].sym == "cex-samples")
          out.cfg.random_samples = (int)c[1].num;
        else if (c[0].sym == "budget")
          out.cfg.budget = c[1].num;
        else {
          diags.push_back({"unknown config key " + c[0].sym, c.line, c.col});
          return std::nullopt;
        }
      }
    } else if (head == "size-bound") {
      if (it.size() != 2 || !it[1].is_int()) {
        diags.push_back({"expected (size-bound N)", it.line, it.col});
        return std::nullopt;
      }
      out.instance.size_bound = it[1].num;
    } else if (head == "synth-fun") {
      SynthFun fn;
      if (!P.parse_synth_fun(it, fn))
        return std::nullopt;
      out.instance.functions.push_back(std::move(fn));
    } else if (head == "property") {
      if (it.size() != 2) {
        diags.push_back({"expected (property formula)", it.line, it.col});
        return std::nullopt;
      }
      Property p;
      if (!P.parse_formula(it[1], p))
        return std::nullopt;
      out.instance.properties.push_back(std::move(p));
    } else if (head == "test") {
      if (it.size() != 2) {
        diags.push_back({"expected (test expr)", it.line, it.col});
        return std::nullopt;
      }
      TestSentence t;
      t.expr = P.parse_expr(it[1], false);
      if (!t.expr)
        return std::nullopt;
      out.instance.tests.push_back(std::move(t));
    } else {
      diags.push_back({"unknown form (" + head + " ...)", it.line, it.col});
      return std::nullopt;
    }
  }
  if (out.instance.functions.empty()) {
    diags.push_back({"benchmark declares no synth-fun"});
    return std::nullopt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

// expr_print with hole names ("?h1") substituted for hole ids when a name
// map is supplied.
inline void expr_print_named(std::ostream &os, const ExprPtr &e,
                             const std::map<int, std::string> *names) {
  if (e->kind == Expr::Kind::Hole && names) {
    auto it = names->find(e->hole_id);
    os << (it == names->end() ? "?" + std::to_string(e->hole_id) : it->second);
    return;
  }
  switch (e->kind) {
  case Expr::Kind::If:
    os << "(if";
    for (auto &a : e->args) {
      os << " ";
      expr_print_named(os, a, names);
    }
    os << ")";
    return;
  case Expr::Kind::Call:
    os << "(" << e->name;
    for (auto &a : e->args) {
      os << " ";
      expr_print_named(os, a, names);
    }
    os << ")";
    return;
  default:
    expr_print(os, e);
  }
}

namespace benchdetail {

inline void print_sketch_kw(std::ostream &os, const MultiSketch &ms, const ExprPtr &measure,
                            const std::string &indent) {
  if (measure) {
    os << indent << ":measure ";
    expr_print_named(os, measure, nullptr);
    os << "\n";
  }
  std::map<int, std::string> names;
  for (auto &b : ms.bodies)
    for (auto &h : b.holes)
      names[h.id] = h.name;
  os << indent << ":sketch (";
  for (size_t i = 0; i < ms.bodies.size(); ++i) {
    if (i)
      os << "\n" << indent << "         ";
    expr_print_named(os, ms.bodies[i].skeleton, &names);
  }
  os << ")\n" << indent << ":holes (";
  bool first = true;
  for (auto &b : ms.bodies)
    for (auto &h : b.holes) {
      if (!first)
        os << " ";
      first = false;
      os << "(" << h.name;
      for (auto &n : h.nts)
        os << " " << n;
      os << ")";
    }
  os << ")";
}

} // namespace benchdetail

inline std::string print_benchmark(const BenchmarkFile &bf) {
  std::ostringstream os;
  if (!bf.name.empty())
    os << "(name " << bf.name << ")\n";
  os << "(solvable " << (bf.expected_solvable ? "true" : "false") << ")\n";
  os << "(config (cex-int-bound " << bf.cfg.int_bound << ") (cex-list-len " << bf.cfg.list_len
     << ") (cex-samples " << bf.cfg.random_samples << ") (budget " << bf.cfg.budget << "))\n";
  os << "(size-bound " << bf.instance.size_bound << ")\n";
  os << "(grammar";
  // group rules back under their non-terminals, in first-rule order
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Rule *>> by_nt;
  for (auto &r : bf.instance.grammar.rules) {
    if (!by_nt.count(r.nt))
      order.push_back(r.nt);
    by_nt[r.nt].push_back(&r);
  }
  for (auto &nt : order) {
    os << "\n  (" << nt << " " << type_name(bf.instance.grammar.find_nt(nt)->type);
    for (const Rule *r : by_nt[nt]) {
      os << " ";
      if (r->kind == Rule::Kind::Terminal)
        expr_print(os, r->atom);
      else {
        os << "(" << r->fn;
        for (auto &m : r->rhs)
          os << " " << m;
        os << ")";
      }
    }
    os << ")";
  }
  os << ")\n";
  for (auto &fn : bf.instance.functions) {
    os << "(synth-fun " << fn.name << " (";
    for (size_t i = 0; i < fn.params.size(); ++i) {
      if (i)
        os << " ";
      os << "(" << fn.params[i].name << " " << type_name(fn.params[i].type) << ")";
    }
    os << ") " << type_name(fn.ret) << "\n";
    benchdetail::print_sketch_kw(os, fn.sketch, fn.measure, "  ");
    os << ")\n";
  }
  for (auto &p : bf.instance.properties) {
    os << "(property ";
    std::string close;
    size_t i = 0;
    while (i < p.prefix.size()) {
      Quant q = p.prefix[i].quant;
      os << "(" << (q == Quant::Forall ? "forall" : "exists") << " (";
      bool first = true;
      for (; i < p.prefix.size() && p.prefix[i].quant == q; ++i) {
        if (!first)
          os << " ";
        first = false;
        const QuantVar &v = p.prefix[i];
        os << "(" << v.name << " " << type_name(v.type);
        if (v.sketch) {
          os << "\n";
          benchdetail::print_sketch_kw(os, *v.sketch, v.measure, "    ");
        }
        os << ")";
      }
      os << ")\n  ";
      close += ")";
    }
    expr_print(os, p.matrix);
    os << close << ")\n";
  }
  for (auto &t : bf.instance.tests) {
    os << "(test ";
    expr_print(os, t.expr);
    os << ")\n";
  }
  return os.str();
}

// definec-style rendering of a synthesized definition.
inline std::string definec_str(const FnDef &def) {
  std::ostringstream os;
  os << "(definec " << def.name << " (";
  for (size_t i = 0; i < def.params.size(); ++i) {
    if (i)
      os << " ";
    os << def.params[i].name << " " << type_name(def.params[i].type);
  }
  os << ") " << type_name(def.ret) << "\n    ";
  expr_print(os, def.body);
  os << ")";
  return os.str();
}

} // namespace synth

#endif // SKETCHSYNTH_BENCH_HPP
