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

#ifndef SKETCHSYNTH_SEXPR_HPP
#define SKETCHSYNTH_SEXPR_HPP

#include <cctype>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace synth {

// A located diagnostic. line/col are 1-based; -1 means "no location".
struct Diag {
  std::string msg;
  int line = -1;
  int col = -1;

  std::string str() const {
    if (line < 0)
      return msg;
    std::ostringstream os;
    os << line << ":" << col << ": " << msg;
    return os.str();
  }
};

using Diags = std::vector<Diag>;

// Surface syntax datum: symbol, integer, or list.
struct Sexpr {
  enum class Kind { Sym, Int, List };
  Kind kind = Kind::Sym;
  std::string sym;
  long long num = 0;
  std::vector<Sexpr> items;
  int line = -1;
  int col = -1;

  bool is_sym() const { return kind == Kind::Sym; }
  bool is_sym(const std::string &s) const { return kind == Kind::Sym && sym == s; }
  bool is_int() const { return kind == Kind::Int; }
  bool is_list() const { return kind == Kind::List; }
  size_t size() const { return items.size(); }
  const Sexpr &operator[](size_t i) const { return items[i]; }

  std::string str() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

  void print(std::ostream &os) const {
    switch (kind) {
    case Kind::Sym:
      os << sym;
      break;
    case Kind::Int:
      os << num;
      break;
    case Kind::List:
      os << "(";
      for (size_t i = 0; i < items.size(); ++i) {
        if (i)
          os << " ";
        items[i].print(os);
      }
      os << ")";
      break;
    }
  }

  static Sexpr mksym(std::string s) {
    Sexpr e;
    e.kind = Kind::Sym;
    e.sym = std::move(s);
    return e;
  }
  static Sexpr mkint(long long v) {
    Sexpr e;
    e.kind = Kind::Int;
    e.num = v;
    return e;
  }
  static Sexpr mklist(std::vector<Sexpr> xs) {
    Sexpr e;
    e.kind = Kind::List;
    e.items = std::move(xs);
    return e;
  }
};

// Reads a sequence of top-level s-expressions. Comments run from ';' to
// end of line. Returns false and pushes a diagnostic on malformed input.
class SexprReader {
public:
  explicit SexprReader(std::string text) : text_(std::move(text)) {}

  bool read_all(std::vector<Sexpr> &out, Diags &diags) {
    for (;;) {
      skip_ws();
      if (eof())
        return true;
      Sexpr e;
      if (!read(e, diags))
        return false;
      out.push_back(std::move(e));
    }
  }

private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  static bool atom_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != ';';
  }

  bool read(Sexpr &out, Diags &diags) {
    skip_ws();
    if (eof()) {
      diags.push_back({"unexpected end of input", line_, col_});
      return false;
    }
    int l = line_, c = col_;
    if (peek() == '(') {
      advance();
      std::vector<Sexpr> items;
      for (;;) {
        skip_ws();
        if (eof()) {
          diags.push_back({"unterminated list", l, c});
          return false;
        }
        if (peek() == ')') {
          advance();
          out = Sexpr::mklist(std::move(items));
          out.line = l;
          out.col = c;
          return true;
        }
        Sexpr e;
        if (!read(e, diags))
          return false;
        items.push_back(std::move(e));
      }
    }
    if (peek() == ')') {
      diags.push_back({"unexpected ')'", l, c});
      return false;
    }
    std::string tok;
    while (!eof() && atom_char(peek())) {
      tok.push_back(peek());
      advance();
    }
    bool numeric = !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) ||
                                    (tok.size() > 1 && tok[0] == '-' &&
                                     std::isdigit(static_cast<unsigned char>(tok[1]))));
    if (numeric) {
      try {
        out = Sexpr::mkint(std::stoll(tok));
      } catch (const std::exception &) {
        diags.push_back({"integer literal out of range: " + tok, l, c});
        return false;
      }
    } else {
      out = Sexpr::mksym(tok);
    }
    out.line = l;
    out.col = c;
    return true;
  }

  std::string text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

} // namespace synth

#endif // SKETCHSYNTH_SEXPR_HPP
