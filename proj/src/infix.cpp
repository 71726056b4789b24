// Copyright 2026 The srforge Authors. All Rights Reserved.
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

#include "srforge/infix.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <utility>

namespace srforge {
namespace {

enum class Lex { kEnd, kNumber, kName, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen };

struct Lexeme {
  Lex kind = Lex::kEnd;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Lexeme> lex(std::string_view s) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      out.push_back({Lex::kNumber, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Lex::kName, std::string(s.substr(start, i - start)), start});
      continue;
    }
    Lex k = Lex::kEnd;
    switch (c) {
      case '+': k = Lex::kPlus; break;
      case '-': k = Lex::kMinus; break;
      case '*':
        if (i + 1 < s.size() && s[i + 1] == '*') {
          out.push_back({Lex::kCaret, "**", start});
          i += 2;
          continue;
        }
        k = Lex::kStar;
        break;
      case '/': k = Lex::kSlash; break;
      case '^': k = Lex::kCaret; break;
      case '(': k = Lex::kLParen; break;
      case ')': k = Lex::kRParen; break;
      default:
        throw InfixParseError(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, std::string(1, c), start});
    ++i;
  }
  out.push_back({Lex::kEnd, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lexemes_(lex(text)) {}

  ExprNode parse() {
    ExprNode n = sum();
    if (peek().kind != Lex::kEnd) throw InfixParseError(peek().pos, "unexpected '" + peek().text + "'");
    return n;
  }

 private:
  struct Operand {
    ExprNode node;
    bool literal_one = false;
  };

  const Lexeme& peek() const { return lexemes_[pos_]; }
  const Lexeme& take() { return lexemes_[pos_++]; }

  void expect(Lex k, const char* what) {
    if (peek().kind != k) throw InfixParseError(peek().pos, std::string("expected ") + what);
    ++pos_;
  }

  ExprNode sum() {
    ExprNode lhs = product();
    while (peek().kind == Lex::kPlus || peek().kind == Lex::kMinus) {
      const bool minus = take().kind == Lex::kMinus;
      ExprNode rhs = product();
      if (minus) rhs = ExprNode{Token::kNeg, {std::move(rhs)}};
      lhs = ExprNode{Token::kAdd, {std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }

  ExprNode product() {
    Operand first = prefix();
    ExprNode lhs = std::move(first.node);
    bool unit_numerator = first.literal_one;
    while (peek().kind == Lex::kStar || peek().kind == Lex::kSlash) {
      const bool divide = take().kind == Lex::kSlash;
      ExprNode rhs = prefix().node;
      if (divide) {
        rhs = ExprNode{Token::kInv, {std::move(rhs)}};
        if (unit_numerator) {
          lhs = std::move(rhs);
          unit_numerator = false;
          continue;
        }
      }
      unit_numerator = false;
      lhs = ExprNode{Token::kMul, {std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }

  Operand prefix() {
    if (peek().kind == Lex::kMinus) {
      take();
      return {ExprNode{Token::kNeg, {prefix().node}}, false};
    }
    return power();
  }

  Operand power() {
    Operand base = primary();
    if (peek().kind == Lex::kCaret) {
      take();
      const Lexeme& e = take();
      if (e.kind != Lex::kNumber || (e.text != "2" && e.text != "3")) {
        throw InfixParseError(e.pos, "only ^2 and ^3 are supported");
      }
      const Token op = e.text == "2" ? Token::kSq : Token::kCb;
      return {ExprNode{op, {std::move(base.node)}}, false};
    }
    return base;
  }

  Operand primary() {
    const Lexeme& t = take();
    switch (t.kind) {
      case Lex::kNumber: {
        char* end = nullptr;
        const double v = std::strtod(t.text.c_str(), &end);
        if (end != t.text.c_str() + t.text.size()) throw InfixParseError(t.pos, "malformed number");
        return {ExprNode{Token::kConst, {}}, v == 1.0};
      }
      case Lex::kLParen: {
        ExprNode inner = sum();
        expect(Lex::kRParen, "')'");
        return {std::move(inner), false};
      }
      case Lex::kName: {
        static const std::pair<const char*, Token> kFuncs[] = {{"sin", Token::kSin},
                                                               {"cos", Token::kCos},
                                                               {"log", Token::kLog},
                                                               {"ln", Token::kLog},
                                                               {"exp", Token::kExp},
                                                               {"sqrt", Token::kSqrt}};
        for (const auto& [name, tok] : kFuncs) {
          if (t.text == name) {
            expect(Lex::kLParen, "'(' after function name");
            ExprNode arg = sum();
            expect(Lex::kRParen, "')'");
            return {ExprNode{tok, {std::move(arg)}}, false};
          }
        }
        if (t.text == "pi") return {ExprNode{Token::kConst, {}}, false};
        const auto tok = token_from_name(t.text);
        if (!tok || !is_leaf(*tok)) throw InfixParseError(t.pos, "unknown identifier '" + t.text + "'");
        return {ExprNode{*tok, {}}, false};
      }
      case Lex::kEnd:
        throw InfixParseError(t.pos, "unexpected end of input");
      default:
        throw InfixParseError(t.pos, "unexpected '" + t.text + "'");
    }
  }

  std::vector<Lexeme> lexemes_;
  std::size_t pos_ = 0;
};

enum Prec { kSum = 1, kProduct = 2, kPrefix = 3, kPower = 4, kAtom = 5 };

struct Printed {
  std::string text;
  int prec;
};

Printed print(const ExprNode& n);

std::string at_least(const ExprNode& n, int prec) {
  Printed p = print(n);
  return p.prec >= prec ? p.text : "(" + p.text + ")";
}

Printed print(const ExprNode& n) {
  switch (n.token) {
    case Token::kAdd: {
      const ExprNode& rhs = n.children[1];
      if (rhs.token == Token::kNeg) {
        return {at_least(n.children[0], kSum) + " - " + at_least(rhs.children[0], kProduct), kSum};
      }
      return {at_least(n.children[0], kSum) + " + " + at_least(rhs, kProduct), kSum};
    }
    case Token::kMul: {
      const ExprNode& rhs = n.children[1];
      if (rhs.token == Token::kInv) {
        return {at_least(n.children[0], kProduct) + " / " + at_least(rhs.children[0], kPrefix),
                kProduct};
      }
      return {at_least(n.children[0], kProduct) + " * " + at_least(rhs, kPrefix), kProduct};
    }
    case Token::kInv:
      return {"1/" + at_least(n.children[0], kPrefix), kProduct};
    case Token::kNeg:
      return {"-" + at_least(n.children[0], kPrefix), kPrefix};
    case Token::kSq:
      return {at_least(n.children[0], kAtom) + "^2", kPower};
    case Token::kCb:
      return {at_least(n.children[0], kAtom) + "^3", kPower};
    case Token::kSin:
    case Token::kCos:
    case Token::kLog:
    case Token::kExp:
    case Token::kSqrt:
      return {std::string(token_name(n.token)) + "(" + print(n.children[0]).text + ")", kAtom};
    default:
      return {std::string(token_name(n.token)), kAtom};
  }
}

}  // namespace

ExprTree parse_infix(std::string_view text) { return ExprTree(Parser(text).parse()); }

std::string print_infix(const ExprTree& tree) { return print(tree.root()).text; }

ExprTree parse_expression(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string word;
  bool all_tokens = true;
  bool any = false;
  while (in >> word) {
    any = true;
    const auto t = token_from_name(word);
    if (!t || is_special(*t)) {
      all_tokens = false;
      break;
    }
  }
  if (any && all_tokens) {
    const TokenSequence seq = sequence_from_text(text);
    // A lone leaf name is valid both ways and parses identically.
    return preorder_parse(seq);
  }
  return parse_infix(text);
}

}  // namespace srforge
