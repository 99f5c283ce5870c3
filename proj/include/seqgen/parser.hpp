#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "seqgen/program.hpp"

namespace seqgen {

// Syntax failure with a position. The evaluation harness maps this to the
// Syntax error class.
struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                           ": " + msg),
        line(line_),
        col(col_) {}
};

namespace detail {

enum class Tok { Ident, Int, Float, Str, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t ival = 0;
  double fval = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        id += src_[pos_];
        bump();
      }
      tok_.kind = Tok::Ident;
      tok_.text = std::move(id);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '.'))) {
      lex_number();
      return;
    }
    if (c == '"') {
      lex_string();
      return;
    }
    if (c == '=' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      tok_.kind = Tok::Punct;
      tok_.text = "==";
      bump();
      bump();
      return;
    }
    static const std::string punct = "=(){}[],:";
    if (punct.find(c) != std::string::npos) {
      tok_.kind = Tok::Punct;
      tok_.text = std::string(1, c);
      bump();
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

  void lex_number() {
    std::string num;
    bool is_float = false;
    if (src_[pos_] == '-') {
      num += '-';
      bump();
    }
    auto take_digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        num += src_[pos_];
        bump();
      }
    };
    take_digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      is_float = true;
      num += '.';
      bump();
      take_digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      is_float = true;
      num += src_[pos_];
      bump();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        num += src_[pos_];
        bump();
      }
      take_digits();
    }
    if (is_float) {
      tok_.kind = Tok::Float;
      tok_.fval = std::strtod(num.c_str(), nullptr);
    } else {
      tok_.kind = Tok::Int;
      tok_.ival = std::strtoll(num.c_str(), nullptr, 10);
    }
    tok_.text = std::move(num);
  }

  void lex_string() {
    bump();  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) throw ParseError("unterminated string", tok_.line, tok_.col);
      char c = src_[pos_];
      if (c == '"') {
        bump();
        break;
      }
      if (c == '\\') {
        bump();
        if (pos_ >= src_.size()) throw ParseError("unterminated escape", line_, col_);
        char e = src_[pos_];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: throw ParseError(std::string("unsupported escape '\\") + e + "'", line_, col_);
        }
        bump();
        continue;
      }
      out += c;
      bump();
    }
    tok_.kind = Tok::Str;
    tok_.text = std::move(out);
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {  // comment to end of line
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  Program parse_program() {
    Program p;
    bool saw_if = false;
    while (lex_.peek().kind != Tok::End) {
      Stmt s = parse_stmt(/*allow_if=*/true);
      if (std::holds_alternative<IfStmt>(s)) {
        if (saw_if) throw ParseError("at most one if/else block is allowed", lex_.peek().line, lex_.peek().col);
        saw_if = true;
      }
      p.stmts.push_back(std::move(s));
    }
    return p;
  }

 private:
  Stmt parse_stmt(bool allow_if) {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident && t.text == "if") {
      if (!allow_if) throw ParseError("nested if/else is not allowed", t.line, t.col);
      return parse_if();
    }
    if (t.kind == Tok::Ident && t.text == "RESULT") {
      lex_.next();
      expect_punct("=");
      expect_punct("[");
      ResultStmt r;
      if (!peek_punct("]")) {
        while (true) {
          r.names.push_back(expect_ident("RESULT entries must be variable names"));
          if (peek_punct("]")) break;
          expect_punct(",");
        }
      }
      expect_punct("]");
      return r;
    }
    if (t.kind != Tok::Ident) throw ParseError("expected a statement", t.line, t.col);

    std::string name = lex_.next().text;
    if (is_reserved(name))
      throw ParseError("'" + name + "' is reserved and cannot name a variable", t.line, t.col);
    expect_punct("=");

    // Call or literal: a call is IDENT '(' except for the literal heads
    // tensor(...) and handle(...).
    const Token& rhs = lex_.peek();
    if (rhs.kind == Tok::Ident && rhs.text != "tensor" && rhs.text != "handle" &&
        rhs.text != "true" && rhs.text != "false") {
      CallStmt c;
      c.target = std::move(name);
      c.api = lex_.next().text;
      expect_punct("(");
      if (!peek_punct(")")) {
        while (true) {
          CallArg a;
          a.param = expect_ident("expected a parameter name");
          expect_punct("=");
          a.operand = parse_operand();
          c.args.push_back(std::move(a));
          if (peek_punct(")")) break;
          expect_punct(",");
        }
      }
      expect_punct(")");
      return c;
    }
    return DeclStmt{std::move(name), parse_literal()};
  }

  Stmt parse_if() {
    lex_.next();  // 'if'
    IfStmt f;
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident && t.text == "dim") {
      lex_.next();
      expect_punct("(");
      f.cond.lhs = expect_ident("dim() takes a variable name");
      expect_punct(",");
      const Token& d = lex_.next();
      if (d.kind != Tok::Int) throw ParseError("dim() index must be an integer", d.line, d.col);
      f.cond.dim = static_cast<int>(d.ival);
      expect_punct(")");
    } else {
      f.cond.lhs = expect_ident("expected a condition variable");
      f.cond.dim = -1;
    }
    expect_punct("==");
    f.cond.rhs = parse_operand();
    expect_punct("{");
    while (!peek_punct("}")) f.then_body.push_back(parse_stmt(/*allow_if=*/false));
    expect_punct("}");
    const std::string kw = expect_ident("expected 'else'");
    if (kw != "else") throw ParseError("expected 'else'", lex_.peek().line, lex_.peek().col);
    expect_punct("{");
    while (!peek_punct("}")) f.else_body.push_back(parse_stmt(/*allow_if=*/false));
    expect_punct("}");
    return f;
  }

  Operand parse_operand() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident && t.text != "tensor" && t.text != "handle" && t.text != "true" &&
        t.text != "false") {
      return Operand::name(lex_.next().text);
    }
    return Operand::lit(parse_literal());
  }

  Value parse_literal() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::Int: return Value(lex_.next().ival);
      case Tok::Float: return Value(lex_.next().fval);
      case Tok::Str: return Value(lex_.next().text);
      case Tok::Ident: break;
      case Tok::Punct:
        if (t.text == "{") return parse_record();
        if (t.text == "[") return parse_list();
        throw ParseError("expected a literal", t.line, t.col);
      default: throw ParseError("expected a literal", t.line, t.col);
    }
    if (t.text == "true" || t.text == "false") return Value(lex_.next().text == "true");
    if (t.text == "tensor") return parse_tensor();
    if (t.text == "handle") return parse_handle();
    throw ParseError("expected a literal, got '" + t.text + "'", t.line, t.col);
  }

  Value parse_tensor() {
    lex_.next();  // 'tensor'
    expect_punct("(");
    Tensor out;
    expect_punct("[");
    if (!peek_punct("]")) {
      while (true) {
        const Token& d = lex_.next();
        if (d.kind != Tok::Int) throw ParseError("tensor shape entries must be integers", d.line, d.col);
        out.shape.push_back(d.ival);
        if (peek_punct("]")) break;
        expect_punct(",");
      }
    }
    expect_punct("]");
    expect_punct(",");
    expect_punct("[");
    if (!peek_punct("]")) {
      while (true) {
        const Token& d = lex_.next();
        if (d.kind == Tok::Int) out.data.push_back(static_cast<double>(d.ival));
        else if (d.kind == Tok::Float) out.data.push_back(d.fval);
        else throw ParseError("tensor data entries must be numbers", d.line, d.col);
        if (peek_punct("]")) break;
        expect_punct(",");
      }
    }
    expect_punct("]");
    expect_punct(")");
    const auto n = static_cast<std::int64_t>(out.data.size());
    if (out.numel() != n)
      throw ParseError("tensor data length does not match its shape", lex_.peek().line, lex_.peek().col);
    return Value(std::move(out));
  }

  Value parse_handle() {
    lex_.next();  // 'handle'
    expect_punct("(");
    const Token& k = lex_.next();
    if (k.kind != Tok::Str) throw ParseError("handle kind must be a string", k.line, k.col);
    expect_punct(",");
    const Token& s = lex_.next();
    if (s.kind != Tok::Int) throw ParseError("handle serial must be an integer", s.line, s.col);
    expect_punct(")");
    return Value(Handle{k.text, s.ival});
  }

  Value parse_record() {
    expect_punct("{");
    Record r;
    if (!peek_punct("}")) {
      while (true) {
        const Token& k = lex_.next();
        if (k.kind != Tok::Str) throw ParseError("record keys must be strings", k.line, k.col);
        expect_punct(":");
        r[k.text] = parse_literal();
        if (peek_punct("}")) break;
        expect_punct(",");
      }
    }
    expect_punct("}");
    return Value(std::move(r));
  }

  Value parse_list() {
    expect_punct("[");
    List l;
    if (!peek_punct("]")) {
      while (true) {
        l.push_back(parse_literal());
        if (peek_punct("]")) break;
        expect_punct(",");
      }
    }
    expect_punct("]");
    return Value(std::move(l));
  }

  static bool is_reserved(const std::string& s) {
    return s == "if" || s == "else" || s == "true" || s == "false" || s == "tensor" ||
           s == "handle" || s == "dim" || s == "RESULT";
  }

  bool peek_punct(const char* p) const {
    return lex_.peek().kind == Tok::Punct && lex_.peek().text == p;
  }

  void expect_punct(const char* p) {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Punct || t.text != p)
      throw ParseError(std::string("expected '") + p + "', got '" + t.text + "'", t.line, t.col);
    lex_.next();
  }

  std::string expect_ident(const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Ident) throw ParseError(what, t.line, t.col);
    return lex_.next().text;
  }

  Lexer lex_;
};

}  // namespace detail

// Parses candidate source into program IR. Throws ParseError (with line/col)
// on malformed input; structural rules enforced: at most one if/else, no
// nesting.
inline Program parse_candidate(const std::string& source) {
  detail::Parser p(source);
  return p.parse_program();
}

// Strips a Markdown code fence if the text is wrapped in one; returns the
// inner text otherwise unchanged. Provider adapters use this before parsing
// model output.
inline std::string strip_code_fence(const std::string& text) {
  auto first = text.find("```");
  if (first == std::string::npos) return text;
  auto line_end = text.find('\n', first);
  if (line_end == std::string::npos) return text;
  auto close = text.find("```", line_end + 1);
  if (close == std::string::npos) return text;
  return text.substr(line_end + 1, close - line_end - 1);
}

}  // namespace seqgen
