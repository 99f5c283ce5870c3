#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "seqgen/value.hpp"

namespace seqgen {

// Operand position in a call argument or condition: a variable reference or a
// literal value.
struct Operand {
  std::variant<std::string, Value> v;

  bool is_ref() const { return v.index() == 0; }
  const std::string& ref() const { return std::get<std::string>(v); }
  const Value& literal() const { return std::get<Value>(v); }

  static Operand name(std::string n) { return Operand{std::move(n)}; }
  static Operand lit(Value val) { return Operand{std::move(val)}; }
};

inline bool operand_equal(const Operand& a, const Operand& b, double tol = kFloatTolerance) {
  if (a.is_ref() != b.is_ref()) return false;
  return a.is_ref() ? a.ref() == b.ref() : approx_equal(a.literal(), b.literal(), tol);
}

struct CallArg {
  std::string param;
  Operand operand;
};

// `name = <literal>`: an initialization-style constant binding.
struct DeclStmt {
  std::string name;
  Value value;
};

// `target = api(param=operand, ...)`
struct CallStmt {
  std::string target;
  std::string api;
  std::vector<CallArg> args;
};

// `RESULT = [names...]` — collects the listed variables, in order, skipping
// names unbound on the executed path.
struct ResultStmt {
  std::vector<std::string> names;
};

struct IfStmt;

using Stmt = std::variant<DeclStmt, CallStmt, ResultStmt, IfStmt>;

// Branch condition. dim < 0 compares the variable itself for equality
// (tolerance applies to floats); dim >= 0 compares size of that tensor
// dimension against the right-hand side.
struct Condition {
  std::string lhs;
  int dim = -1;
  Operand rhs;
};

struct IfStmt {
  Condition cond;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
};

struct Program {
  std::vector<Stmt> stmts;

  bool has_split() const {
    for (const auto& s : stmts)
      if (std::holds_alternative<IfStmt>(s)) return true;
    return false;
  }

  const IfStmt* split() const {
    for (const auto& s : stmts)
      if (const auto* f = std::get_if<IfStmt>(&s)) return f;
    return nullptr;
  }

  // Leading constant bindings: the init block.
  std::vector<const DeclStmt*> init_block() const {
    std::vector<const DeclStmt*> out;
    for (const auto& s : stmts) {
      if (const auto* d = std::get_if<DeclStmt>(&s)) out.push_back(d);
      else break;
    }
    return out;
  }
};

inline bool stmt_equal(const Stmt& a, const Stmt& b, double tol = kFloatTolerance);

inline bool stmts_equal(const std::vector<Stmt>& a, const std::vector<Stmt>& b,
                        double tol = kFloatTolerance) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(a[i], b[i], tol)) return false;
  return true;
}

inline bool stmt_equal(const Stmt& a, const Stmt& b, double tol) {
  if (a.index() != b.index()) return false;
  if (const auto* d = std::get_if<DeclStmt>(&a)) {
    const auto& e = std::get<DeclStmt>(b);
    return d->name == e.name && approx_equal(d->value, e.value, tol);
  }
  if (const auto* c = std::get_if<CallStmt>(&a)) {
    const auto& e = std::get<CallStmt>(b);
    if (c->target != e.target || c->api != e.api || c->args.size() != e.args.size()) return false;
    for (std::size_t i = 0; i < c->args.size(); ++i) {
      if (c->args[i].param != e.args[i].param) return false;
      if (!operand_equal(c->args[i].operand, e.args[i].operand, tol)) return false;
    }
    return true;
  }
  if (const auto* r = std::get_if<ResultStmt>(&a)) {
    return r->names == std::get<ResultStmt>(b).names;
  }
  const auto& fa = std::get<IfStmt>(a);
  const auto& fb = std::get<IfStmt>(b);
  if (fa.cond.lhs != fb.cond.lhs || fa.cond.dim != fb.cond.dim) return false;
  if (!operand_equal(fa.cond.rhs, fb.cond.rhs, tol)) return false;
  return stmts_equal(fa.then_body, fb.then_body, tol) && stmts_equal(fa.else_body, fb.else_body, tol);
}

inline bool program_equal(const Program& a, const Program& b, double tol = kFloatTolerance) {
  return stmts_equal(a.stmts, b.stmts, tol);
}

// ---------------------------------------------------------------------------
// Path views. A linear program has one execution path; a split program has
// two (prefix + branch). Each path is the call sequence plus the RESULT name
// list that a run taking that path would produce.
// ---------------------------------------------------------------------------

struct ProgramPath {
  std::vector<const CallStmt*> calls;
  std::vector<std::string> result_names;
};

namespace detail {
inline void collect_path(const std::vector<Stmt>& stmts, bool take_then, ProgramPath& path) {
  for (const auto& s : stmts) {
    if (const auto* c = std::get_if<CallStmt>(&s)) {
      path.calls.push_back(c);
    } else if (const auto* r = std::get_if<ResultStmt>(&s)) {
      path.result_names = r->names;  // last RESULT on the path wins
    } else if (const auto* f = std::get_if<IfStmt>(&s)) {
      collect_path(take_then ? f->then_body : f->else_body, take_then, path);
    }
  }
}
}  // namespace detail

inline std::vector<ProgramPath> program_paths(const Program& p) {
  std::vector<ProgramPath> out;
  if (p.has_split()) {
    for (bool take_then : {true, false}) {
      ProgramPath path;
      detail::collect_path(p.stmts, take_then, path);
      out.push_back(std::move(path));
    }
  } else {
    ProgramPath path;
    detail::collect_path(p.stmts, true, path);
    out.push_back(std::move(path));
  }
  return out;
}

// ---------------------------------------------------------------------------
// IR <-> JSON (corpus storage).
// ---------------------------------------------------------------------------

inline json operand_to_json(const Operand& o) {
  if (o.is_ref()) return json{{"ref", o.ref()}};
  return json{{"lit", value_to_json(o.literal())}};
}

inline Operand operand_from_json(const json& j) {
  if (j.contains("ref")) return Operand::name(j.at("ref").get<std::string>());
  return Operand::lit(value_from_json(j.at("lit")));
}

inline json stmt_to_json(const Stmt& s);

inline json stmts_to_json(const std::vector<Stmt>& stmts) {
  json arr = json::array();
  for (const auto& s : stmts) arr.push_back(stmt_to_json(s));
  return arr;
}

inline json stmt_to_json(const Stmt& s) {
  if (const auto* d = std::get_if<DeclStmt>(&s))
    return json{{"decl", {{"name", d->name}, {"value", value_to_json(d->value)}}}};
  if (const auto* c = std::get_if<CallStmt>(&s)) {
    json args = json::array();
    for (const auto& a : c->args) args.push_back({{"param", a.param}, {"arg", operand_to_json(a.operand)}});
    return json{{"call", {{"target", c->target}, {"api", c->api}, {"args", std::move(args)}}}};
  }
  if (const auto* r = std::get_if<ResultStmt>(&s)) return json{{"result", r->names}};
  const auto& f = std::get<IfStmt>(s);
  return json{{"if",
               {{"cond", {{"lhs", f.cond.lhs}, {"dim", f.cond.dim}, {"rhs", operand_to_json(f.cond.rhs)}}},
                {"then", stmts_to_json(f.then_body)},
                {"else", stmts_to_json(f.else_body)}}}};
}

inline Stmt stmt_from_json(const json& j);

inline std::vector<Stmt> stmts_from_json(const json& arr) {
  std::vector<Stmt> out;
  for (const auto& e : arr) out.push_back(stmt_from_json(e));
  return out;
}

inline Stmt stmt_from_json(const json& j) {
  if (j.contains("decl"))
    return DeclStmt{j.at("decl").at("name").get<std::string>(), value_from_json(j.at("decl").at("value"))};
  if (j.contains("call")) {
    CallStmt c;
    c.target = j.at("call").at("target").get<std::string>();
    c.api = j.at("call").at("api").get<std::string>();
    for (const auto& a : j.at("call").at("args"))
      c.args.push_back({a.at("param").get<std::string>(), operand_from_json(a.at("arg"))});
    return c;
  }
  if (j.contains("result")) return ResultStmt{j.at("result").get<std::vector<std::string>>()};
  if (j.contains("if")) {
    IfStmt f;
    const auto& cj = j.at("if").at("cond");
    f.cond.lhs = cj.at("lhs").get<std::string>();
    f.cond.dim = cj.at("dim").get<int>();
    f.cond.rhs = operand_from_json(cj.at("rhs"));
    f.then_body = stmts_from_json(j.at("if").at("then"));
    f.else_body = stmts_from_json(j.at("if").at("else"));
    return f;
  }
  throw CorpusError("unrecognized statement encoding: " + j.dump());
}

inline json program_to_json(const Program& p) { return json{{"stmts", stmts_to_json(p.stmts)}}; }

inline Program program_from_json(const json& j) { return Program{stmts_from_json(j.at("stmts"))}; }

}  // namespace seqgen
