#pragma once

#include <string>

#include "seqgen/program.hpp"

namespace seqgen {

namespace detail {

inline std::string render_operand(const Operand& o) {
  return o.is_ref() ? o.ref() : render_literal(o.literal());
}

inline void render_stmt(const Stmt& s, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (const auto* d = std::get_if<DeclStmt>(&s)) {
    out += pad + d->name + " = " + render_literal(d->value) + "\n";
  } else if (const auto* c = std::get_if<CallStmt>(&s)) {
    out += pad + c->target + " = " + c->api + "(";
    for (std::size_t i = 0; i < c->args.size(); ++i) {
      if (i) out += ", ";
      out += c->args[i].param + "=" + render_operand(c->args[i].operand);
    }
    out += ")\n";
  } else if (const auto* r = std::get_if<ResultStmt>(&s)) {
    out += pad + "RESULT = [";
    for (std::size_t i = 0; i < r->names.size(); ++i) {
      if (i) out += ", ";
      out += r->names[i];
    }
    out += "]\n";
  } else {
    const auto& f = std::get<IfStmt>(s);
    out += pad + "if ";
    if (f.cond.dim >= 0)
      out += "dim(" + f.cond.lhs + ", " + std::to_string(f.cond.dim) + ")";
    else
      out += f.cond.lhs;
    out += " == " + render_operand(f.cond.rhs) + " {\n";
    for (const auto& t : f.then_body) render_stmt(t, out, indent + 1);
    out += pad + "} else {\n";
    for (const auto& e : f.else_body) render_stmt(e, out, indent + 1);
    out += pad + "}\n";
  }
}

}  // namespace detail

// Byte-stable text form of a program. Rendering the same IR always yields the
// same bytes, and parsing the result reproduces the IR.
inline std::string render_source(const Program& p) {
  std::string out;
  for (const auto& s : p.stmts) detail::render_stmt(s, out, 0);
  return out;
}

}  // namespace seqgen
