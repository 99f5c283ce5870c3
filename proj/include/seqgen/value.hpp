#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "seqgen/common.hpp"

namespace seqgen {

using json = nlohmann::json;

// Opaque identifier minted by a handle allocator. `kind` doubles as the
// resolution partition (e.g. "session:cbioportal:main", "audio:tts", "voice");
// `serial` is the allocation counter within that partition's id space.
struct Handle {
  std::string kind;
  std::int64_t serial = 0;

  friend bool operator==(const Handle& a, const Handle& b) {
    return a.kind == b.kind && a.serial == b.serial;
  }
  friend bool operator<(const Handle& a, const Handle& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.serial < b.serial;
  }
};

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;  // row-major

  std::int64_t numel() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape == b.shape && a.data == b.data;
  }
};

class Value;
using Record = std::map<std::string, Value>;  // ordered: canonical key order for free
using List = std::vector<Value>;

enum class ValueKind { Int, Float, Text, Bool, Tensor, Record, List, Handle };

class Value {
 public:
  using Variant = std::variant<std::int64_t, double, std::string, bool, Tensor, Record, List, Handle>;

  Value() : v_(std::int64_t{0}) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double f) : v_(f) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(bool b) : v_(b) {}
  Value(Tensor t) : v_(std::move(t)) {}
  Value(Record r) : v_(std::move(r)) {}
  Value(List l) : v_(std::move(l)) {}
  Value(Handle h) : v_(std::move(h)) {}

  ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }

  bool is_int() const { return kind() == ValueKind::Int; }
  bool is_float() const { return kind() == ValueKind::Float; }
  bool is_text() const { return kind() == ValueKind::Text; }
  bool is_bool() const { return kind() == ValueKind::Bool; }
  bool is_tensor() const { return kind() == ValueKind::Tensor; }
  bool is_record() const { return kind() == ValueKind::Record; }
  bool is_list() const { return kind() == ValueKind::List; }
  bool is_handle() const { return kind() == ValueKind::Handle; }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_float() const { return std::get<double>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const Tensor& as_tensor() const { return std::get<Tensor>(v_); }
  Tensor& as_tensor() { return std::get<Tensor>(v_); }
  const Record& as_record() const { return std::get<Record>(v_); }
  Record& as_record() { return std::get<Record>(v_); }
  const List& as_list() const { return std::get<List>(v_); }
  List& as_list() { return std::get<List>(v_); }
  const Handle& as_handle() const { return std::get<Handle>(v_); }

  const Variant& raw() const { return v_; }

 private:
  Variant v_;
};

inline const char* kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Int: return "int";
    case ValueKind::Float: return "float";
    case ValueKind::Text: return "text";
    case ValueKind::Bool: return "bool";
    case ValueKind::Tensor: return "tensor";
    case ValueKind::Record: return "record";
    case ValueKind::List: return "list";
    case ValueKind::Handle: return "handle";
  }
  return "?";
}

constexpr double kFloatTolerance = 1e-6;

// Structural equality. Floats (scalars and tensor elements) compare within an
// absolute tolerance; all other kinds compare exactly. Kinds never coerce:
// Int(2) != Float(2.0).
inline bool approx_equal(const Value& a, const Value& b, double tol = kFloatTolerance) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::Int: return a.as_int() == b.as_int();
    case ValueKind::Float: return std::fabs(a.as_float() - b.as_float()) <= tol;
    case ValueKind::Text: return a.as_text() == b.as_text();
    case ValueKind::Bool: return a.as_bool() == b.as_bool();
    case ValueKind::Tensor: {
      const auto& ta = a.as_tensor();
      const auto& tb = b.as_tensor();
      if (ta.shape != tb.shape || ta.data.size() != tb.data.size()) return false;
      for (std::size_t i = 0; i < ta.data.size(); ++i)
        if (std::fabs(ta.data[i] - tb.data[i]) > tol) return false;
      return true;
    }
    case ValueKind::Record: {
      const auto& ra = a.as_record();
      const auto& rb = b.as_record();
      if (ra.size() != rb.size()) return false;
      auto ia = ra.begin();
      auto ib = rb.begin();
      for (; ia != ra.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !approx_equal(ia->second, ib->second, tol)) return false;
      }
      return true;
    }
    case ValueKind::List: {
      const auto& la = a.as_list();
      const auto& lb = b.as_list();
      if (la.size() != lb.size()) return false;
      for (std::size_t i = 0; i < la.size(); ++i)
        if (!approx_equal(la[i], lb[i], tol)) return false;
      return true;
    }
    case ValueKind::Handle: return a.as_handle() == b.as_handle();
  }
  return false;
}

// ---------------------------------------------------------------------------
// JSON encoding. Self-describing so Int/Float survive a round trip: floats are
// tagged, tensors carry shape + flat data, and plain JSON scalars map to Int /
// Bool / Text. Tensor payload numbers are coerced back to double on load.
// ---------------------------------------------------------------------------

inline json value_to_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Int: return json(v.as_int());
    case ValueKind::Float: return json{{"$f", v.as_float()}};
    case ValueKind::Text: return json(v.as_text());
    case ValueKind::Bool: return json(v.as_bool());
    case ValueKind::Tensor: {
      const auto& t = v.as_tensor();
      return json{{"$tensor", {{"shape", t.shape}, {"data", t.data}}}};
    }
    case ValueKind::Record: {
      json fields = json::object();
      for (const auto& [k, f] : v.as_record()) fields[k] = value_to_json(f);
      return json{{"$rec", std::move(fields)}};
    }
    case ValueKind::List: {
      json items = json::array();
      for (const auto& e : v.as_list()) items.push_back(value_to_json(e));
      return json{{"$list", std::move(items)}};
    }
    case ValueKind::Handle: {
      const auto& h = v.as_handle();
      return json{{"$handle", {{"kind", h.kind}, {"serial", h.serial}}}};
    }
  }
  return json();
}

inline Value value_from_json(const json& j) {
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_number_float()) return Value(j.get<double>());  // untagged float: tolerate
  if (j.is_string()) return Value(j.get<std::string>());
  if (j.is_object()) {
    if (j.contains("$f")) return Value(j.at("$f").get<double>());
    if (j.contains("$tensor")) {
      Tensor t;
      t.shape = j.at("$tensor").at("shape").get<std::vector<std::int64_t>>();
      for (const auto& x : j.at("$tensor").at("data")) t.data.push_back(x.get<double>());
      return Value(std::move(t));
    }
    if (j.contains("$rec")) {
      Record r;
      for (const auto& [k, f] : j.at("$rec").items()) r.emplace(k, value_from_json(f));
      return Value(std::move(r));
    }
    if (j.contains("$list")) {
      List l;
      for (const auto& e : j.at("$list")) l.push_back(value_from_json(e));
      return Value(std::move(l));
    }
    if (j.contains("$handle")) {
      Handle h;
      h.kind = j.at("$handle").at("kind").get<std::string>();
      h.serial = j.at("$handle").at("serial").get<std::int64_t>();
      return Value(std::move(h));
    }
  }
  throw CorpusError("unrecognized value encoding: " + j.dump());
}

// ---------------------------------------------------------------------------
// Canonical JSON text: object keys sorted (nlohmann objects already are),
// floats printed at 9 significant digits, no insignificant whitespace.
// Canonical bytes are the determinism contract for corpus files.
// ---------------------------------------------------------------------------

inline std::string canonical_float(double d) {
  if (d == 0.0) d = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", d);
  return buf;
}

inline void canonical_dump_into(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        canonical_dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        canonical_dump_into(e, out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float:
      out += canonical_float(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

inline std::string canonical_dump(const json& j) {
  std::string out;
  canonical_dump_into(j, out);
  return out;
}

// ---------------------------------------------------------------------------
// DSL literal rendering. Floats use shortest-round-trip formatting (always
// with '.' or exponent so the lexer can tell them from ints); strings use the
// five escapes the grammar defines; record keys render in sorted order.
// ---------------------------------------------------------------------------

inline std::string render_float(double d) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, end);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

inline std::string render_text(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

inline std::string render_literal(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Int: return std::to_string(v.as_int());
    case ValueKind::Float: return render_float(v.as_float());
    case ValueKind::Text: return render_text(v.as_text());
    case ValueKind::Bool: return v.as_bool() ? "true" : "false";
    case ValueKind::Tensor: {
      const auto& t = v.as_tensor();
      std::string out = "tensor([";
      for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(t.shape[i]);
      }
      out += "], [";
      for (std::size_t i = 0; i < t.data.size(); ++i) {
        if (i) out += ", ";
        out += render_float(t.data[i]);
      }
      out += "])";
      return out;
    }
    case ValueKind::Record: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, f] : v.as_record()) {
        if (!first) out += ", ";
        first = false;
        out += render_text(k);
        out += ": ";
        out += render_literal(f);
      }
      out += "}";
      return out;
    }
    case ValueKind::List: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.as_list().size(); ++i) {
        if (i) out += ", ";
        out += render_literal(v.as_list()[i]);
      }
      out += "]";
      return out;
    }
    case ValueKind::Handle: {
      const auto& h = v.as_handle();
      return "handle(" + render_text(h.kind) + ", " + std::to_string(h.serial) + ")";
    }
  }
  return "?";
}

}  // namespace seqgen
