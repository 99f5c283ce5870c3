#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqgen/program.hpp"
#include "seqgen/scenario.hpp"

namespace seqgen {

constexpr int kInterpreterBudget = 10000;

enum class RunStatus { Completed, Failed };

struct RunFailure {
  int stmt_index = 0;  // 1-based count of executed statements at failure
  std::string error;
};

// Everything observable about one interpreted run. Execution failures are
// recorded here; they never propagate as exceptions past the runner.
struct RunOutcome {
  RunStatus status = RunStatus::Completed;
  std::optional<RunFailure> failure;
  std::map<std::string, Value> vars;  // final environment
  json dump;                          // backend state snapshot
  List result;                        // values collected by RESULT
  std::vector<Handle> creation_log;   // backend handle mints, creation order
  std::optional<bool> took_then;      // branch taken, when a split executed

  bool completed() const { return status == RunStatus::Completed; }
};

// ---------------------------------------------------------------------------
// Interpreter.
// ---------------------------------------------------------------------------

namespace detail {

struct ExecState {
  std::map<std::string, Value> env;
  const std::map<std::string, Value>* overrides = nullptr;
  MockBackend* backend = nullptr;
  int executed = 0;
  List result;
  std::optional<bool> took_then;
};

struct ExecAbort {
  std::string error;
};

inline const Value& resolve(ExecState& st, const std::string& name) {
  auto it = st.env.find(name);
  if (it == st.env.end()) throw ExecAbort{"undefined variable '" + name + "'"};
  return it->second;
}

inline void exec_stmts(ExecState& st, const std::vector<Stmt>& stmts) {
  for (const auto& s : stmts) {
    if (++st.executed > kInterpreterBudget) throw ExecAbort{"interpreter step budget exceeded"};
    if (const auto* d = std::get_if<DeclStmt>(&s)) {
      // Overrides win over declarations: the harness controls condition
      // initialization for flipped runs.
      if (st.overrides) {
        auto ov = st.overrides->find(d->name);
        if (ov != st.overrides->end()) {
          st.env[d->name] = ov->second;
          continue;
        }
      }
      st.env[d->name] = d->value;
    } else if (const auto* c = std::get_if<CallStmt>(&s)) {
      std::vector<NamedValue> args;
      for (const auto& a : c->args) {
        args.push_back({a.param, a.operand.is_ref() ? resolve(st, a.operand.ref())
                                                    : a.operand.literal()});
      }
      try {
        st.env[c->target] = st.backend->call(c->api, args);
      } catch (const BackendError& e) {
        throw ExecAbort{c->api + ": " + e.what()};
      }
    } else if (const auto* r = std::get_if<ResultStmt>(&s)) {
      st.result.clear();
      for (const auto& n : r->names) {
        auto it = st.env.find(n);
        if (it != st.env.end()) st.result.push_back(it->second);
      }
    } else {
      const auto& f = std::get<IfStmt>(s);
      const Value& lhs_var = resolve(st, f.cond.lhs);
      Value lhs;
      if (f.cond.dim >= 0) {
        if (!lhs_var.is_tensor()) throw ExecAbort{"dim() applied to non-tensor '" + f.cond.lhs + "'"};
        const auto& shape = lhs_var.as_tensor().shape;
        if (f.cond.dim >= static_cast<int>(shape.size()))
          throw ExecAbort{"dim() index out of range for '" + f.cond.lhs + "'"};
        lhs = Value(shape[static_cast<std::size_t>(f.cond.dim)]);
      } else {
        lhs = lhs_var;
      }
      const Value rhs = f.cond.rhs.is_ref() ? resolve(st, f.cond.rhs.ref()) : f.cond.rhs.literal();
      const bool taken = approx_equal(lhs, rhs);
      st.took_then = taken;
      exec_stmts(st, taken ? f.then_body : f.else_body);
    }
  }
}

}  // namespace detail

// Interprets a program against a fresh backend seeded for `seed`. `preseed`
// binds given inputs before the program's own statements run (used when
// grading candidates, which reference the reference init block by name);
// `overrides` force specific init names in both decl and preseed positions.
inline RunOutcome execute_program(const Program& program, const ScenarioCatalog& scenario,
                                  std::uint64_t seed,
                                  const std::map<std::string, Value>& preseed = {},
                                  const std::map<std::string, Value>& overrides = {}) {
  auto backend = scenario.make_backend(seed);
  detail::ExecState st;
  st.backend = backend.get();
  st.overrides = &overrides;
  for (const auto& [k, v] : preseed) st.env[k] = v;
  for (const auto& [k, v] : overrides) {
    if (st.env.count(k)) st.env[k] = v;
  }

  RunOutcome out;
  try {
    detail::exec_stmts(st, program.stmts);
  } catch (const detail::ExecAbort& a) {
    out.status = RunStatus::Failed;
    out.failure = RunFailure{st.executed, a.error};
  }
  out.vars = std::move(st.env);
  out.dump = backend->dump();
  out.result = std::move(st.result);
  out.creation_log = backend->creation_log();
  out.took_then = st.took_then;
  return out;
}

// ---------------------------------------------------------------------------
// Branch flip and oracle capture.
// ---------------------------------------------------------------------------

// Type-directed flip guaranteeing inequality with the default: negate bools,
// +1 ints and floats, suffix text. Tensor-dim conditions compare an int, so
// the int rule covers them.
inline Value flip_value(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Bool: return Value(!v.as_bool());
    case ValueKind::Int: return Value(v.as_int() + 1);
    case ValueKind::Float: return Value(v.as_float() + 1.0);
    case ValueKind::Text: return Value(v.as_text() + "_x");
    default: throw UnknownVar(std::string("no flip rule for value kind ") + kind_name(v.kind()));
  }
}

struct OracleRecord {
  RunOutcome taken;
  std::optional<RunOutcome> flipped;
  std::string flip_var;               // condition init var name; empty if linear
  std::optional<Value> flip_val;      // value used for the flipped run
  bool dead_branch = false;           // both runs took the same branch
  // gen-time handle serial -> exec-time handle serial, per partition kind.
  std::map<std::string, std::vector<std::pair<std::int64_t, std::int64_t>>> resolution;
};

// Creation-order resolution between a generation-time handle log and an
// execution-time one: the k-th handle minted in a partition on one side binds
// to the k-th on the other.
inline std::map<std::string, std::vector<std::pair<std::int64_t, std::int64_t>>>
resolve_handles(const std::vector<Handle>& gen_log, const std::vector<Handle>& exec_log) {
  std::map<std::string, std::vector<std::int64_t>> gen_by_kind, exec_by_kind;
  for (const auto& h : gen_log) gen_by_kind[h.kind].push_back(h.serial);
  for (const auto& h : exec_log) exec_by_kind[h.kind].push_back(h.serial);
  std::map<std::string, std::vector<std::pair<std::int64_t, std::int64_t>>> out;
  for (const auto& [kind, gens] : gen_by_kind) {
    const auto& execs = exec_by_kind[kind];
    auto n = std::min(gens.size(), execs.size());
    for (std::size_t i = 0; i < n; ++i) out[kind].emplace_back(gens[i], execs[i]);
  }
  return out;
}

// Runs the program under its default initialization and, when it has a split,
// once more with the condition init var flipped. `gen_log` (the generating
// schema's handle mints) feeds the resolution map; pass empty for programs
// that were parsed rather than generated.
inline OracleRecord capture_oracle(const Program& program, const ScenarioCatalog& scenario,
                                   std::uint64_t seed, const std::vector<Handle>& gen_log = {}) {
  OracleRecord rec;
  rec.taken = execute_program(program, scenario, seed);
  rec.resolution = resolve_handles(gen_log, rec.taken.creation_log);

  const IfStmt* split = program.split();
  if (!split || !split->cond.rhs.is_ref()) return rec;

  rec.flip_var = split->cond.rhs.ref();
  const Value* def = nullptr;
  for (const auto& s : program.stmts) {
    if (const auto* d = std::get_if<DeclStmt>(&s)) {
      if (d->name == rec.flip_var) def = &d->value;
    }
  }
  if (!def) return rec;  // condition rhs is not an init var; nothing to flip

  rec.flip_val = flip_value(*def);
  auto flipped = execute_program(program, scenario, seed, {}, {{rec.flip_var, *rec.flip_val}});
  if (flipped.took_then.has_value() && rec.taken.took_then.has_value() &&
      *flipped.took_then == *rec.taken.took_then) {
    rec.dead_branch = true;  // flip failed to change the branch; omit the run
    return rec;
  }
  rec.flipped = std::move(flipped);
  return rec;
}

// ---------------------------------------------------------------------------
// Handle normalization: rewrite every handle to its creation-order slot
// within its partition so runs with different raw serials compare equal when
// they created the same objects in the same per-partition order.
// ---------------------------------------------------------------------------

namespace detail {

inline std::int64_t slot_of(const Handle& h,
                            const std::map<std::string, std::map<std::int64_t, std::int64_t>>& slots) {
  auto kit = slots.find(h.kind);
  if (kit != slots.end()) {
    auto sit = kit->second.find(h.serial);
    if (sit != kit->second.end()) return sit->second;
  }
  return h.serial + 1000000;  // unknown handle: keep distinct from any slot
}

}  // namespace detail

class HandleNormalizer {
 public:
  explicit HandleNormalizer(const std::vector<Handle>& creation_log) {
    std::map<std::string, std::int64_t> next;
    for (const auto& h : creation_log) slots_[h.kind][h.serial] = next[h.kind]++;
  }

  Value normalize(const Value& v) const {
    switch (v.kind()) {
      case ValueKind::Handle: {
        const auto& h = v.as_handle();
        return Value(Handle{h.kind, detail::slot_of(h, slots_)});
      }
      case ValueKind::Record: {
        Record out;
        for (const auto& [k, f] : v.as_record()) out.emplace(k, normalize(f));
        return Value(std::move(out));
      }
      case ValueKind::List: {
        List out;
        for (const auto& e : v.as_list()) out.push_back(normalize(e));
        return Value(std::move(out));
      }
      default: return v;
    }
  }

  // Dumps are JSON built from values; rewrite embedded "$handle" objects.
  json normalize_json(const json& j) const {
    if (j.is_object()) {
      if (j.contains("$handle") && j.size() == 1) {
        Handle h{j.at("$handle").at("kind").get<std::string>(),
                 j.at("$handle").at("serial").get<std::int64_t>()};
        return json{{"$handle", {{"kind", h.kind}, {"serial", detail::slot_of(h, slots_)}}}};
      }
      json out = json::object();
      for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = normalize_json(it.value());
      return out;
    }
    if (j.is_array()) {
      json out = json::array();
      for (const auto& e : j) out.push_back(normalize_json(e));
      return out;
    }
    return j;
  }

 private:
  std::map<std::string, std::map<std::int64_t, std::int64_t>> slots_;
};

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

inline json run_outcome_to_json(const RunOutcome& r) {
  json vars = json::object();
  for (const auto& [k, v] : r.vars) vars[k] = value_to_json(v);
  json result = json::array();
  for (const auto& v : r.result) result.push_back(value_to_json(v));
  json log = json::array();
  for (const auto& h : r.creation_log) log.push_back({h.kind, h.serial});
  return {{"status", r.completed() ? "completed" : "failed"},
          {"failure", r.failure ? json{{"stmt", r.failure->stmt_index}, {"error", r.failure->error}}
                                : json(nullptr)},
          {"vars", std::move(vars)},
          {"dump", r.dump},
          {"result", std::move(result)},
          {"creation_log", std::move(log)},
          {"took_then", r.took_then ? json(*r.took_then) : json(nullptr)}};
}

inline RunOutcome run_outcome_from_json(const json& j) {
  RunOutcome r;
  r.status = j.at("status") == "completed" ? RunStatus::Completed : RunStatus::Failed;
  if (!j.at("failure").is_null())
    r.failure = RunFailure{j.at("failure").at("stmt").get<int>(),
                           j.at("failure").at("error").get<std::string>()};
  for (const auto& [k, v] : j.at("vars").items()) r.vars.emplace(k, value_from_json(v));
  r.dump = j.at("dump");
  for (const auto& v : j.at("result")) r.result.push_back(value_from_json(v));
  for (const auto& h : j.at("creation_log"))
    r.creation_log.push_back(Handle{h.at(0).get<std::string>(), h.at(1).get<std::int64_t>()});
  if (!j.at("took_then").is_null()) r.took_then = j.at("took_then").get<bool>();
  return r;
}

inline json oracle_to_json(const OracleRecord& rec) {
  json res = json::object();
  for (const auto& [kind, pairs] : rec.resolution) {
    json arr = json::array();
    for (const auto& [g, e] : pairs) arr.push_back({g, e});
    res[kind] = std::move(arr);
  }
  return {{"taken", run_outcome_to_json(rec.taken)},
          {"flipped", rec.flipped ? run_outcome_to_json(*rec.flipped) : json(nullptr)},
          {"flip_var", rec.flip_var},
          {"flip_val", rec.flip_val ? value_to_json(*rec.flip_val) : json(nullptr)},
          {"dead_branch", rec.dead_branch},
          {"resolution", std::move(res)}};
}

inline OracleRecord oracle_from_json(const json& j) {
  OracleRecord rec;
  rec.taken = run_outcome_from_json(j.at("taken"));
  if (!j.at("flipped").is_null()) rec.flipped = run_outcome_from_json(j.at("flipped"));
  rec.flip_var = j.at("flip_var").get<std::string>();
  if (!j.at("flip_val").is_null()) rec.flip_val = value_from_json(j.at("flip_val"));
  rec.dead_branch = j.at("dead_branch").get<bool>();
  for (const auto& [kind, pairs] : j.at("resolution").items()) {
    for (const auto& p : pairs)
      rec.resolution[kind].emplace_back(p.at(0).get<std::int64_t>(), p.at(1).get<std::int64_t>());
  }
  return rec;
}

}  // namespace seqgen
