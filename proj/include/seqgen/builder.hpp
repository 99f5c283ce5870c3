#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqgen/engine.hpp"
#include "seqgen/program.hpp"

namespace seqgen {

inline const std::string kCondVarName = "cond0";

// Split position for an n-step program: 0 means no split; p in [2, n] puts
// the if/else immediately before step p. Uniform over those n outcomes.
inline int choose_split_point(int n, Rng& rng) {
  if (n < 2) return 0;
  auto draw = rng.uniform_int(1, n);
  return draw == 1 ? 0 : static_cast<int>(draw);
}

// A branch condition bound to a concrete variable, plus the runtime value the
// fresh condition variable must hold for the if-branch to be taken.
struct ConditionPick {
  Condition cond;
  Value cond_value;
  VarId lhs_id = 0;
};

// Scans live program variables newest-first and takes the first one of a
// comparable type: scalars compare directly, tensors by their dim-0 size.
// nullopt means the split degrades to a linear program.
inline std::optional<ConditionPick> synthesize_condition(const StateSchema& schema) {
  const auto& vars = schema.vars();
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
    const auto& v = *it;
    if (!v.live || v.role != VarRole::Local) continue;
    switch (v.value.kind()) {
      case ValueKind::Int:
      case ValueKind::Float:
      case ValueKind::Bool:
      case ValueKind::Text:
        return ConditionPick{Condition{v.name, -1, Operand::name(kCondVarName)}, v.value, v.id};
      case ValueKind::Tensor: {
        const auto& shape = v.value.as_tensor().shape;
        if (shape.empty()) continue;
        return ConditionPick{Condition{v.name, 0, Operand::name(kCondVarName)}, Value(shape[0]),
                             v.id};
      }
      default: continue;  // records, lists, handles: no equality condition
    }
  }
  return std::nullopt;
}

struct BuildConfig {
  int n_steps = 5;
  bool enable_split = true;
  EngineConfig engine;
};

struct BuildOutput {
  Program program;
  int split_pos = 0;         // 0 after degradation, too
  bool split_degraded = false;  // a split was drawn but no condition variable was eligible
  std::string cond_var;      // kCondVarName when split, else empty

  // Default-path artifacts (the linear trace, or prefix + if branch).
  Trace if_trace;
  StateSchema if_schema;
  std::vector<Handle> gen_log;

  // Else-path artifacts; meaningful only when split_pos > 0.
  Trace else_trace;
  StateSchema else_schema;
  std::vector<Handle> else_gen_log;
};

namespace detail {

inline CallStmt call_for_step(const TraceStep& s, const StateSchema& schema) {
  CallStmt c;
  c.api = s.transition;
  c.target = s.produced.empty() ? std::string() : schema.at(s.produced[0]).name;
  for (const auto& a : s.bindings) {
    c.args.push_back(
        {a.param, a.is_ref() ? Operand::name(schema.at(a.ref()).name) : Operand::lit(a.literal())});
  }
  return c;
}

// RESULT names for one path: every produced program variable never consumed
// by a later step of that path nor by the condition, in production order.
inline std::vector<std::string> result_names(const Trace& path, const StateSchema& schema,
                                             std::optional<VarId> cond_lhs) {
  std::set<VarId> consumed;
  for (const auto& s : path.steps())
    for (const auto& a : s.bindings)
      if (a.is_ref()) consumed.insert(a.ref());
  if (cond_lhs) consumed.insert(*cond_lhs);

  std::vector<std::string> names;
  for (const auto& s : path.steps())
    for (VarId id : s.produced) {
      const auto& v = schema.at(id);
      if (v.role == VarRole::Local && !consumed.count(id)) names.push_back(v.name);
    }
  return names;
}

inline std::vector<Stmt> init_decls(const StateSchema& initial) {
  std::vector<Stmt> out;
  for (const auto& v : initial.vars())
    if (v.producer.is_init() && v.role == VarRole::Local) out.push_back(DeclStmt{v.name, v.value});
  return out;
}

}  // namespace detail

// One full generation attempt; throws EmptyCandidateSet on a dead end so the
// outer loop can re-roll initializer and split.
namespace detail {

inline BuildOutput attempt_build(const ScenarioCatalog& catalog, FrequencyRecorder& recorder,
                                 Rng& rng, std::uint64_t run_seed, const BuildConfig& cfg) {
  const int n = cfg.n_steps;
  TraceEngine eng(catalog, recorder, rng, cfg.engine);
  eng.set_run_seed(run_seed);
  eng.reset();

  int split = cfg.enable_split ? choose_split_point(n, rng) : 0;

  BuildOutput out;
  if (split == 0) {
    eng.run_steps(n);
    out.if_trace = eng.trace();
    out.if_schema = eng.schema();
    out.gen_log = eng.schema().creation_log();

    out.program.stmts = init_decls(out.if_trace.initial());
    for (const auto& s : out.if_trace.steps())
      out.program.stmts.push_back(call_for_step(s, out.if_schema));
    out.program.stmts.push_back(
        ResultStmt{result_names(out.if_trace, out.if_schema, std::nullopt)});
    return out;
  }

  eng.run_steps(split - 1);

  auto pick = synthesize_condition(eng.schema());
  if (!pick) {
    // Degrade: finish the trace linearly.
    eng.run_steps(n - split + 1);
    out.split_degraded = true;
    out.if_trace = eng.trace();
    out.if_schema = eng.schema();
    out.gen_log = eng.schema().creation_log();

    out.program.stmts = init_decls(out.if_trace.initial());
    for (const auto& s : out.if_trace.steps())
      out.program.stmts.push_back(call_for_step(s, out.if_schema));
    out.program.stmts.push_back(
        ResultStmt{result_names(out.if_trace, out.if_schema, std::nullopt)});
    return out;
  }

  // Fork: the else engine snapshots schema, trace, and duplicate ledger at
  // the split. The if-branch runs to completion first; only then does the
  // else branch resume, against a clone of the updated recorder and the
  // updated duplicate set, with fresh variable ids. The clone rejoins the
  // campaign recorder by per-pair maximum, which never double-counts the
  // shared prefix.
  TraceEngine else_eng = eng;
  eng.run_steps(n - split + 1);
  FrequencyRecorder fork_rec = recorder;
  else_eng.set_recorder(fork_rec);
  else_eng.schema().bump_next_id(eng.schema().next_id());
  else_eng.adopt_duplicates(eng);
  else_eng.run_steps(n - split + 1);
  recorder.merge_max(fork_rec);

  out.split_pos = split;
  out.cond_var = kCondVarName;
  out.if_trace = eng.trace();
  out.if_schema = eng.schema();
  out.gen_log = eng.schema().creation_log();
  out.else_trace = else_eng.trace();
  out.else_schema = else_eng.schema();
  out.else_gen_log = else_eng.schema().creation_log();

  out.program.stmts = init_decls(out.if_trace.initial());
  out.program.stmts.push_back(DeclStmt{kCondVarName, pick->cond_value});
  const auto& if_steps = out.if_trace.steps();
  const auto& else_steps = out.else_trace.steps();
  for (int i = 0; i < split - 1; ++i)
    out.program.stmts.push_back(call_for_step(if_steps[static_cast<std::size_t>(i)], out.if_schema));

  IfStmt fork;
  fork.cond = pick->cond;
  for (std::size_t i = static_cast<std::size_t>(split) - 1; i < if_steps.size(); ++i)
    fork.then_body.push_back(call_for_step(if_steps[i], out.if_schema));
  fork.then_body.push_back(ResultStmt{result_names(out.if_trace, out.if_schema, pick->lhs_id)});
  for (std::size_t i = static_cast<std::size_t>(split) - 1; i < else_steps.size(); ++i)
    fork.else_body.push_back(call_for_step(else_steps[i], out.else_schema));
  fork.else_body.push_back(ResultStmt{result_names(out.else_trace, out.else_schema, pick->lhs_id)});
  out.program.stmts.push_back(std::move(fork));
  return out;
}

}  // namespace detail

// Generates one complete program: trace steps, optional single split with a
// synthesized condition, init block, and per-path RESULT sinks. Re-rolls the
// whole attempt (fresh initializer draw) on dead ends, up to the retry
// budget.
inline BuildOutput build_program(const ScenarioCatalog& catalog, FrequencyRecorder& recorder,
                                 Rng& rng, std::uint64_t run_seed, const BuildConfig& cfg = {}) {
  for (int attempt = 0; attempt <= cfg.engine.retry_budget; ++attempt) {
    try {
      return detail::attempt_build(catalog, recorder, rng, run_seed, cfg);
    } catch (const EmptyCandidateSet&) {
      continue;
    }
  }
  throw DeadEnd(catalog.name + ": retry budget exhausted building a " +
                std::to_string(cfg.n_steps) + "-step program");
}

}  // namespace seqgen
