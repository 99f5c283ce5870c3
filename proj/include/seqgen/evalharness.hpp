#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqgen/oracle.hpp"
#include "seqgen/parser.hpp"

namespace seqgen::eval {

// Failure taxonomy. Precedence Syntax < Execution < Result: a candidate is
// classified by the earliest stage that rejects it.
enum class ErrorClass { Syntax, Execution, Result };

inline const char* error_class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::Syntax: return "syntax";
    case ErrorClass::Execution: return "execution";
    case ErrorClass::Result: return "result";
  }
  return "result";
}

struct EvalVerdict {
  bool pass = false;
  std::optional<ErrorClass> error_class;
  std::string detail;

  static EvalVerdict passed() { return {true, std::nullopt, ""}; }
  static EvalVerdict failed(ErrorClass c, std::string detail) {
    return {false, c, std::move(detail)};
  }
};

namespace detail {

// Compares one candidate run against the recorded reference run. Handles are
// rewritten to per-partition creation-order slots on both sides, so a
// candidate that creates the same objects in the same order matches even if
// raw serials differ. Returns a mismatch description, or nothing on a match.
inline std::optional<std::string> compare_run(const RunOutcome& got, const RunOutcome& want) {
  const HandleNormalizer gn(got.creation_log);
  const HandleNormalizer wn(want.creation_log);

  if (canonical_dump(gn.normalize_json(got.dump)) != canonical_dump(wn.normalize_json(want.dump)))
    return "backend state mismatch";

  if (got.result.size() != want.result.size())
    return "RESULT has " + std::to_string(got.result.size()) + " values, expected " +
           std::to_string(want.result.size());
  for (std::size_t i = 0; i < want.result.size(); ++i) {
    if (!approx_equal(gn.normalize(got.result[i]), wn.normalize(want.result[i])))
      return "RESULT[" + std::to_string(i) + "] mismatch";
  }

  // Tracked variables: names the candidate shares with the reference (given
  // inputs at minimum; all names when grading the reference against itself).
  // Candidate-private intermediates are free to differ.
  for (const auto& [name, v] : want.vars) {
    auto it = got.vars.find(name);
    if (it == got.vars.end()) continue;
    if (!approx_equal(gn.normalize(it->second), wn.normalize(v)))
      return "variable '" + name + "' mismatch";
  }
  return std::nullopt;
}

}  // namespace detail

// Grades one candidate against one oracle: parse, then re-run under the same
// seed for the default initialization and (when captured) the flipped one.
inline EvalVerdict evaluate(const std::string& candidate_text, const ScenarioCatalog& scenario,
                            const std::map<std::string, Value>& init, std::uint64_t seed,
                            const OracleRecord& oracle) {
  Program prog;
  try {
    prog = parse_candidate(strip_code_fence(candidate_text));
  } catch (const ParseError& e) {
    return EvalVerdict::failed(ErrorClass::Syntax, e.what());
  }

  struct RunSpec {
    const RunOutcome* want;
    std::map<std::string, Value> overrides;
    const char* label;
  };
  std::vector<RunSpec> runs;
  runs.push_back({&oracle.taken, {}, "default run"});
  if (oracle.flipped && oracle.flip_val)
    runs.push_back({&*oracle.flipped, {{oracle.flip_var, *oracle.flip_val}}, "flipped run"});

  for (const auto& r : runs) {
    const RunOutcome got = execute_program(prog, scenario, seed, init, r.overrides);
    if (!got.completed()) {
      if (r.want->completed())
        return EvalVerdict::failed(ErrorClass::Execution,
                                   std::string(r.label) + ": " + got.failure->error);
      if (got.failure->error != r.want->failure->error)
        return EvalVerdict::failed(ErrorClass::Result,
                                   std::string(r.label) + ": failed differently from the reference");
      continue;  // same failure as the reference
    }
    if (!r.want->completed())
      return EvalVerdict::failed(ErrorClass::Result,
                                 std::string(r.label) + ": completed where the reference failed");
    if (auto diff = detail::compare_run(got, *r.want))
      return EvalVerdict::failed(ErrorClass::Result, std::string(r.label) + ": " + *diff);
  }
  return EvalVerdict::passed();
}

// ---------------------------------------------------------------------------
// Aggregation.
// ---------------------------------------------------------------------------

struct TaskVerdict {
  std::string id;
  std::string scenario;
  EvalVerdict verdict;
};

struct Report {
  int total = 0;
  int passes = 0;
  std::map<std::string, std::pair<int, int>> per_scenario;  // scenario -> (passes, total)
  std::map<std::string, int> per_error_class;

  std::optional<double> pass_at_1() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(passes) / static_cast<double>(total);
  }
};

inline Report aggregate(const std::vector<TaskVerdict>& verdicts) {
  Report rep;
  for (const auto& v : verdicts) {
    ++rep.total;
    auto& [sp, st] = rep.per_scenario[v.scenario];
    ++st;
    if (v.verdict.pass) {
      ++rep.passes;
      ++sp;
    } else {
      ++rep.per_error_class[error_class_name(*v.verdict.error_class)];
    }
  }
  return rep;
}

// One JSONL record per task.
inline json verdict_to_json(const TaskVerdict& v) {
  return {{"id", v.id},
          {"scenario", v.scenario},
          {"class", v.verdict.pass ? "pass" : error_class_name(*v.verdict.error_class)},
          {"detail", v.verdict.detail}};
}

inline json report_to_json(const Report& rep) {
  json per_scenario = json::object();
  for (const auto& [name, pt] : rep.per_scenario) {
    per_scenario[name] = {{"passes", pt.first},
                          {"total", pt.second},
                          {"pass_at_1", pt.second == 0
                                            ? json(nullptr)
                                            : json(static_cast<double>(pt.first) / pt.second)}};
  }
  json classes = json::object();
  for (const auto& [name, count] : rep.per_error_class) classes[name] = count;
  auto p1 = rep.pass_at_1();
  return {{"total", rep.total},
          {"passes", rep.passes},
          {"pass_at_1", p1 ? json(*p1) : json(nullptr)},
          {"per_scenario", std::move(per_scenario)},
          {"per_error_class", std::move(classes)}};
}

}  // namespace seqgen::eval
