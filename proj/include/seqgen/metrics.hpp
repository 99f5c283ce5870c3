#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "seqgen/program.hpp"

namespace seqgen::metrics {

// ---------------------------------------------------------------------------
// Per-program structure metrics. All of them are defined over execution
// paths: a linear program has one, a split program two (prefix + branch),
// and the program-level value is the maximum over paths unless noted.
// ---------------------------------------------------------------------------

// Call-name sequence of each execution path, flattened.
inline std::vector<std::vector<std::string>> call_name_paths(const Program& p) {
  std::vector<std::vector<std::string>> out;
  for (const auto& path : program_paths(p)) {
    std::vector<std::string> names;
    names.reserve(path.calls.size());
    for (const auto* c : path.calls) names.push_back(c->api);
    out.push_back(std::move(names));
  }
  return out;
}

namespace detail {
inline std::int64_t count_calls(const std::vector<Stmt>& stmts) {
  std::int64_t n = 0;
  for (const auto& s : stmts) {
    if (std::holds_alternative<CallStmt>(s)) {
      ++n;
    } else if (const auto* f = std::get_if<IfStmt>(&s)) {
      n += count_calls(f->then_body) + count_calls(f->else_body);
    }
  }
  return n;
}
}  // namespace detail

// Total number of API calls in the rendered program (both branches of a
// split count; the shared prefix counts once).
inline std::int64_t api_call_count(const Program& p) { return detail::count_calls(p.stmts); }

// Longest chain in the call-level data-dependency DAG, counted in edges: a
// single call (or any program whose calls consume only init constants) has
// depth 0. Program value is the max over execution paths.
inline std::int64_t path_depth(const Program& p) {
  std::int64_t best = 0;
  for (const auto& path : program_paths(p)) {
    std::map<std::string, std::int64_t> level;  // call target -> edges on the longest chain into it
    for (const auto* c : path.calls) {
      std::int64_t lv = 0;
      for (const auto& a : c->args) {
        if (!a.operand.is_ref()) continue;
        auto it = level.find(a.operand.ref());
        if (it != level.end()) lv = std::max(lv, it->second + 1);
      }
      level[c->target] = lv;
      best = std::max(best, lv);
    }
  }
  return best;
}

namespace detail {
inline void collect_calls(const std::vector<Stmt>& stmts, std::vector<const CallStmt*>& out) {
  for (const auto& s : stmts) {
    if (const auto* c = std::get_if<CallStmt>(&s)) {
      out.push_back(c);
    } else if (const auto* f = std::get_if<IfStmt>(&s)) {
      collect_calls(f->then_body, out);
      collect_calls(f->else_body, out);
    }
  }
}
}  // namespace detail

// Distinct variables that are the output of one call and an input of another
// anywhere in the rendered program (both branches of a split count). Init
// constants don't count.
inline std::int64_t binding_count(const Program& p) {
  std::vector<const CallStmt*> calls;
  detail::collect_calls(p.stmts, calls);
  std::set<std::string> produced;
  for (const auto* c : calls) produced.insert(c->target);
  std::set<std::string> bound;
  for (const auto* c : calls) {
    for (const auto& a : c->args) {
      if (!a.operand.is_ref()) continue;
      const auto& r = a.operand.ref();
      if (r != c->target && produced.count(r)) bound.insert(r);
    }
  }
  return static_cast<std::int64_t>(bound.size());
}

// Whitespace-delimited token count; the length proxy for instructions and
// rendered source.
inline std::int64_t word_count(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  std::int64_t n = 0;
  while (in >> tok) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Adjacent transition coverage: |distinct adjacent call pairs across all
// execution paths of a corpus prefix| / M^2, where M is the number of APIs
// in the scenario. Cumulative over the corpus, so the curve is monotone.
// ---------------------------------------------------------------------------

class AtcTracker {
 public:
  void add_path(const std::vector<std::string>& calls) {
    for (std::size_t i = 0; i + 1 < calls.size(); ++i) pairs_.emplace(calls[i], calls[i + 1]);
  }

  void add_program(const Program& p) {
    for (const auto& path : call_name_paths(p)) add_path(path);
  }

  double atc(std::size_t m) const {
    if (m == 0) return 0.0;
    return static_cast<double>(pairs_.size()) / (static_cast<double>(m) * static_cast<double>(m));
  }

  std::size_t distinct_pairs() const { return pairs_.size(); }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

inline double adjacent_transition_coverage(const std::vector<Program>& corpus, std::size_t m) {
  AtcTracker t;
  for (const auto& p : corpus) t.add_program(p);
  return t.atc(m);
}

// One (programs-consumed, cumulative ATC) point per program, in corpus order.
inline std::vector<std::pair<std::size_t, double>> coverage_curve(const std::vector<Program>& corpus,
                                                                  std::size_t m) {
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(corpus.size());
  AtcTracker t;
  std::size_t i = 0;
  for (const auto& p : corpus) {
    t.add_program(p);
    out.emplace_back(++i, t.atc(m));
  }
  return out;
}

inline std::string curve_csv(const std::vector<std::pair<std::size_t, double>>& curve) {
  std::string out = "program_index,atc\n";
  for (const auto& [i, v] : curve) {
    out += std::to_string(i);
    out += ',';
    out += canonical_float(v);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus-level stats.
// ---------------------------------------------------------------------------

struct ProgramStats {
  std::string id;
  std::int64_t api_call_count = 0;
  std::int64_t path_depth = 0;
  std::int64_t binding_count = 0;
  std::int64_t instruction_length_words = 0;
  std::int64_t code_length_words = 0;
};

inline ProgramStats program_stats(std::string id, const Program& p, const std::string& instruction,
                                  const std::string& source) {
  ProgramStats s;
  s.id = std::move(id);
  s.api_call_count = api_call_count(p);
  s.path_depth = path_depth(p);
  s.binding_count = binding_count(p);
  s.instruction_length_words = word_count(instruction);
  s.code_length_words = word_count(source);
  return s;
}

struct CorpusStats {
  std::vector<ProgramStats> per_program;
  std::vector<std::pair<std::size_t, double>> atc_series;
  double mean_api_call_count = 0.0;
  double mean_path_depth = 0.0;
  double mean_binding_count = 0.0;
  double mean_instruction_length_words = 0.0;
  double mean_code_length_words = 0.0;
};

inline CorpusStats corpus_stats(std::vector<ProgramStats> per_program,
                                std::vector<std::pair<std::size_t, double>> atc_series) {
  CorpusStats cs;
  cs.per_program = std::move(per_program);
  cs.atc_series = std::move(atc_series);
  if (cs.per_program.empty()) return cs;
  const double n = static_cast<double>(cs.per_program.size());
  for (const auto& s : cs.per_program) {
    cs.mean_api_call_count += static_cast<double>(s.api_call_count);
    cs.mean_path_depth += static_cast<double>(s.path_depth);
    cs.mean_binding_count += static_cast<double>(s.binding_count);
    cs.mean_instruction_length_words += static_cast<double>(s.instruction_length_words);
    cs.mean_code_length_words += static_cast<double>(s.code_length_words);
  }
  cs.mean_api_call_count /= n;
  cs.mean_path_depth /= n;
  cs.mean_binding_count /= n;
  cs.mean_instruction_length_words /= n;
  cs.mean_code_length_words /= n;
  return cs;
}

inline json corpus_stats_to_json(const CorpusStats& cs) {
  json programs = json::array();
  for (const auto& s : cs.per_program) {
    programs.push_back({{"id", s.id},
                        {"api_call_count", s.api_call_count},
                        {"path_depth", s.path_depth},
                        {"binding_count", s.binding_count},
                        {"instruction_length_words", s.instruction_length_words},
                        {"code_length_words", s.code_length_words}});
  }
  json series = json::array();
  for (const auto& [i, v] : cs.atc_series) series.push_back({i, v});
  return json{{"programs", std::move(programs)},
              {"means",
               {{"api_call_count", cs.mean_api_call_count},
                {"path_depth", cs.mean_path_depth},
                {"binding_count", cs.mean_binding_count},
                {"instruction_length_words", cs.mean_instruction_length_words},
                {"code_length_words", cs.mean_code_length_words}}},
              {"atc",
               {{"final", cs.atc_series.empty() ? 0.0 : cs.atc_series.back().second},
                {"series", std::move(series)}}}};
}

}  // namespace seqgen::metrics
