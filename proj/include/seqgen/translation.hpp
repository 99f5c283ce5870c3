#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqgen/program.hpp"
#include "seqgen/render.hpp"

namespace seqgen::translation {

// Transport-level failure of a completion provider. Callers abort the item
// (not the campaign) when this escapes translate(); the live client retries
// internally before throwing.
struct TransportError : std::runtime_error {
  explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

struct Turn {
  std::string role;  // "user" | "assistant"
  std::string content;
};

// Text-completion abstraction behind which both negotiation agents sit. One
// client instance serves both roles; the system text selects the role.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::string complete(const std::string& system, const std::vector<Turn>& turns) = 0;
  // Decoding settings recorded in transcripts for reproducibility.
  virtual std::string decoding() const { return "provider-default"; }
};

// Replays a fixed reply sequence across both roles, in call order. Exact
// fixtures for the negotiation tests.
class ScriptedClient : public CompletionClient {
 public:
  explicit ScriptedClient(std::vector<std::string> replies) : replies_(std::move(replies)) {}

  std::string complete(const std::string&, const std::vector<Turn>&) override {
    if (next_ >= replies_.size()) throw CorpusError("scripted client exhausted its replies");
    return replies_[next_++];
  }

  std::string decoding() const override { return "scripted"; }

  std::size_t calls() const { return next_; }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

// ---------------------------------------------------------------------------
// Prompts. Byte-stable for a fixed program; the generator prompt embeds the
// full source listing and the instruction-writing requirements, and frames
// init-block constants as given inputs whose literal values must not be
// restated inside the instruction.
// ---------------------------------------------------------------------------

inline const char* kGeneratorSystem =
    "You write task instructions for software developers. Given a reference program, produce a "
    "natural-language instruction such that a developer who has never seen the program can "
    "rewrite it exactly. Requirements: (1) the instruction must enable accurate reproduction of "
    "the program, including every call, argument, branch condition, and the order of returned "
    "values; (2) it must read the way developers typically describe tasks to each other; (3) it "
    "must contain only essential information. The initialization constants at the top of the "
    "program are given inputs: refer to them by name and role, and do not restate their literal "
    "values inside the instruction. Output only the instruction text.";

inline const char* kEvaluatorSystem =
    "You judge whether a task instruction lets a developer reproduce a reference program "
    "exactly, assuming the initialization constants are provided as given inputs. If the "
    "instruction is sufficient and unambiguous, output <OK>. If no instruction could plausibly "
    "convey this program, output <IMPOSSIBLE>. Otherwise output a short diagnosis of what is "
    "missing or ambiguous, and neither token.";

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::string build_generator_prompt(const Program& program, const std::string& scenario_docs) {
  std::string out;
  out += "API REFERENCE:\n";
  out += scenario_docs;
  out += "\nPROGRAM:\n```\n";
  out += render_source(program);
  out += "```\n\nGIVEN INPUTS (bound before the task starts; describe by role, never by value):";
  for (const auto* d : program.init_block()) {
    out += ' ';
    out += d->name;
  }
  out += "\n\nWrite the instruction.";
  return out;
}

inline std::string build_evaluator_prompt(const Program& program, const std::string& scenario_docs,
                                          const std::string& draft) {
  std::string out;
  out += "API REFERENCE:\n";
  out += scenario_docs;
  out += "\nPROGRAM:\n```\n";
  out += render_source(program);
  out += "```\n\nINSTRUCTION UNDER REVIEW:\n";
  out += draft;
  out += "\n\nJudge the instruction.";
  return out;
}

// ---------------------------------------------------------------------------
// Verdicts.
// ---------------------------------------------------------------------------

struct Verdict {
  enum Kind { Ok, Revise, Impossible } kind = Revise;
  std::string diagnosis;  // Revise only: the evaluator's full text
};

inline Verdict parse_verdict(const std::string& text) {
  const std::string t = detail::trim(text);
  const bool ok = t.find("<OK>") != std::string::npos;
  const bool imp = t.find("<IMPOSSIBLE>") != std::string::npos;
  if (ok && imp) return {Verdict::Revise, t};  // contradictory: conservative
  if (ok) return {Verdict::Ok, ""};
  if (imp) return {Verdict::Impossible, ""};
  return {Verdict::Revise, t};
}

// ---------------------------------------------------------------------------
// Negotiation loop.
// ---------------------------------------------------------------------------

struct Round {
  std::string draft;
  std::string evaluator_text;
  Verdict verdict;
};

enum class Outcome { Accepted, Impossible, Exhausted };

struct NegotiationTranscript {
  std::vector<Round> rounds;
  Outcome outcome = Outcome::Exhausted;
  std::string instruction;  // accepted draft, or the last draft when exhausted
  std::string decoding;
};

// Exhausted items stay in the corpus but are flagged for manual review.
inline bool needs_review(const NegotiationTranscript& t) { return t.outcome == Outcome::Exhausted; }

inline NegotiationTranscript translate(const Program& program, const std::string& scenario_docs,
                                       CompletionClient& client, int max_rounds = 3) {
  NegotiationTranscript t;
  t.decoding = client.decoding();
  std::vector<Turn> gen_turns{{"user", build_generator_prompt(program, scenario_docs)}};
  for (int round = 0; round < max_rounds; ++round) {
    const std::string draft = client.complete(kGeneratorSystem, gen_turns);
    const std::string etext =
        client.complete(kEvaluatorSystem, {{"user", build_evaluator_prompt(program, scenario_docs, draft)}});
    const Verdict v = parse_verdict(etext);
    t.rounds.push_back({draft, etext, v});
    if (v.kind == Verdict::Ok) {
      t.outcome = Outcome::Accepted;
      t.instruction = detail::trim(draft);
      return t;
    }
    if (v.kind == Verdict::Impossible) {
      t.outcome = Outcome::Impossible;
      t.instruction.clear();
      return t;
    }
    gen_turns.push_back({"assistant", draft});
    gen_turns.push_back({"user", "The evaluator rejected this draft:\n" + v.diagnosis +
                                     "\nRewrite the instruction so the diagnosis no longer applies. "
                                     "Output only the revised instruction."});
  }
  t.outcome = Outcome::Exhausted;
  t.instruction = t.rounds.empty() ? "" : detail::trim(t.rounds.back().draft);
  return t;
}

// ---------------------------------------------------------------------------
// Deterministic offline generator: renders the program into a step-by-step
// instruction. Used by the mock client so campaigns run without a provider.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string kind_phrase(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Int: return "an integer";
    case ValueKind::Float: return "a number";
    case ValueKind::Bool: return "a boolean";
    case ValueKind::Text: return "a text string";
    case ValueKind::Tensor: {
      std::string s = "a tensor of shape [";
      const auto& shape = v.as_tensor().shape;
      for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
      }
      return s + "]";
    }
    case ValueKind::Handle: return "a " + v.as_handle().kind + " handle";
    case ValueKind::Record: return "a record";
    case ValueKind::List: return "a list";
  }
  return "a value";
}

// name -> how the instruction refers to it ("the given input x" / "the step-3
// output").
using NamePhrases = std::map<std::string, std::string>;

inline std::string operand_phrase(const Operand& o, const NamePhrases& phrases) {
  if (!o.is_ref()) return render_literal(o.literal());
  auto it = phrases.find(o.ref());
  return it != phrases.end() ? it->second : o.ref();
}

inline void describe_call(const CallStmt& c, int step, NamePhrases& phrases, std::string& out) {
  out += "Step " + std::to_string(step) + ": call " + c.api;
  if (!c.args.empty()) {
    out += " with ";
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      if (i) out += ", ";
      out += c.args[i].param + " = " + operand_phrase(c.args[i].operand, phrases);
    }
  }
  out += "; keep its output (the step-" + std::to_string(step) + " output).\n";
  phrases[c.target] = "the step-" + std::to_string(step) + " output";
}

inline void describe_result(const std::vector<std::string>& names, const NamePhrases& phrases,
                            std::string& out) {
  if (names.empty()) {
    out += "Return nothing.\n";
    return;
  }
  out += "Return, in order: ";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    auto it = phrases.find(names[i]);
    out += it != phrases.end() ? it->second : names[i];
  }
  out += ".\n";
}

}  // namespace detail

inline std::string template_instruction(const Program& program) {
  std::string out;
  detail::NamePhrases phrases;

  const auto init = program.init_block();
  if (!init.empty()) {
    out += "You are given these already-bound inputs (concrete values are supplied at setup time; "
           "do not hard-code them):";
    for (std::size_t i = 0; i < init.size(); ++i) {
      out += i ? ", " : " ";
      out += init[i]->name + " (" + detail::kind_phrase(init[i]->value) + ")";
      phrases[init[i]->name] = "the given input " + init[i]->name;
    }
    out += ".\n";
  }

  int step = 0;
  for (const auto& s : program.stmts) {
    if (const auto* c = std::get_if<CallStmt>(&s)) {
      detail::describe_call(*c, ++step, phrases, out);
    } else if (const auto* r = std::get_if<ResultStmt>(&s)) {
      detail::describe_result(r->names, phrases, out);
    } else if (const auto* f = std::get_if<IfStmt>(&s)) {
      std::string lhs = phrases.count(f->cond.lhs) ? phrases[f->cond.lhs] : f->cond.lhs;
      if (f->cond.dim >= 0) lhs = "the size of dimension " + std::to_string(f->cond.dim) + " of " + lhs;
      out += "If " + lhs + " equals " + detail::operand_phrase(f->cond.rhs, phrases) + ":\n";
      const int branch_start = step;
      {
        auto branch_phrases = phrases;
        int bstep = branch_start;
        for (const auto& bs : f->then_body) {
          if (const auto* bc = std::get_if<CallStmt>(&bs))
            detail::describe_call(*bc, ++bstep, branch_phrases, out);
          else if (const auto* br = std::get_if<ResultStmt>(&bs))
            detail::describe_result(br->names, branch_phrases, out);
        }
      }
      out += "Otherwise:\n";
      {
        auto branch_phrases = phrases;
        int bstep = branch_start;
        for (const auto& bs : f->else_body) {
          if (const auto* bc = std::get_if<CallStmt>(&bs))
            detail::describe_call(*bc, ++bstep, branch_phrases, out);
          else if (const auto* br = std::get_if<ResultStmt>(&bs))
            detail::describe_result(br->names, branch_phrases, out);
        }
      }
    }
  }
  return detail::trim(out);
}

// Offline client: answers the generator role with the template instruction
// and the evaluator role with <OK>.
class TemplateClient : public CompletionClient {
 public:
  explicit TemplateClient(const Program& program) : instruction_(template_instruction(program)) {}

  std::string complete(const std::string& system, const std::vector<Turn>&) override {
    return system == kEvaluatorSystem ? "<OK>" : instruction_;
  }

  std::string decoding() const override { return "template"; }

 private:
  std::string instruction_;
};

// ---------------------------------------------------------------------------
// Transcript serialization (audit artifact stored alongside corpus entries).
// ---------------------------------------------------------------------------

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Accepted: return "accepted";
    case Outcome::Impossible: return "impossible";
    case Outcome::Exhausted: return "exhausted";
  }
  return "exhausted";
}

inline json transcript_to_json(const NegotiationTranscript& t) {
  json rounds = json::array();
  for (const auto& r : t.rounds) {
    const char* kind = r.verdict.kind == Verdict::Ok         ? "ok"
                       : r.verdict.kind == Verdict::Revise   ? "revise"
                                                             : "impossible";
    rounds.push_back({{"draft", r.draft},
                      {"evaluator_text", r.evaluator_text},
                      {"verdict", kind},
                      {"diagnosis", r.verdict.diagnosis}});
  }
  return {{"rounds", std::move(rounds)},
          {"outcome", outcome_name(t.outcome)},
          {"instruction", t.instruction},
          {"decoding", t.decoding},
          {"needs_review", needs_review(t)}};
}

}  // namespace seqgen::translation
