#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "seqgen/state.hpp"

namespace seqgen {

// One bound parameter: either a reference to a live state variable or a
// sampled literal.
struct BoundArg {
  std::string param;
  std::variant<VarId, Value> arg;

  bool is_ref() const { return arg.index() == 0; }
  VarId ref() const { return std::get<VarId>(arg); }
  const Value& literal() const { return std::get<Value>(arg); }
};

using Bindings = std::vector<BoundArg>;

enum class ParamKind { StateRef, Literal };

struct ParamSlot {
  std::string name;
  ParamKind kind;
};

struct EffectContext {
  int step = 0;            // 1-based trace step applying the effect
  std::uint64_t seed = 0;  // run seed; keys deterministic weight generation
};

struct EffectResult {
  std::vector<VarId> produced;  // local vars minted by this call, in order
};

class Trace;  // fwd

// A schema-level API operation: applicability via candidate-binding
// enumeration, plus a deterministic effect on the schema.
struct TransitionSpec {
  std::string name;
  std::vector<ParamSlot> params;
  std::string doc;  // short plain-text documentation used in prompts

  // All valid bindings under `schema`, in deterministic order (state vars in
  // schema order, literal domains in domain order). Empty when inapplicable.
  std::function<std::vector<Bindings>(const StateSchema&, const Trace&)> enumerate;

  // Applies the call; mutates schema (value semantics at the call site: the
  // engine copies schemas when it needs snapshots). Must be deterministic in
  // (schema, bindings, ctx.seed).
  std::function<EffectResult(StateSchema&, const Bindings&, const EffectContext&)> apply;
};

struct Candidate {
  const TransitionSpec* transition = nullptr;
  Bindings bindings;
};

struct ScenarioCatalog;  // fwd (scenario.hpp)

// Hash of the literal choices in a binding; state references are excluded by
// contract. Used only for soft duplicate suppression inside one trace.
inline std::uint64_t param_fingerprint(const Bindings& bindings) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& b : bindings) {
    if (!b.is_ref()) {
      h = fnv1a(b.param, h);
      h = fnv1a(canonical_dump(value_to_json(b.literal())), h);
    }
  }
  return h;
}

inline void check_bindings_live(const StateSchema& schema, const TransitionSpec& t,
                                const Bindings& bindings) {
  for (const auto& b : bindings) {
    if (!b.is_ref()) continue;
    const auto* v = schema.find(b.ref());
    if (!v) throw StaleBinding(t.name + ": binding references unknown var id " + std::to_string(b.ref()));
    if (!v->live) throw StaleBinding(t.name + ": binding references dead var " + v->name);
  }
}

// Applies one transition to the schema after re-checking binding liveness.
// Produced vars carry producer = ctx.step.
inline EffectResult apply_transition(StateSchema& schema, const TransitionSpec& t,
                                     const Bindings& bindings, const EffectContext& ctx) {
  check_bindings_live(schema, t, bindings);
  return t.apply(schema, bindings, ctx);
}

}  // namespace seqgen
