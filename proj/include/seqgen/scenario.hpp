#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqgen/trace.hpp"

namespace seqgen {

// One named argument, already evaluated, handed to a mock backend call.
struct NamedValue {
  std::string name;
  Value value;
};

// Execution-time failure inside a mock backend (NotFound, ShapeMismatch, ...).
// The oracle runner catches these and records them; they never escape it.
struct BackendError : std::runtime_error {
  explicit BackendError(const std::string& what) : std::runtime_error(what) {}
};

// In-process stand-in for the remote service a scenario talks to. Seeded
// deterministically from the run seed; assigns handles through the same
// partition/serial discipline as the generation-time schema allocator.
class MockBackend {
 public:
  virtual ~MockBackend() = default;

  // Executes one API call; returns the produced value or throws BackendError.
  virtual Value call(const std::string& api, const std::vector<NamedValue>& args) = 0;

  // Canonical snapshot of remote state for oracle comparison. Scenario-defined
  // shape; {} for scenarios without remote state.
  virtual json dump() const = 0;

  // Handles minted during this run (seeding included), in creation order.
  // Basis of creation-order resolution between runs.
  virtual const std::vector<Handle>& creation_log() const = 0;
};

// Initializer output: local program variables (the init block) plus whatever
// the schema should mirror (seeded remote rows). The backend re-derives its
// seed state from the same scenario + seed, so generation and execution agree.
struct InitState {
  StateSchema schema;
};

// Per-partition monotone handle allocator for backend use; mirrors the
// discipline of StateSchema::alloc_handle so creation logs line up.
class HandleMint {
 public:
  Handle mint(const std::string& kind) {
    Handle h{kind, counters_[kind]++};
    log_.push_back(h);
    return h;
  }
  const std::vector<Handle>& log() const { return log_; }

 private:
  std::map<std::string, std::int64_t> counters_;
  std::vector<Handle> log_;
};

struct ScenarioCatalog {
  std::string name;
  std::vector<TransitionSpec> transitions;

  // Randomized initializer; consumes the head of the run's rng stream. The
  // run seed is passed alongside so that any state the backend must replicate
  // (seeded remote rows) is derived from the seed alone, not the shared
  // stream.
  std::function<InitState(Rng&, std::uint64_t seed)> initialize;

  // Fresh backend seeded for the given run seed.
  std::function<std::unique_ptr<MockBackend>(std::uint64_t seed)> make_backend;

  const TransitionSpec* find(const std::string& api) const {
    for (const auto& t : transitions)
      if (t.name == api) return &t;
    return nullptr;
  }

  std::size_t size() const { return transitions.size(); }

  // Plain-text API documentation block for prompt assembly.
  std::string documentation() const {
    std::string out;
    for (const auto& t : transitions) {
      out += t.name;
      out += ": ";
      out += t.doc;
      out += "\n";
    }
    return out;
  }
};

// Every (transition, bindings) pair valid under `schema`, in catalog order
// then each transition's deterministic binding order. Throws
// EmptyCandidateSet when nothing applies; callers decide whether to abort or
// re-initialize.
inline std::vector<Candidate> valid_transitions(const StateSchema& schema, const Trace& trace,
                                                const ScenarioCatalog& catalog) {
  std::vector<Candidate> out;
  for (const auto& t : catalog.transitions) {
    for (auto& b : t.enumerate(schema, trace)) {
      out.push_back(Candidate{&t, std::move(b)});
    }
  }
  if (out.empty()) throw EmptyCandidateSet();
  return out;
}

}  // namespace seqgen
