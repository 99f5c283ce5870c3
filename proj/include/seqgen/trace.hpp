#pragma once

#include <string>
#include <vector>

#include "seqgen/transition.hpp"

namespace seqgen {

struct TraceStep {
  int index = 0;  // 1-based position within its path
  std::string transition;
  Bindings bindings;
  std::vector<VarId> produced;
  std::uint64_t fingerprint = 0;  // hash of literal choices
};

// A path of applied transitions plus the schema snapshot it started from.
// Replaying `steps` against `initial` reproduces the ending schema.
class Trace {
 public:
  Trace() = default;
  explicit Trace(StateSchema initial) : initial_(std::move(initial)) {}

  const StateSchema& initial() const { return initial_; }
  const std::vector<TraceStep>& steps() const { return steps_; }
  std::vector<TraceStep>& steps() { return steps_; }

  void push(TraceStep s) { steps_.push_back(std::move(s)); }
  bool empty() const { return steps_.empty(); }
  std::size_t size() const { return steps_.size(); }

  // Name of the most recent transition, or the INIT sentinel.
  const std::string& previous_transition() const {
    return steps_.empty() ? kInitSentinel : steps_.back().transition;
  }

 private:
  StateSchema initial_;
  std::vector<TraceStep> steps_;
};

}  // namespace seqgen
