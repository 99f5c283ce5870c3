#pragma once

#include <functional>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "seqgen/coverage.hpp"
#include "seqgen/scenario.hpp"

namespace seqgen {

struct EngineConfig {
  int retry_budget = 20;  // re-initializations before giving up as DeadEnd
  double epsilon = kEnergyEpsilon;
  bool guided = true;  // false: uniform candidate selection (coverage off)
};

// Per-step audit record for property tests: whether new coverage was
// reachable and whether the accepted candidate claims some of it.
struct StepAudit {
  std::size_t candidate_count = 0;
  bool any_unseen = false;
  bool chosen_unseen = false;
  bool redrawn = false;
};

// Guided choice among valid candidates:
//   1. if any candidate covers >=1 unseen pair, take the one covering the
//      most unseen pairs (ties: lexicographically smallest transition name,
//      then an rng draw among the exact ties);
//   2. otherwise sample proportionally to energy 1/(count + epsilon) summed
//      over the candidate's pair set.
inline std::size_t select_transition(const std::vector<Candidate>& candidates,
                                     const StateSchema& schema, const Trace& trace,
                                     const FrequencyRecorder& recorder, Rng& rng,
                                     double epsilon = kEnergyEpsilon) {
  std::vector<std::vector<PairTransition>> pairs(candidates.size());
  int best_unseen = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    pairs[i] = pairs_of(candidates[i], schema, trace, recorder);
    best_unseen = std::max(best_unseen, recorder.unseen(pairs[i]));
  }

  if (best_unseen > 0) {
    // New-coverage priority. Narrow to max unseen count, then smallest name.
    const std::string* best_name = nullptr;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (recorder.unseen(pairs[i]) != best_unseen) continue;
      const auto& name = candidates[i].transition->name;
      if (!best_name || name < *best_name) best_name = &name;
    }
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (recorder.unseen(pairs[i]) == best_unseen && candidates[i].transition->name == *best_name)
        ties.push_back(i);
    }
    return ties[rng.uniform_index(ties.size())];
  }

  // Energy-proportional sampling. Cumulative walk keeps the draw sequence
  // portable (std::discrete_distribution is implementation-defined).
  double total = 0.0;
  for (const auto& p : pairs) total += recorder.energy(p, epsilon);
  double u = rng.uniform_double() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    cum += recorder.energy(pairs[i], epsilon);
    if (u < cum) return i;
  }
  return candidates.size() - 1;  // fp slack on the last bucket
}

// Drives Algorithm-style trace construction for one path. Copyable: the
// program builder snapshots an engine at the split point and resumes the copy
// down the else branch (with next_id bumped and the recorder swapped).
class TraceEngine {
 public:
  TraceEngine(const ScenarioCatalog& catalog, FrequencyRecorder& recorder, Rng& rng,
              EngineConfig cfg = {})
      : catalog_(&catalog), recorder_(&recorder), rng_(&rng), cfg_(cfg) {}

  // Runs the scenario initializer, replacing schema and trace.
  void reset() {
    auto init = catalog_->initialize(*rng_, run_seed_);
    schema_ = std::move(init.schema);
    trace_ = Trace(schema_);
    dups_.clear();
  }

  // One generation step: enumerate, select (with one duplicate redraw),
  // record coverage, apply. Throws EmptyCandidateSet when nothing applies.
  const TraceStep& step() {
    auto candidates = valid_transitions(schema_, trace_, *catalog_);
    StepAudit audit;
    audit.candidate_count = candidates.size();

    std::size_t idx = pick(candidates);
    if (is_duplicate(candidates[idx])) {
      idx = pick(candidates);  // redraw once, then accept whatever comes
      audit.redrawn = true;
    }
    const Candidate& chosen = candidates[idx];

    auto chosen_pairs = pairs_of(chosen, schema_, trace_, *recorder_);
    for (const auto& c : candidates) {
      if (recorder_->unseen(pairs_of(c, schema_, trace_, *recorder_)) > 0) {
        audit.any_unseen = true;
        break;
      }
    }
    audit.chosen_unseen = recorder_->unseen(chosen_pairs) > 0;
    recorder_->record(chosen_pairs);

    TraceStep s;
    s.index = static_cast<int>(trace_.size()) + 1;
    s.transition = chosen.transition->name;
    s.bindings = chosen.bindings;
    s.fingerprint = param_fingerprint(chosen.bindings);
    EffectContext ctx{s.index, run_seed_};
    s.produced = apply_transition(schema_, *chosen.transition, chosen.bindings, ctx).produced;
    dups_.emplace(s.transition, s.fingerprint);
    trace_.push(std::move(s));
    if (observer_) observer_(audit);
    return trace_.steps().back();
  }

  void run_steps(int count) {
    for (int i = 0; i < count; ++i) step();
  }

  const StateSchema& schema() const { return schema_; }
  StateSchema& schema() { return schema_; }
  const Trace& trace() const { return trace_; }
  Trace& trace() { return trace_; }

  void set_run_seed(std::uint64_t seed) { run_seed_ = seed; }
  std::uint64_t run_seed() const { return run_seed_; }

  void set_recorder(FrequencyRecorder& rec) { recorder_ = &rec; }
  FrequencyRecorder& recorder() { return *recorder_; }

  // Imports another engine's duplicate ledger (fork hand-off: the else branch
  // must not re-create steps already present on the prefix or if branch).
  void adopt_duplicates(const TraceEngine& other) {
    dups_.insert(other.dups_.begin(), other.dups_.end());
  }

  void set_observer(std::function<void(const StepAudit&)> obs) { observer_ = std::move(obs); }

  const EngineConfig& config() const { return cfg_; }

 private:
  std::size_t pick(const std::vector<Candidate>& candidates) {
    if (!cfg_.guided) return rng_->uniform_index(candidates.size());
    return select_transition(candidates, schema_, trace_, *recorder_, *rng_, cfg_.epsilon);
  }

  bool is_duplicate(const Candidate& c) const {
    return dups_.count({c.transition->name, param_fingerprint(c.bindings)}) > 0;
  }

  const ScenarioCatalog* catalog_;
  FrequencyRecorder* recorder_;
  Rng* rng_;
  EngineConfig cfg_;
  std::uint64_t run_seed_ = 0;
  StateSchema schema_;
  Trace trace_;
  std::set<std::pair<std::string, std::uint64_t>> dups_;
  std::function<void(const StepAudit&)> observer_;
};

// Full linear trace of length `n`; re-initializes on dead ends up to the
// retry budget, then reports DeadEnd.
inline Trace generate_trace(const ScenarioCatalog& catalog, int n, FrequencyRecorder& recorder,
                            Rng& rng, EngineConfig cfg = {}, std::uint64_t run_seed = 0) {
  TraceEngine eng(catalog, recorder, rng, cfg);
  eng.set_run_seed(run_seed);
  for (int attempt = 0; attempt <= cfg.retry_budget; ++attempt) {
    eng.reset();
    try {
      eng.run_steps(n);
      return eng.trace();
    } catch (const EmptyCandidateSet&) {
      continue;  // fresh initializer draw
    }
  }
  throw DeadEnd(catalog.name + ": retry budget exhausted generating a length-" +
                std::to_string(n) + " trace");
}

}  // namespace seqgen
