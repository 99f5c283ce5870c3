#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seqgen/trace.hpp"

namespace seqgen {

// Directed (producer, consumer) pair of transition names. `producer` is the
// INIT sentinel when the consumed state came straight from initialization.
using PairTransition = std::pair<std::string, std::string>;

enum class CoverageMode {
  DataDependency,  // producer of each consumed var -> consumer
  Adjacent,        // previous transition -> consumer
  Off,             // no guidance: uniform selection (recorder still counts)
};

inline const char* coverage_mode_name(CoverageMode m) {
  switch (m) {
    case CoverageMode::DataDependency: return "data_dependency";
    case CoverageMode::Adjacent: return "adjacent";
    case CoverageMode::Off: return "off";
  }
  return "?";
}

inline CoverageMode coverage_mode_from_name(const std::string& s) {
  if (s == "data_dependency") return CoverageMode::DataDependency;
  if (s == "adjacent") return CoverageMode::Adjacent;
  if (s == "off") return CoverageMode::Off;
  throw CorpusError("unknown coverage mode: " + s);
}

constexpr double kEnergyEpsilon = 1e-6;

// Visit counts per pair transition. Counts only ever increase; campaigns own
// one recorder and the program builder clones it across an else-branch fork,
// merging by per-pair maximum on rejoin.
class FrequencyRecorder {
 public:
  explicit FrequencyRecorder(CoverageMode mode = CoverageMode::DataDependency) : mode_(mode) {}

  CoverageMode mode() const { return mode_; }

  std::uint64_t count(const PairTransition& p) const {
    auto it = counts_.find(p);
    return it == counts_.end() ? 0 : it->second;
  }

  // Increments every pair in `pairs` by exactly one.
  void record(const std::vector<PairTransition>& pairs) {
    for (const auto& p : pairs) ++counts_[p];
  }

  // Energy of a candidate whose step would cover `pairs`: sum over pairs of
  // 1 / (count + epsilon).
  double energy(const std::vector<PairTransition>& pairs, double epsilon = kEnergyEpsilon) const {
    double e = 0.0;
    for (const auto& p : pairs) e += 1.0 / (static_cast<double>(count(p)) + epsilon);
    return e;
  }

  // Number of pairs in `pairs` never seen before (the new-coverage count).
  int unseen(const std::vector<PairTransition>& pairs) const {
    int n = 0;
    for (const auto& p : pairs)
      if (count(p) == 0) ++n;
    return n;
  }

  // Distinct covered pairs; pairs whose producer is the INIT sentinel can be
  // excluded so adjacent-mode totals line up with adjacent-pair metrics.
  std::size_t covered_pairs(bool include_init = true) const {
    if (include_init) return counts_.size();
    std::size_t n = 0;
    for (const auto& [p, c] : counts_)
      if (p.first != kInitSentinel) ++n;
    return n;
  }

  std::uint64_t total_count() const {
    std::uint64_t n = 0;
    for (const auto& [p, c] : counts_) n += c;
    return n;
  }

  // Per-pair maximum merge, used when an else-branch fork rejoins. The fork's
  // recorder starts as a copy, so max keeps both branches' increments without
  // double-counting the shared prefix.
  void merge_max(const FrequencyRecorder& other) {
    for (const auto& [p, c] : other.counts_) {
      auto& mine = counts_[p];
      mine = std::max(mine, c);
    }
  }

  const std::map<PairTransition, std::uint64_t>& counts() const { return counts_; }

  nlohmann::json to_json() const {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [p, c] : counts_) pairs.push_back({p.first, p.second, c});
    return {{"mode", coverage_mode_name(mode_)}, {"counts", std::move(pairs)}};
  }

  static FrequencyRecorder from_json(const nlohmann::json& j) {
    FrequencyRecorder r(coverage_mode_from_name(j.at("mode").get<std::string>()));
    for (const auto& e : j.at("counts")) {
      r.counts_[{e.at(0).get<std::string>(), e.at(1).get<std::string>()}] =
          e.at(2).get<std::uint64_t>();
    }
    return r;
  }

 private:
  CoverageMode mode_;
  std::map<PairTransition, std::uint64_t> counts_;
};

// Pair transitions a candidate would cover at the current step.
//
// Data-dependency mode: one pair per consumed state var, from that var's
// latest writer (INIT sentinel when it came from initialization). A candidate
// that consumes no state vars falls back to a single adjacent pair so
// stateless calls still participate in coverage. Adjacent mode: always the
// single (previous transition, candidate) pair.
inline std::vector<PairTransition> pairs_of(const Candidate& cand, const StateSchema& schema,
                                            const Trace& trace, CoverageMode mode) {
  std::vector<PairTransition> out;
  const std::string& consumer = cand.transition->name;
  if (mode == CoverageMode::Adjacent) {
    out.emplace_back(trace.previous_transition(), consumer);
    return out;
  }
  std::set<PairTransition> seen;
  for (const auto& b : cand.bindings) {
    if (!b.is_ref()) continue;
    const auto* v = schema.find(b.ref());
    if (!v) continue;
    const std::string& producer = v->last_writer.empty() ? kInitSentinel : v->last_writer;
    auto p = PairTransition{producer, consumer};
    if (seen.insert(p).second) out.push_back(std::move(p));
  }
  if (out.empty()) out.emplace_back(trace.previous_transition(), consumer);
  return out;
}

inline std::vector<PairTransition> pairs_of(const Candidate& cand, const StateSchema& schema,
                                            const Trace& trace, const FrequencyRecorder& rec) {
  // Off mode still records something sensible: treat it as data-dependency.
  auto m = rec.mode() == CoverageMode::Off ? CoverageMode::DataDependency : rec.mode();
  return pairs_of(cand, schema, trace, m);
}

}  // namespace seqgen
