#pragma once

// Shared fixtures for the selection-sampling tests: frozen recorders whose
// candidates have analytically known energy weights.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "seqgen/coverage.hpp"
#include "seqgen/engine.hpp"

namespace seqgen::testing {

// One candidate in a sampling fixture: a transition name plus the visit count
// of each pair it would cover. Counts must be >= 1 so no pair is unseen and
// selection always reaches the energy-sampling branch.
struct SamplingCand {
  std::string name;
  std::vector<std::uint64_t> pair_counts;
};

struct SamplingFixture {
  StateSchema schema;
  Trace trace;
  FrequencyRecorder recorder{CoverageMode::DataDependency};
  std::vector<TransitionSpec> specs;  // stable storage for candidate pointers
  std::vector<Candidate> candidates;
  std::vector<double> weights;  // analytic sum of 1/(count + eps) per candidate
};

inline SamplingFixture make_sampling_fixture(const std::vector<SamplingCand>& cands) {
  SamplingFixture f;
  f.specs.reserve(cands.size());
  for (const auto& c : cands) {
    TransitionSpec t;
    t.name = c.name;
    f.specs.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < cands.size(); ++i) {
    Bindings b;
    double w = 0.0;
    for (std::size_t j = 0; j < cands[i].pair_counts.size(); ++j) {
      const auto writer = "writer" + std::to_string(i) + "_" + std::to_string(j);
      const auto id = f.schema.add(writer + "_out", Value(std::int64_t{1}), Origin{1},
                                   VarRole::Local, writer);
      b.push_back(BoundArg{"arg" + std::to_string(j), id});
      const auto count = cands[i].pair_counts[j];
      for (std::uint64_t k = 0; k < count; ++k) f.recorder.record({{writer, cands[i].name}});
      w += 1.0 / (static_cast<double>(count) + kEnergyEpsilon);
    }
    f.candidates.push_back(Candidate{&f.specs[i], std::move(b)});
    f.weights.push_back(w);
  }
  return f;
}

// The three canonical frozen recorders behind the sampling-law check: plain
// single-pair weights, multi-pair energy sums, and a skewed five-way split.
inline std::vector<std::vector<SamplingCand>> sampling_law_fixtures() {
  return {
      {{"alpha", {1}}, {"bravo", {2}}, {"charlie", {4}}},
      {{"scatter", {1, 2}}, {"gather", {3}}, {"fuse", {2, 5, 1}}, {"drain", {4, 4}}},
      {{"s0", {1}}, {"s1", {1}}, {"s2", {2}}, {"s3", {3}}, {"s4", {8}}},
  };
}

// Total-variation distance between empirical selection frequencies over
// `draws` rounds and the fixture's normalized analytic weights.
inline double sampling_tv(SamplingFixture& f, int draws, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> hits(f.candidates.size(), 0);
  for (int i = 0; i < draws; ++i)
    ++hits[select_transition(f.candidates, f.schema, f.trace, f.recorder, rng)];
  double total = 0.0;
  for (double w : f.weights) total += w;
  double tv = 0.0;
  for (std::size_t i = 0; i < f.candidates.size(); ++i)
    tv += std::abs(static_cast<double>(hits[i]) / draws - f.weights[i] / total);
  return 0.5 * tv;
}

}  // namespace seqgen::testing
