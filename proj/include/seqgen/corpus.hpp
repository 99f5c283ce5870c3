#pragma once

#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqgen/builder.hpp"
#include "seqgen/evalharness.hpp"
#include "seqgen/metrics.hpp"
#include "seqgen/render.hpp"
#include "seqgen/scenarios.hpp"
#include "seqgen/translation.hpp"

namespace seqgen {

constexpr int kCorpusSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Campaign configuration. Defaults reproduce the standard construction
// recipe: 60 programs per scenario, 5 calls per path, uniform-with-none
// split placement, data-dependency coverage guidance.
// ---------------------------------------------------------------------------

struct CampaignConfig {
  std::string scenario = "tensor";
  int programs_per_scenario = 60;
  int n_steps = 5;
  bool enable_split = true;  // uniform-with-none split policy; false = linear only
  CoverageMode coverage = CoverageMode::DataDependency;
  double epsilon = kEnergyEpsilon;
  std::uint64_t seed = 0;
  bool translate = false;
  std::string provider = "template";  // "template" | "http"
};

inline json campaign_config_to_json(const CampaignConfig& c) {
  return {{"scenario", c.scenario},
          {"programs_per_scenario", c.programs_per_scenario},
          {"n", c.n_steps},
          {"split", c.enable_split ? "uniform-with-none" : "none"},
          {"coverage", coverage_mode_name(c.coverage)},
          {"epsilon", c.epsilon},
          {"seed", std::to_string(c.seed)},
          {"translate", c.translate},
          {"provider", c.provider}};
}

inline CampaignConfig campaign_config_from_json(const json& j) {
  CampaignConfig c;
  c.scenario = j.value("scenario", c.scenario);
  c.programs_per_scenario = j.value("programs_per_scenario", c.programs_per_scenario);
  c.n_steps = j.value("n", c.n_steps);
  if (j.contains("split")) c.enable_split = j.at("split").get<std::string>() != "none";
  if (j.contains("coverage")) c.coverage = coverage_mode_from_name(j.at("coverage").get<std::string>());
  c.epsilon = j.value("epsilon", c.epsilon);
  if (j.contains("seed")) c.seed = std::stoull(j.at("seed").get<std::string>());
  c.translate = j.value("translate", c.translate);
  c.provider = j.value("provider", c.provider);
  return c;
}

// ---------------------------------------------------------------------------
// Corpus entries. Self-contained: everything evaluation needs (init preseed,
// seed, oracle) travels with the entry.
// ---------------------------------------------------------------------------

struct CorpusEntry {
  std::string id;  // "{scenario}-{NNNN}"
  std::string scenario;
  std::uint64_t seed = 0;
  Program ir;
  std::string source;
  std::map<std::string, Value> init;
  OracleRecord oracle;
  std::optional<std::string> instruction;
  json transcript = json(nullptr);
  bool needs_review = false;
  bool dead_branch = false;
  bool split = false;
  bool split_degraded = false;
};

inline json entry_to_json(const CorpusEntry& e) {
  json init = json::object();
  for (const auto& [k, v] : e.init) init[k] = value_to_json(v);
  return {{"id", e.id},
          {"scenario", e.scenario},
          {"seed", std::to_string(e.seed)},
          {"ir", program_to_json(e.ir)},
          {"source", e.source},
          {"init", std::move(init)},
          {"oracle", oracle_to_json(e.oracle)},
          {"instruction", e.instruction ? json(*e.instruction) : json(nullptr)},
          {"transcript", e.transcript},
          {"flags",
           {{"needs_review", e.needs_review},
            {"dead_branch", e.dead_branch},
            {"split", e.split},
            {"split_degraded", e.split_degraded}}}};
}

inline CorpusEntry entry_from_json(const json& j) {
  CorpusEntry e;
  e.id = j.at("id").get<std::string>();
  e.scenario = j.at("scenario").get<std::string>();
  e.seed = std::stoull(j.at("seed").get<std::string>());
  e.ir = program_from_json(j.at("ir"));
  e.source = j.at("source").get<std::string>();
  for (const auto& [k, v] : j.at("init").items()) e.init.emplace(k, value_from_json(v));
  e.oracle = oracle_from_json(j.at("oracle"));
  if (!j.at("instruction").is_null()) e.instruction = j.at("instruction").get<std::string>();
  e.transcript = j.at("transcript");
  const auto& flags = j.at("flags");
  e.needs_review = flags.at("needs_review").get<bool>();
  e.dead_branch = flags.at("dead_branch").get<bool>();
  e.split = flags.at("split").get<bool>();
  e.split_degraded = flags.at("split_degraded").get<bool>();
  return e;
}

// ---------------------------------------------------------------------------
// Campaign runner.
// ---------------------------------------------------------------------------

// Builds a per-program completion client; defaults to the offline template
// client when absent.
using ClientFactory = std::function<std::unique_ptr<translation::CompletionClient>(const Program&)>;

struct CampaignResult {
  std::vector<CorpusEntry> entries;
  FrequencyRecorder recorder;
  std::vector<std::string> skipped;  // dead-end items, logged and dropped
};

inline std::string entry_id(const std::string& scenario, int index) {
  char num[16];
  std::snprintf(num, sizeof num, "%04d", index);
  return scenario + "-" + num;
}

inline void translate_entry(CorpusEntry& entry, const ScenarioCatalog& catalog,
                            translation::CompletionClient& client) {
  auto t = translation::translate(entry.ir, catalog.documentation(), client);
  entry.instruction = t.instruction;
  entry.transcript = translation::transcript_to_json(t);
  entry.needs_review = translation::needs_review(t);
}

inline CampaignResult run_campaign(const CampaignConfig& cfg, const ClientFactory& factory = {}) {
  const ScenarioCatalog& catalog = scenario_by_name(cfg.scenario);
  CampaignResult out{{}, FrequencyRecorder(cfg.coverage), {}};

  BuildConfig bc;
  bc.n_steps = cfg.n_steps;
  bc.enable_split = cfg.enable_split;
  bc.engine.epsilon = cfg.epsilon;
  bc.engine.guided = cfg.coverage != CoverageMode::Off;

  for (int i = 0; i < cfg.programs_per_scenario; ++i) {
    const std::uint64_t entry_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    const std::string id = entry_id(cfg.scenario, i);
    Rng rng(entry_seed);

    BuildOutput bo;
    try {
      bo = build_program(catalog, out.recorder, rng, entry_seed, bc);
    } catch (const DeadEnd& e) {
      out.skipped.push_back(id + ": " + e.what());
      continue;
    }

    CorpusEntry entry;
    entry.id = id;
    entry.scenario = cfg.scenario;
    entry.seed = entry_seed;
    entry.ir = bo.program;
    entry.source = render_source(bo.program);
    for (const auto* d : bo.program.init_block()) entry.init.emplace(d->name, d->value);
    entry.oracle = capture_oracle(bo.program, catalog, entry_seed, bo.gen_log);
    entry.split = bo.split_pos > 0;
    entry.split_degraded = bo.split_degraded;
    entry.dead_branch = entry.oracle.dead_branch;

    if (cfg.translate) {
      try {
        auto client = factory ? factory(bo.program)
                              : std::make_unique<translation::TemplateClient>(bo.program);
        translate_entry(entry, catalog, *client);
      } catch (const translation::TransportError& e) {
        entry.needs_review = true;  // item aborted, campaign continues
        entry.transcript = json{{"error", e.what()}};
      }
    }
    out.entries.push_back(std::move(entry));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus file: versioned, canonical JSON so equal inputs yield equal bytes.
// ---------------------------------------------------------------------------

struct CorpusFile {
  int schema_version = kCorpusSchemaVersion;
  CampaignConfig config;
  json recorder;  // frequency-recorder checkpoint
  std::vector<CorpusEntry> entries;
};

inline CorpusFile corpus_of(const CampaignConfig& cfg, const CampaignResult& result) {
  CorpusFile f;
  f.config = cfg;
  f.recorder = result.recorder.to_json();
  f.entries = result.entries;
  return f;
}

inline json corpus_to_json(const CorpusFile& f) {
  json entries = json::array();
  for (const auto& e : f.entries) entries.push_back(entry_to_json(e));
  return {{"schema_version", f.schema_version},
          {"config", campaign_config_to_json(f.config)},
          {"recorder", f.recorder},
          {"entries", std::move(entries)}};
}

inline CorpusFile corpus_from_json(const json& j) {
  CorpusFile f;
  f.schema_version = j.at("schema_version").get<int>();
  f.config = campaign_config_from_json(j.at("config"));
  f.recorder = j.value("recorder", json(nullptr));
  for (const auto& e : j.at("entries")) f.entries.push_back(entry_from_json(e));
  return f;
}

inline std::string corpus_to_text(const CorpusFile& f) { return canonical_dump(corpus_to_json(f)) + "\n"; }

inline CorpusFile corpus_from_text(const std::string& text) {
  return corpus_from_json(json::parse(text));
}

// Re-translates every entry of an existing corpus (idempotent with the
// template provider). Transport failures mark the item and continue.
inline std::vector<std::string> translate_corpus(CorpusFile& f, const ClientFactory& factory = {}) {
  const ScenarioCatalog& catalog = scenario_by_name(f.config.scenario);
  std::vector<std::string> errors;
  for (auto& entry : f.entries) {
    try {
      auto client = factory ? factory(entry.ir)
                            : std::make_unique<translation::TemplateClient>(entry.ir);
      translate_entry(entry, catalog, *client);
    } catch (const translation::TransportError& e) {
      entry.needs_review = true;
      entry.transcript = json{{"error", e.what()}};
      errors.push_back(entry.id + ": " + e.what());
    }
  }
  return errors;
}

// ---------------------------------------------------------------------------
// Metrics and evaluation over a corpus file.
// ---------------------------------------------------------------------------

inline metrics::CorpusStats corpus_stats_of(const CorpusFile& f) {
  const ScenarioCatalog& catalog = scenario_by_name(f.config.scenario);
  std::vector<metrics::ProgramStats> per;
  std::vector<Program> programs;
  per.reserve(f.entries.size());
  programs.reserve(f.entries.size());
  for (const auto& e : f.entries) {
    per.push_back(metrics::program_stats(e.id, e.ir, e.instruction.value_or(""), e.source));
    programs.push_back(e.ir);
  }
  return metrics::corpus_stats(std::move(per), metrics::coverage_curve(programs, catalog.size()));
}

struct EvalRun {
  std::vector<eval::TaskVerdict> verdicts;
  std::vector<std::string> missing;  // entry ids with no candidate
};

inline EvalRun evaluate_corpus(const CorpusFile& f,
                               const std::map<std::string, std::string>& candidates) {
  const ScenarioCatalog& catalog = scenario_by_name(f.config.scenario);
  EvalRun run;
  for (const auto& e : f.entries) {
    auto it = candidates.find(e.id);
    if (it == candidates.end()) {
      run.missing.push_back(e.id);
      continue;
    }
    run.verdicts.push_back({e.id, e.scenario, eval::evaluate(it->second, catalog, e.init, e.seed, e.oracle)});
  }
  return run;
}

}  // namespace seqgen
